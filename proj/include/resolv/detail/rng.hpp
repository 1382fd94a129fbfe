#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "resolv/detail/sum.hpp"

namespace resolv::detail {

// All randomness flows through std::mt19937_64 seeded directly with the
// user-visible seed. The generator's output sequence is fixed by the
// standard, so runs reproduce bit-for-bit across platforms.
//
// std::uniform_real_distribution is implementation-defined and is avoided;
// uniform doubles are built from the top 53 bits instead.

inline double uniform_unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF sampler over a fixed pmf indexed 0..size-1.
class CdfSampler {
public:
    explicit CdfSampler(const std::vector<double>& pmf) {
        cdf_.reserve(pmf.size());
        NeumaierSum acc;
        for (double p : pmf) {
            acc.add(p);
            cdf_.push_back(acc.value());
        }
        if (!cdf_.empty()) cdf_.back() = 1.0;
    }

    std::size_t operator()(std::mt19937_64& g) const {
        const double u = uniform_unit(g);
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf_[mid] > u) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    }

private:
    std::vector<double> cdf_;
};

}  // namespace resolv::detail
