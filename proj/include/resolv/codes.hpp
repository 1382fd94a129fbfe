#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resolv/detail/parallel.hpp"
#include "resolv/detail/rng.hpp"
#include "resolv/detail/sum.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/spectrum.hpp"

namespace resolv {

/// A deterministic map from a uniform index to channel inputs, stored as a
/// multiset of block-input labels (repeats allowed). `seed` records the
/// generator seed when the code was drawn rather than constructed.
struct ResolvabilityCode {
    int n = 1;
    std::vector<std::string> codewords;
    std::optional<std::uint64_t> seed;

    std::uint64_t size() const {
        return static_cast<std::uint64_t>(codewords.size());
    }
};

namespace detail {

inline std::vector<std::size_t> codeword_rows(const ResolvabilityCode& code,
                                              const Channel& wn) {
    std::unordered_map<std::string, std::size_t> where;
    where.reserve(wn.in_labels().size());
    for (std::size_t i = 0; i < wn.in_labels().size(); ++i) {
        where.emplace(wn.in_labels()[i], i);
    }
    std::vector<std::size_t> rows;
    rows.reserve(code.codewords.size());
    for (const auto& cw : code.codewords) {
        auto it = where.find(cw);
        if (it == where.end()) {
            throw DomainError("code: codeword '" + cw +
                              "' is not a channel input");
        }
        rows.push_back(it->second);
    }
    return rows;
}

}  // namespace detail

/// Uniform mixture of the channel rows selected by the code.
inline FiniteDistribution code_output_distribution(
    const ResolvabilityCode& code, const Channel& wn) {
    if (code.codewords.empty()) throw DomainError("code: empty codebook");
    const auto rows = detail::codeword_rows(code, wn);
    const double weight = 1.0 / static_cast<double>(rows.size());
    std::vector<double> pmf(wn.out_size(), 0.0);
    for (std::size_t j = 0; j < wn.out_size(); ++j) {
        detail::NeumaierSum acc;
        for (std::size_t r : rows) acc.add(wn.prob(r, j));
        pmf[j] = acc.value() * weight;
    }
    return FiniteDistribution(wn.out_labels(), std::move(pmf), kProductSumTol);
}

inline double code_distance(const ResolvabilityCode& code, const Channel& wn,
                            const FiniteDistribution& target) {
    return variational_distance(code_output_distribution(code, wn), target);
}

/// M i.i.d. draws from the block input distribution. Same seed, same code:
/// the generator is std::mt19937_64 seeded directly, uniforms take the top
/// 53 bits, indices come from the inverse CDF in label order.
inline ResolvabilityCode random_code(const FiniteDistribution& p_xn,
                                     std::uint64_t M, std::uint64_t seed,
                                     int n) {
    if (M < 1) throw DomainError("random_code: M must be >= 1");
    std::mt19937_64 gen(seed);
    const detail::CdfSampler sample(p_xn.pmf());
    ResolvabilityCode code;
    code.n = n;
    code.seed = seed;
    code.codewords.reserve(M);
    for (std::uint64_t i = 0; i < M; ++i) {
        code.codewords.push_back(p_xn.label(sample(gen)));
    }
    return code;
}

struct BestRandomCode {
    ResolvabilityCode code;
    double distance = 0.0;
    std::uint64_t best_trial = 0;
};

/// Minimum-distance code among `trials` draws from one continuous seeded
/// stream, so best-of-k is nonincreasing in k. Ties keep the earliest
/// trial.
inline BestRandomCode best_random_code(const FiniteDistribution& p_xn,
                                       const Channel& wn,
                                       const FiniteDistribution& target,
                                       std::uint64_t M, std::uint64_t trials,
                                       std::uint64_t seed, int n) {
    if (trials < 1) throw DomainError("best_random_code: trials must be >= 1");
    std::mt19937_64 gen(seed);
    const detail::CdfSampler sample(p_xn.pmf());
    BestRandomCode best;
    for (std::uint64_t t = 0; t < trials; ++t) {
        ResolvabilityCode code;
        code.n = n;
        code.seed = seed;
        code.codewords.reserve(M);
        for (std::uint64_t i = 0; i < M; ++i) {
            code.codewords.push_back(p_xn.label(sample(gen)));
        }
        const double d = code_distance(code, wn, target);
        if (t == 0 || d < best.distance) {
            best.code = std::move(code);
            best.distance = d;
            best.best_trial = t;
        }
    }
    return best;
}

/// C(K + M - 1, M) with saturation instead of overflow.
inline std::uint64_t multiset_count(std::uint64_t K, std::uint64_t M) {
    long double v = 1.0L;
    for (std::uint64_t i = 1; i <= M; ++i) {
        v *= static_cast<long double>(K - 1 + i) / static_cast<long double>(i);
        if (v > 1e18L) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(v + 0.5L);
}

struct OptimalCode {
    ResolvabilityCode code;
    double distance = 0.0;
};

/// Global minimum-distance codebook over all multisets of M channel rows,
/// enumerated in lexicographic row order (so the reported optimum is the
/// lexicographically smallest among ties). Order in the mixture is
/// irrelevant, which is why multisets rather than tuples are searched.
inline OptimalCode exhaustive_optimal_code(const Channel& wn,
                                           const FiniteDistribution& target,
                                           std::uint64_t M, int n,
                                           std::uint64_t budget = 1'000'000,
                                           int threads = 1) {
    if (M < 1) throw DomainError("exhaustive_optimal_code: M must be >= 1");
    const std::size_t K = wn.in_size();
    const std::uint64_t total = multiset_count(K, M);
    if (total > budget) {
        throw ResourceError("exhaustive_optimal_code: " +
                            std::to_string(total) +
                            " multisets exceed budget " +
                            std::to_string(budget));
    }
    const auto perm = detail::label_permutation(target.labels(),
                                                wn.out_labels());
    if (!perm) {
        throw DomainError("exhaustive_optimal_code: target alphabet mismatch");
    }
    std::vector<double> target_pmf(wn.out_size());
    for (std::size_t j = 0; j < target.size(); ++j) {
        target_pmf[(*perm)[j]] = target.prob(j);
    }

    struct Candidate {
        double distance = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> rows;
    };
    std::vector<Candidate> slots(K);
    const double inv_m = 1.0 / static_cast<double>(M);

    detail::parallel_for(K, threads, [&](std::size_t first) {
        Candidate& best = slots[first];
        std::vector<std::size_t> chosen(M, 0);
        // row sums accumulated per depth; level d holds the sum of the
        // first d chosen rows.
        std::vector<std::vector<double>> acc(
            M + 1, std::vector<double>(wn.out_size(), 0.0));
        chosen[0] = first;
        auto descend = [&](auto&& self, std::size_t depth) -> void {
            const std::size_t row = chosen[depth - 1];
            for (std::size_t j = 0; j < wn.out_size(); ++j) {
                acc[depth][j] = acc[depth - 1][j] + wn.prob(row, j);
            }
            if (depth == M) {
                detail::NeumaierSum dist;
                for (std::size_t j = 0; j < wn.out_size(); ++j) {
                    dist.add(std::abs(acc[depth][j] * inv_m - target_pmf[j]));
                }
                const double d = 0.5 * dist.value();
                if (d < best.distance) {
                    best.distance = d;
                    best.rows.assign(chosen.begin(), chosen.end());
                }
                return;
            }
            for (std::size_t r = row; r < K; ++r) {
                chosen[depth] = r;
                self(self, depth + 1);
            }
        };
        descend(descend, 1);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < K; ++i) {
        if (slots[i].distance < slots[best].distance) best = i;
    }
    OptimalCode result;
    result.distance = std::clamp(slots[best].distance, 0.0, 1.0);
    result.code.n = n;
    for (std::size_t r : slots[best].rows) {
        result.code.codewords.push_back(wn.in_labels()[r]);
    }
    return result;
}

/// Spectrum of the per-symbol density log(W(y|x)/ref(y)) under the
/// code-induced joint: uniform index, then the channel row.
inline Spectrum code_info_spectrum(const ResolvabilityCode& code,
                                   const Channel& wn,
                                   const FiniteDistribution& ref, int n,
                                   std::size_t atom_cap = kDefaultAtomCap) {
    if (code.codewords.empty()) throw DomainError("code: empty codebook");
    const auto rows = detail::codeword_rows(code, wn);
    // Collapse repeated codewords into their empirical weight.
    std::map<std::size_t, std::uint64_t> counts;
    for (std::size_t r : rows) ++counts[r];
    std::vector<double> weights(wn.in_size(), 0.0);
    for (const auto& [r, c] : counts) {
        weights[r] = static_cast<double>(c) /
                     static_cast<double>(rows.size());
    }
    FiniteDistribution induced(wn.in_labels(), std::move(weights),
                               kProductSumTol);
    return info_density_spectrum(induced, wn, ref, n, /*normalize_by_n=*/true,
                                 atom_cap);
}

}  // namespace resolv
