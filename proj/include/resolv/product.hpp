#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/sum.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"

namespace resolv {

/// Default cap on exact enumerations (outcomes for distributions, entries
/// for materialized channels).
inline constexpr std::size_t kDefaultEnumerationBudget = std::size_t{1} << 22;

enum class ProductMode { kIid, kAlternating };

/// One per-letter (source, channel) pair with matching input alphabet.
struct ProductComponent {
    FiniteDistribution source;
    Channel channel;

    ProductComponent(FiniteDistribution s, Channel c)
        : source(std::move(s)), channel(std::move(c)) {
        if (source.labels() != channel.in_labels()) {
            throw ValidationError(
                "product component: source alphabet does not match channel "
                "input");
        }
    }
};

/// Block model at a fixed length n. Alternating mode carries two
/// components over common alphabets and selects one for the whole block by
/// the parity of n: component 0 when n is odd, component 1 when n is even.
class ProductSpec {
public:
    ProductSpec(std::vector<ProductComponent> components, int n,
                ProductMode mode)
        : components_(std::move(components)), n_(n), mode_(mode) {
        if (n_ < 1) throw ValidationError("product spec: n must be >= 1");
        const std::size_t want =
            mode_ == ProductMode::kAlternating ? 2 : 1;
        if (components_.size() != want) {
            throw ValidationError("product spec: expected " +
                                  std::to_string(want) + " components, got " +
                                  std::to_string(components_.size()));
        }
        if (mode_ == ProductMode::kAlternating) {
            const auto& a = components_[0];
            const auto& b = components_[1];
            if (a.source.labels() != b.source.labels() ||
                a.channel.out_labels() != b.channel.out_labels()) {
                throw ValidationError(
                    "product spec: alternating components must share "
                    "alphabets");
            }
        }
    }

    int n() const { return n_; }
    ProductMode mode() const { return mode_; }
    const std::vector<ProductComponent>& components() const {
        return components_;
    }

    /// Index of the component governing blocklength n.
    std::size_t parity_index() const {
        return mode_ == ProductMode::kAlternating && n_ % 2 == 0 ? 1 : 0;
    }

    const ProductComponent& active() const {
        return components_[parity_index()];
    }

private:
    std::vector<ProductComponent> components_;
    int n_;
    ProductMode mode_;
};

namespace detail {

inline std::size_t checked_power(std::size_t base, int n, std::size_t budget,
                                 const std::string& what) {
    std::size_t result = 1;
    for (int i = 0; i < n; ++i) {
        if (result > budget / base) {
            throw ResourceError(
                what + ": enumeration of " + std::to_string(base) + "^" +
                std::to_string(n) + " outcomes exceeds budget " +
                std::to_string(budget) +
                "; use spectrum_memoryless_exact for spectra at this "
                "blocklength");
        }
        result *= base;
    }
    return result;
}

/// Digits of `index` in base `base`, most significant first.
inline void sequence_digits(std::size_t index, std::size_t base, int n,
                            std::vector<int>& out) {
    out.assign(static_cast<std::size_t>(n), 0);
    for (int pos = n; pos-- > 0;) {
        out[static_cast<std::size_t>(pos)] = static_cast<int>(index % base);
        index /= base;
    }
}

inline bool all_single_char(const std::vector<std::string>& labels) {
    for (const auto& l : labels)
        if (l.size() != 1) return false;
    return true;
}

/// Label for a sequence of per-letter symbols: plain concatenation when
/// every letter label is a single character, '.'-joined otherwise.
inline std::string sequence_label(const std::vector<int>& digits,
                                  const std::vector<std::string>& letters,
                                  bool concat) {
    std::string s;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (!concat && i > 0) s += '.';
        s += letters[static_cast<std::size_t>(digits[i])];
    }
    return s;
}

inline std::vector<std::string> sequence_labels(
    const std::vector<std::string>& letters, int n, std::size_t total) {
    const bool concat = all_single_char(letters);
    std::vector<std::string> labels;
    labels.reserve(total);
    std::vector<int> digits;
    for (std::size_t idx = 0; idx < total; ++idx) {
        sequence_digits(idx, letters.size(), n, digits);
        labels.push_back(sequence_label(digits, letters, concat));
    }
    return labels;
}

}  // namespace detail

/// Exact n-fold product pmf over length-n sequences, row-major in the
/// per-letter order (first letter most significant).
inline FiniteDistribution product_distribution(
    const FiniteDistribution& per_letter, int n,
    std::size_t budget = kDefaultEnumerationBudget) {
    if (n < 1) throw DomainError("product_distribution: n must be >= 1");
    const std::size_t base = per_letter.size();
    const std::size_t total =
        detail::checked_power(base, n, budget, "product_distribution");
    std::vector<double> pmf(total, 1.0);
    std::vector<int> digits;
    for (std::size_t idx = 0; idx < total; ++idx) {
        detail::sequence_digits(idx, base, n, digits);
        double p = 1.0;
        for (int d : digits) p *= per_letter.prob(static_cast<std::size_t>(d));
        pmf[idx] = p;
    }
    return FiniteDistribution(detail::sequence_labels(per_letter.labels(), n,
                                                      total),
                              std::move(pmf), kProductSumTol);
}

inline FiniteDistribution product_distribution(
    const ProductSpec& spec, std::size_t budget = kDefaultEnumerationBudget) {
    return product_distribution(spec.active().source, spec.n(), budget);
}

/// Exact n-fold product channel, materialized entry by entry.
inline Channel product_channel(const Channel& per_letter, int n,
                               std::size_t budget = kDefaultEnumerationBudget) {
    if (n < 1) throw DomainError("product_channel: n must be >= 1");
    const std::size_t in_base = per_letter.in_size();
    const std::size_t out_base = per_letter.out_size();
    // Budget covers the full entry count.
    const std::size_t in_total =
        detail::checked_power(in_base, n, budget, "product_channel");
    const std::size_t out_total =
        detail::checked_power(out_base, n, budget, "product_channel");
    if (in_total > budget / out_total) {
        throw ResourceError("product_channel: " + std::to_string(in_total) +
                            " x " + std::to_string(out_total) +
                            " entries exceed budget " +
                            std::to_string(budget));
    }
    std::vector<double> matrix(in_total * out_total, 0.0);
    std::vector<int> in_digits, out_digits;
    for (std::size_t r = 0; r < in_total; ++r) {
        detail::sequence_digits(r, in_base, n, in_digits);
        for (std::size_t s = 0; s < out_total; ++s) {
            detail::sequence_digits(s, out_base, n, out_digits);
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                w *= per_letter.prob(
                    static_cast<std::size_t>(in_digits[static_cast<std::size_t>(i)]),
                    static_cast<std::size_t>(out_digits[static_cast<std::size_t>(i)]));
                if (w == 0.0) break;
            }
            matrix[r * out_total + s] = w;
        }
    }
    return Channel(detail::sequence_labels(per_letter.in_labels(), n, in_total),
                   detail::sequence_labels(per_letter.out_labels(), n,
                                           out_total),
                   std::move(matrix), kProductSumTol);
}

inline Channel product_channel(const ProductSpec& spec,
                               std::size_t budget = kDefaultEnumerationBudget) {
    return product_channel(spec.active().channel, spec.n(), budget);
}

/// Exact variational distance between the n-fold products of two pmfs on a
/// common alphabet. Sequences are grouped by type, so the cost is the
/// number of compositions of n rather than |alphabet|^n.
inline double product_tv_distance(const FiniteDistribution& p,
                                  const FiniteDistribution& q, int n,
                                  std::size_t budget =
                                      kDefaultEnumerationBudget) {
    if (p.labels() != q.labels()) {
        throw DomainError("product_tv_distance: alphabets differ");
    }
    if (n < 1) throw DomainError("product_tv_distance: n must be >= 1");
    const std::size_t k = p.size();

    // Composition count C(n + k - 1, k - 1) against the budget.
    double comps = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        comps *= static_cast<double>(n + i) / static_cast<double>(i);
    }
    if (comps > static_cast<double>(budget)) {
        throw ResourceError("product_tv_distance: " +
                            std::to_string(static_cast<std::uint64_t>(comps)) +
                            " types exceed budget " + std::to_string(budget));
    }

    std::vector<double> log_p(k), log_q(k);
    for (std::size_t i = 0; i < k; ++i) {
        log_p[i] = std::log(p.prob(i));  // -inf on zero mass is fine
        log_q[i] = std::log(q.prob(i));
    }

    detail::NeumaierSum acc;
    std::vector<int> counts(k, 0);
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);

    auto term = [&](const std::vector<double>& logs) {
        double v = log_n_fact;
        for (std::size_t i = 0; i < k; ++i) {
            if (counts[i] == 0) continue;
            if (logs[i] == -std::numeric_limits<double>::infinity()) {
                return 0.0;
            }
            v += counts[i] * logs[i] -
                 std::lgamma(static_cast<double>(counts[i]) + 1.0);
        }
        return std::exp(v);
    };

    auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == k) {
            counts[pos] = remaining;
            acc.add(std::abs(term(log_p) - term(log_q)));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    recurse(recurse, 0, n);
    return std::clamp(0.5 * acc.value(), 0.0, 1.0);
}

}  // namespace resolv
