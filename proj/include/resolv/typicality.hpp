#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/sum.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/product.hpp"

namespace resolv {

/// Empirical distribution of a sequence, kept as exact integer counts over
/// the sequence length. Frequencies only become floating point at the
/// predicate boundaries.
class TypeVector {
public:
    TypeVector(std::vector<std::string> labels, std::vector<long long> counts,
               long long n)
        : labels_(std::move(labels)), counts_(std::move(counts)), n_(n) {
        if (labels_.size() != counts_.size() || n_ <= 0) {
            throw ValidationError("type vector: malformed counts");
        }
        long long total = 0;
        for (long long c : counts_) {
            if (c < 0) throw ValidationError("type vector: negative count");
            total += c;
        }
        if (total != n_) {
            throw ValidationError("type vector: counts sum to " +
                                  std::to_string(total) + ", expected " +
                                  std::to_string(n_));
        }
    }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<long long>& counts() const { return counts_; }
    long long denominator() const { return n_; }
    std::size_t size() const { return counts_.size(); }

    double freq(std::size_t i) const {
        return static_cast<double>(counts_[i]) / static_cast<double>(n_);
    }

private:
    std::vector<std::string> labels_;
    std::vector<long long> counts_;
    long long n_;
};

namespace detail {

inline std::vector<int> symbols_to_indices(
    const std::vector<std::string>& sequence,
    const std::vector<std::string>& alphabet) {
    std::vector<int> idx;
    idx.reserve(sequence.size());
    for (const auto& s : sequence) {
        bool found = false;
        for (std::size_t i = 0; i < alphabet.size(); ++i) {
            if (alphabet[i] == s) {
                idx.push_back(static_cast<int>(i));
                found = true;
                break;
            }
        }
        if (!found) {
            throw DomainError("sequence symbol '" + s +
                              "' not in the alphabet");
        }
    }
    return idx;
}

inline std::vector<long long> count_indices(const std::vector<int>& seq,
                                            std::size_t alphabet_size) {
    std::vector<long long> counts(alphabet_size, 0);
    for (int s : seq) {
        if (s < 0 || static_cast<std::size_t>(s) >= alphabet_size) {
            throw DomainError("sequence index out of range");
        }
        ++counts[static_cast<std::size_t>(s)];
    }
    return counts;
}

}  // namespace detail

inline TypeVector type_of(const std::vector<int>& sequence,
                          const std::vector<std::string>& alphabet) {
    if (sequence.empty()) throw DomainError("type_of: empty sequence");
    return TypeVector(alphabet,
                      detail::count_indices(sequence, alphabet.size()),
                      static_cast<long long>(sequence.size()));
}

inline TypeVector type_of(const std::vector<std::string>& sequence,
                          const std::vector<std::string>& alphabet) {
    return type_of(detail::symbols_to_indices(sequence, alphabet), alphabet);
}

/// Pair type over the product alphabet; pair labels are "x,y".
inline TypeVector joint_type_of(const std::vector<int>& xs,
                                const std::vector<int>& ys,
                                const std::vector<std::string>& x_alphabet,
                                const std::vector<std::string>& y_alphabet) {
    if (xs.size() != ys.size()) {
        throw DomainError("joint_type_of: sequence lengths differ");
    }
    if (xs.empty()) throw DomainError("joint_type_of: empty sequences");
    const std::size_t ax = x_alphabet.size();
    const std::size_t ay = y_alphabet.size();
    std::vector<long long> counts(ax * ay, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const int a = xs[i];
        const int b = ys[i];
        if (a < 0 || static_cast<std::size_t>(a) >= ax || b < 0 ||
            static_cast<std::size_t>(b) >= ay) {
            throw DomainError("joint_type_of: symbol index out of range");
        }
        ++counts[static_cast<std::size_t>(a) * ay +
                 static_cast<std::size_t>(b)];
    }
    std::vector<std::string> labels;
    labels.reserve(ax * ay);
    for (const auto& la : x_alphabet)
        for (const auto& lb : y_alphabet) labels.push_back(la + "," + lb);
    return TypeVector(std::move(labels), std::move(counts),
                      static_cast<long long>(xs.size()));
}

inline TypeVector joint_type_of(const std::vector<std::string>& xs,
                                const std::vector<std::string>& ys,
                                const std::vector<std::string>& x_alphabet,
                                const std::vector<std::string>& y_alphabet) {
    return joint_type_of(detail::symbols_to_indices(xs, x_alphabet),
                         detail::symbols_to_indices(ys, y_alphabet),
                         x_alphabet, y_alphabet);
}

/// True iff the type of y deviates from p_y by at most eps in every
/// coordinate.
inline bool is_typical_output(const std::vector<int>& y,
                              const FiniteDistribution& p_y, double eps) {
    const auto counts = detail::count_indices(y, p_y.size());
    const double n = static_cast<double>(y.size());
    for (std::size_t b = 0; b < p_y.size(); ++b) {
        const double dev = std::abs(static_cast<double>(counts[b]) / n -
                                    p_y.prob(b));
        if (!(dev <= eps)) return false;
    }
    return true;
}

inline bool is_typical_output(const std::vector<std::string>& y,
                              const FiniteDistribution& p_y, double eps) {
    return is_typical_output(detail::symbols_to_indices(y, p_y.labels()), p_y,
                             eps);
}

/// True iff the joint type of (x, y) deviates from P_x(a) W(b|a) by at most
/// eps in every coordinate.
inline bool is_cond_typical(const std::vector<int>& y,
                            const std::vector<int>& x, const Channel& w,
                            double eps) {
    if (x.size() != y.size()) {
        throw DomainError("is_cond_typical: sequence lengths differ");
    }
    const std::size_t ax = w.in_size();
    const std::size_t ay = w.out_size();
    std::vector<long long> joint(ax * ay, 0);
    std::vector<long long> x_counts(ax, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int a = x[i];
        const int b = y[i];
        if (a < 0 || static_cast<std::size_t>(a) >= ax || b < 0 ||
            static_cast<std::size_t>(b) >= ay) {
            throw DomainError("is_cond_typical: symbol index out of range");
        }
        ++joint[static_cast<std::size_t>(a) * ay + static_cast<std::size_t>(b)];
        ++x_counts[static_cast<std::size_t>(a)];
    }
    const double n = static_cast<double>(x.size());
    for (std::size_t a = 0; a < ax; ++a) {
        const double px = static_cast<double>(x_counts[a]) / n;
        for (std::size_t b = 0; b < ay; ++b) {
            const double dev =
                std::abs(static_cast<double>(joint[a * ay + b]) / n -
                         px * w.prob(a, b));
            if (!(dev <= eps)) return false;
        }
    }
    return true;
}

inline bool is_cond_typical(const std::vector<std::string>& y,
                            const std::vector<std::string>& x,
                            const Channel& w, double eps) {
    return is_cond_typical(detail::symbols_to_indices(y, w.out_labels()),
                           detail::symbols_to_indices(x, w.in_labels()), w,
                           eps);
}

/// True iff the pushforward PW deviates from p_y by at most 2 |X| eps in
/// every output coordinate.
inline bool in_AY(const FiniteDistribution& p, const Channel& w,
                  const FiniteDistribution& p_y, double eps) {
    const FiniteDistribution pushed = output_distribution(p, w);
    const auto perm = detail::label_permutation(pushed.labels(), p_y.labels());
    if (!perm) throw DomainError("in_AY: output alphabets differ");
    const double bound = 2.0 * static_cast<double>(p.size()) * eps;
    for (std::size_t b = 0; b < pushed.size(); ++b) {
        if (!(std::abs(pushed.prob(b) - p_y.prob((*perm)[b])) <= bound)) {
            return false;
        }
    }
    return true;
}

/// The tolerance inflation used ahead of truncation: eps' = |X| eps.
inline double scaled_typicality_tolerance(double eps,
                                          std::size_t x_alphabet_size) {
    return static_cast<double>(x_alphabet_size) * eps;
}

/// Conditions a block distribution (row-major over length-n sequences) on
/// the eps-typical set of its per-letter marginal. Returns the conditional
/// distribution and tau, the typical-set mass.
inline std::pair<FiniteDistribution, double> truncate_to_typical(
    const FiniteDistribution& p_block, const FiniteDistribution& p_y_letter,
    int n, double eps) {
    if (n < 1) throw DomainError("truncate_to_typical: n must be >= 1");
    const std::size_t base = p_y_letter.size();
    std::size_t expect = 1;
    for (int i = 0; i < n; ++i) expect *= base;
    if (p_block.size() != expect) {
        throw DomainError(
            "truncate_to_typical: block distribution is not a row-major "
            "product over the per-letter alphabet");
    }
    std::vector<int> digits;
    std::vector<long long> counts(base, 0);
    std::vector<char> keep(p_block.size(), 0);
    detail::NeumaierSum tau_acc;
    const double dn = static_cast<double>(n);
    for (std::size_t idx = 0; idx < p_block.size(); ++idx) {
        detail::sequence_digits(idx, base, n, digits);
        std::fill(counts.begin(), counts.end(), 0);
        for (int d : digits) ++counts[static_cast<std::size_t>(d)];
        bool typical = true;
        for (std::size_t b = 0; b < base; ++b) {
            const double dev = std::abs(
                static_cast<double>(counts[b]) / dn - p_y_letter.prob(b));
            if (!(dev <= eps)) {
                typical = false;
                break;
            }
        }
        if (typical) {
            keep[idx] = 1;
            tau_acc.add(p_block.prob(idx));
        }
    }
    const double tau = tau_acc.value();
    if (tau <= 0.0) {
        throw DegenerateTruncationError(
            "truncate_to_typical: typical set has zero mass (tau = 0)");
    }
    std::vector<double> pmf(p_block.size(), 0.0);
    for (std::size_t idx = 0; idx < p_block.size(); ++idx) {
        if (keep[idx]) pmf[idx] = p_block.prob(idx) / tau;
    }
    return {FiniteDistribution(p_block.labels(), std::move(pmf),
                               kProductSumTol),
            tau};
}

}  // namespace resolv
