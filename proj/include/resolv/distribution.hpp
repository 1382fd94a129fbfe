#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resolv/detail/sum.hpp"
#include "resolv/errors.hpp"

namespace resolv {

/// Tolerance on "sums to 1" for user-supplied pmfs and channel rows.
inline constexpr double kInputSumTol = 1e-12;
/// Tolerance on "sums to 1" after n-fold product constructions.
inline constexpr double kProductSumTol = 1e-9;

/// Probability mass function over a labeled finite alphabet. Labels keep
/// the user-supplied order; that order is the canonical one everywhere
/// (indexing, CSV output, tie-breaking).
class FiniteDistribution {
public:
    FiniteDistribution(std::vector<std::string> labels, std::vector<double> pmf,
                       double sum_tol = kInputSumTol)
        : labels_(std::move(labels)), pmf_(std::move(pmf)) {
        if (labels_.empty()) {
            throw ValidationError("distribution: alphabet is empty");
        }
        if (labels_.size() != pmf_.size()) {
            throw ValidationError("distribution: " +
                                  std::to_string(labels_.size()) +
                                  " labels vs " + std::to_string(pmf_.size()) +
                                  " masses");
        }
        detail::NeumaierSum total;
        for (std::size_t i = 0; i < pmf_.size(); ++i) {
            if (!(pmf_[i] >= 0.0)) {
                throw ValidationError("distribution: negative mass " +
                                      detail::num_str(pmf_[i]) + " at symbol '" +
                                      labels_[i] + "'");
            }
            total.add(pmf_[i]);
        }
        if (std::abs(total.value() - 1.0) > sum_tol) {
            throw ValidationError("distribution: masses sum to " +
                                  detail::num_str(total.value()) +
                                  ", expected 1 within " +
                                  detail::num_str(sum_tol));
        }
        std::vector<std::string> sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ValidationError("distribution: duplicate alphabet label");
        }
    }

    std::size_t size() const { return pmf_.size(); }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    double prob(std::size_t i) const { return pmf_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& pmf() const { return pmf_; }

    std::optional<std::size_t> index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == label) return i;
        }
        return std::nullopt;
    }

    static FiniteDistribution uniform(std::vector<std::string> labels) {
        const double p = 1.0 / static_cast<double>(labels.size());
        std::vector<double> pmf(labels.size(), p);
        return FiniteDistribution(std::move(labels), std::move(pmf),
                                  kProductSumTol);
    }

    static FiniteDistribution point_mass(std::vector<std::string> labels,
                                         std::size_t index) {
        std::vector<double> pmf(labels.size(), 0.0);
        pmf.at(index) = 1.0;
        return FiniteDistribution(std::move(labels), std::move(pmf));
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> pmf_;
};

/// Row-stochastic transition matrix between two labeled alphabets.
class Channel {
public:
    Channel(std::vector<std::string> input_labels,
            std::vector<std::string> output_labels, std::vector<double> matrix,
            double row_sum_tol = kInputSumTol)
        : in_labels_(std::move(input_labels)),
          out_labels_(std::move(output_labels)),
          matrix_(std::move(matrix)) {
        if (in_labels_.empty() || out_labels_.empty()) {
            throw ValidationError("channel: empty alphabet");
        }
        if (matrix_.size() != in_labels_.size() * out_labels_.size()) {
            throw ValidationError("channel: matrix has " +
                                  std::to_string(matrix_.size()) +
                                  " entries, expected " +
                                  std::to_string(in_labels_.size() *
                                                 out_labels_.size()));
        }
        for (std::size_t i = 0; i < in_labels_.size(); ++i) {
            detail::NeumaierSum row_sum;
            for (std::size_t j = 0; j < out_labels_.size(); ++j) {
                const double w = prob(i, j);
                if (!(w >= 0.0)) {
                    throw ValidationError(
                        "channel: negative entry " + detail::num_str(w) +
                        " in row " + std::to_string(i));
                }
                row_sum.add(w);
            }
            if (std::abs(row_sum.value() - 1.0) > row_sum_tol) {
                throw ValidationError("channel: row " + std::to_string(i) +
                                      " sums to " +
                                      detail::num_str(row_sum.value()) +
                                      ", expected 1 within " +
                                      detail::num_str(row_sum_tol));
            }
        }
    }

    std::size_t in_size() const { return in_labels_.size(); }
    std::size_t out_size() const { return out_labels_.size(); }
    const std::vector<std::string>& in_labels() const { return in_labels_; }
    const std::vector<std::string>& out_labels() const { return out_labels_; }

    /// W(output j | input i).
    double prob(std::size_t i, std::size_t j) const {
        return matrix_[i * out_labels_.size() + j];
    }

    std::span<const double> row(std::size_t i) const {
        return {matrix_.data() + i * out_labels_.size(), out_labels_.size()};
    }

    static Channel identity(std::vector<std::string> labels) {
        const std::size_t k = labels.size();
        std::vector<double> m(k * k, 0.0);
        for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0;
        std::vector<std::string> out = labels;
        return Channel(std::move(labels), std::move(out), std::move(m));
    }

    /// Binary symmetric channel over {"0","1"} with flip probability p.
    static Channel binary_symmetric(double flip_prob) {
        if (!(flip_prob >= 0.0) || !(flip_prob <= 1.0)) {
            throw DomainError("binary_symmetric: flip probability " +
                              std::to_string(flip_prob));
        }
        return Channel({"0", "1"}, {"0", "1"},
                       {1.0 - flip_prob, flip_prob, flip_prob,
                        1.0 - flip_prob});
    }

    /// All rows equal to the given output distribution.
    static Channel constant_rows(std::vector<std::string> input_labels,
                                 const FiniteDistribution& row) {
        std::vector<double> m;
        m.reserve(input_labels.size() * row.size());
        for (std::size_t i = 0; i < input_labels.size(); ++i) {
            m.insert(m.end(), row.pmf().begin(), row.pmf().end());
        }
        return Channel(std::move(input_labels), row.labels(), std::move(m));
    }

private:
    std::vector<std::string> in_labels_;
    std::vector<std::string> out_labels_;
    std::vector<double> matrix_;  // row-major, in_size x out_size
};

namespace detail {

/// Permutation mapping positions of `from` onto `to` when both hold the
/// same label set; nullopt otherwise. Identity is detected cheaply.
inline std::optional<std::vector<std::size_t>> label_permutation(
    const std::vector<std::string>& from, const std::vector<std::string>& to) {
    if (from.size() != to.size()) return std::nullopt;
    if (from == to) {
        std::vector<std::size_t> id(from.size());
        for (std::size_t i = 0; i < from.size(); ++i) id[i] = i;
        return id;
    }
    std::unordered_map<std::string, std::size_t> where;
    where.reserve(to.size());
    for (std::size_t i = 0; i < to.size(); ++i) where.emplace(to[i], i);
    std::vector<std::size_t> perm(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        auto it = where.find(from[i]);
        if (it == where.end()) return std::nullopt;
        perm[i] = it->second;
    }
    return perm;
}

}  // namespace detail

/// Half the L1 distance between two pmfs on the same alphabet.
inline double variational_distance(const FiniteDistribution& p,
                                   const FiniteDistribution& q) {
    if (p.labels() == q.labels()) {
        detail::NeumaierSum acc;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc.add(std::abs(p.prob(i) - q.prob(i)));
        }
        return std::clamp(0.5 * acc.value(), 0.0, 1.0);
    }
    const auto perm = detail::label_permutation(p.labels(), q.labels());
    if (!perm) {
        throw DomainError(
            "variational_distance: distributions use different alphabets");
    }
    detail::NeumaierSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc.add(std::abs(p.prob(i) - q.prob((*perm)[i])));
    }
    return std::clamp(0.5 * acc.value(), 0.0, 1.0);
}

/// Pushforward of an input distribution through a channel.
inline FiniteDistribution output_distribution(const FiniteDistribution& p_x,
                                              const Channel& w) {
    const auto perm = detail::label_permutation(p_x.labels(), w.in_labels());
    if (!perm) {
        throw DomainError(
            "output_distribution: input alphabet does not match channel");
    }
    std::vector<detail::NeumaierSum> bins(w.out_size());
    for (std::size_t i = 0; i < p_x.size(); ++i) {
        const double px = p_x.prob(i);
        if (px == 0.0) continue;
        const std::size_t r = (*perm)[i];
        for (std::size_t j = 0; j < w.out_size(); ++j) {
            bins[j].add(px * w.prob(r, j));
        }
    }
    std::vector<double> pmf(w.out_size());
    for (std::size_t j = 0; j < w.out_size(); ++j) pmf[j] = bins[j].value();
    return FiniteDistribution(w.out_labels(), std::move(pmf), kProductSumTol);
}

}  // namespace resolv
