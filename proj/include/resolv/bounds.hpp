#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/parallel.hpp"
#include "resolv/errors.hpp"
#include "resolv/spectrum.hpp"

namespace resolv {

enum class BoundKind { kAchievability, kConverse };

/// One evaluated bound: threshold c (nats per symbol), code size M,
/// blocklength n, the reported value, and the raw value kept for audit
/// (the converse is reported as max(raw, 0), the achievability as
/// min(raw, 1)).
struct BoundPoint {
    double c = 0.0;
    std::uint64_t M = 0;
    int n = 0;
    double value = 0.0;
    double raw = 0.0;
};

/// Bound values swept over code sizes; the M axis must be strictly
/// increasing.
struct SweepCurve {
    std::string bound;
    std::string model;
    std::vector<BoundPoint> points;

    void append(BoundPoint p) {
        if (!points.empty() && p.M <= points.back().M) {
            throw DomainError("sweep curve: M axis must strictly increase");
        }
        points.push_back(p);
    }
};

/// Upper bound on the distance achieved by the best size-M code drawn for
/// the input behind the given per-symbol density spectrum:
/// Pr{Z > c} + (1/2) sqrt(e^{n c} / M), clamped to at most 1.
inline double achievability_bound(const Spectrum& s, std::uint64_t M, double c,
                                  int n) {
    if (!(c >= 0.0)) throw DomainError("achievability_bound: c must be >= 0");
    if (M < 1) throw DomainError("achievability_bound: M must be >= 1");
    if (s.scale() != SpectrumScale::kPerSymbol) {
        throw DomainError(
            "achievability_bound: spectrum must be per-symbol scale");
    }
    if (n < 1 || s.n() != n) {
        throw DomainError("achievability_bound: blocklength mismatch");
    }
    const double tail = tail_probability(s, c, /*strict=*/true);
    const double penalty =
        0.5 * std::sqrt(std::exp(static_cast<double>(n) * c) /
                        static_cast<double>(M));
    return std::min(1.0, tail + penalty);
}

struct ConverseBound {
    double raw = 0.0;    // may be negative (vacuous)
    double value = 0.0;  // max(raw, 0)
};

/// Lower bound on the distance between the reference distribution behind
/// s_code and the code's output: Pr{Z >= c} - M e^{-n c}. Requires
/// M <= e^{n c}.
inline ConverseBound converse_bound(const Spectrum& s_code, std::uint64_t M,
                                    double c, int n) {
    if (M < 1) throw DomainError("converse_bound: M must be >= 1");
    if (s_code.scale() != SpectrumScale::kPerSymbol) {
        throw DomainError("converse_bound: spectrum must be per-symbol scale");
    }
    if (n < 1 || s_code.n() != n) {
        throw DomainError("converse_bound: blocklength mismatch");
    }
    if (std::log(static_cast<double>(M)) > static_cast<double>(n) * c + 1e-12) {
        throw DomainError("converse_bound: requires M <= e^{n c}");
    }
    const double tail = tail_probability(s_code, c, /*strict=*/false);
    const double raw = tail - static_cast<double>(M) *
                                  std::exp(-static_cast<double>(n) * c);
    return {raw, std::max(raw, 0.0)};
}

/// Default threshold grid: every finite atom value nudged by {-1e-12, 0,
/// +1e-12} plus 50 uniform points spanning [min - 1, max + 1]. Both bounds
/// are piecewise monotone between atoms, so optima sit at atom boundaries.
inline std::vector<double> default_c_grid(const Spectrum& s) {
    double lo = -1.0, hi = 1.0;
    std::vector<double> grid;
    bool any_finite = false;
    for (const auto& a : s.atoms()) {
        if (a.value == std::numeric_limits<double>::infinity()) continue;
        if (!any_finite) {
            lo = hi = a.value;
            any_finite = true;
        }
        lo = std::min(lo, a.value);
        hi = std::max(hi, a.value);
    }
    lo -= 1.0;
    hi += 1.0;
    for (int i = 0; i < 50; ++i) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 49.0);
    }
    return grid;
}

struct OptimizedBound {
    double c_star = 0.0;
    double value = 0.0;
    double raw = 0.0;
};

/// Best bound over the grid (minimum for achievability, maximum for the
/// converse). Finite atom values (nudged both ways) are always injected as
/// candidates; infeasible candidates are filtered; ties break toward
/// smaller c.
inline OptimizedBound optimize_bound_over_c(const Spectrum& s,
                                            std::uint64_t M, int n,
                                            BoundKind which,
                                            std::vector<double> c_grid,
                                            int threads = 1) {
    for (const auto& a : s.atoms()) {
        if (a.value == std::numeric_limits<double>::infinity()) continue;
        c_grid.push_back(a.value - 1e-12);
        c_grid.push_back(a.value);
        c_grid.push_back(a.value + 1e-12);
    }
    const double c_min_converse =
        std::log(static_cast<double>(M)) / static_cast<double>(n);
    if (which == BoundKind::kConverse) {
        // the feasibility boundary is itself a candidate (and often the
        // optimum), so the effective grid can never be empty
        c_grid.push_back(c_min_converse);
        c_grid.push_back(c_min_converse + 1e-12);
    }
    std::vector<double> candidates;
    candidates.reserve(c_grid.size());
    for (double c : c_grid) {
        if (which == BoundKind::kAchievability) {
            if (c >= 0.0) candidates.push_back(c);
        } else {
            if (static_cast<double>(n) * c + 1e-12 >=
                std::log(static_cast<double>(M))) {
                candidates.push_back(std::max(c, c_min_converse));
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    if (candidates.empty()) {
        throw DomainError("optimize_bound_over_c: empty effective c grid");
    }

    std::vector<std::pair<double, double>> results(candidates.size());
    detail::parallel_for(candidates.size(), threads, [&](std::size_t i) {
        if (which == BoundKind::kAchievability) {
            const double tail =
                tail_probability(s, candidates[i], /*strict=*/true);
            const double raw =
                tail + 0.5 * std::sqrt(
                                 std::exp(static_cast<double>(n) *
                                          candidates[i]) /
                                 static_cast<double>(M));
            results[i] = {std::min(raw, 1.0), raw};
        } else {
            const ConverseBound b = converse_bound(s, M, candidates[i], n);
            results[i] = {b.value, b.raw};
        }
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        const bool better = which == BoundKind::kAchievability
                                ? results[i].first < results[best].first
                                : results[i].first > results[best].first;
        if (better) best = i;  // ascending scan keeps the smallest c on ties
    }
    return {candidates[best], results[best].first, results[best].second};
}

/// Achievability bound optimized over c for each code size.
inline SweepCurve bound_sweep(const Spectrum& s,
                              const std::vector<std::uint64_t>& m_values,
                              int n, const std::vector<double>& c_grid,
                              int threads = 1,
                              std::string model_label = std::string()) {
    SweepCurve curve;
    curve.bound = "achievability";
    curve.model = std::move(model_label);
    for (std::uint64_t m : m_values) {
        const OptimizedBound b = optimize_bound_over_c(
            s, m, n, BoundKind::kAchievability, c_grid, threads);
        curve.append({b.c_star, m, n, b.value, b.raw});
    }
    return curve;
}

}  // namespace resolv
