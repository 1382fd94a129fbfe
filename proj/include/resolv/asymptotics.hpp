#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/normal.hpp"
#include "resolv/detail/parallel.hpp"
#include "resolv/errors.hpp"
#include "resolv/product.hpp"
#include "resolv/spectrum.hpp"

namespace resolv {

/// Affine second-order rescaling of a block spectrum: every atom value v
/// becomes (v - n R) / sqrt(n); probabilities are untouched.
inline Spectrum normalize_second_order(const Spectrum& s, int n, double rate,
                                       std::size_t atom_cap =
                                           kDefaultAtomCap) {
    if (s.scale() != SpectrumScale::kBlock) {
        throw DomainError(
            "normalize_second_order: spectrum must be block scale");
    }
    if (n < 1 || s.n() != n) {
        throw DomainError("normalize_second_order: blocklength mismatch");
    }
    const double shift = static_cast<double>(n) * rate;
    const double root = std::sqrt(static_cast<double>(n));
    std::vector<SpectrumAtom> atoms = s.atoms();
    for (auto& a : atoms) {
        if (a.value != std::numeric_limits<double>::infinity()) {
            a.value = (a.value - shift) / root;
        }
    }
    return Spectrum(std::move(atoms), n, SpectrumScale::kSecondOrder,
                    atom_cap);
}

enum class BallMode { kLimsup, kLiminf };

/// Finite-range membership verdict for a distance sequence. The tail
/// window is the last half of the computed range; limsup mode asks the
/// window maximum to stay within delta + slack, liminf mode the window
/// minimum. A verdict over a computed range is a surrogate, never a limit
/// claim.
struct BallVerdict {
    bool member = false;
    std::size_t window_begin = 0;  // index into the input list
    int extreme_n = 0;
    double extreme_value = 0.0;
    /// Liminf: window points within delta + slack (the witnessing
    /// subsequence). Limsup: the whole window when member, the violating
    /// points otherwise.
    std::vector<std::pair<int, double>> witness;
};

inline BallVerdict ball_membership(
    const std::vector<std::pair<int, double>>& distances, double delta,
    BallMode mode, double slack = 1e-9) {
    if (distances.empty()) {
        throw DomainError("ball_membership: empty distance list");
    }
    BallVerdict v;
    v.window_begin = distances.size() / 2;
    const double limit = delta + slack;

    std::size_t extreme = v.window_begin;
    for (std::size_t i = v.window_begin; i < distances.size(); ++i) {
        const bool more_extreme = mode == BallMode::kLimsup
                                      ? distances[i].second >
                                            distances[extreme].second
                                      : distances[i].second <
                                            distances[extreme].second;
        if (more_extreme) extreme = i;
    }
    v.extreme_n = distances[extreme].first;
    v.extreme_value = distances[extreme].second;
    v.member = v.extreme_value <= limit;

    for (std::size_t i = v.window_begin; i < distances.size(); ++i) {
        const bool include =
            mode == BallMode::kLiminf
                ? distances[i].second <= limit
                : (v.member || distances[i].second > limit);
        if (include) v.witness.push_back(distances[i]);
    }
    return v;
}

/// Gaussian comparison point sqrt(V) * Phi^{-1}(1 - delta). A central-limit
/// oracle for sanity checks, not an exact statement about any finite n.
inline double gaussian_approx_quantile(double variance, double delta) {
    if (!(variance >= 0.0)) {
        throw DomainError("gaussian_approx_quantile: variance must be >= 0");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw DomainError("gaussian_approx_quantile: delta must lie in (0,1)");
    }
    return std::sqrt(variance) * detail::inverse_normal_cdf(1.0 - delta);
}

/// Per-blocklength convergence data: first-order quantile of the
/// per-symbol density spectrum at level delta, the second-order quantile
/// when a rate is given, and (budget permitting) the exact distances
/// between the block output and each component's iid output.
struct ConvergenceRecord {
    int n = 0;
    double first_order = 0.0;
    std::optional<double> second_order;
    std::optional<double> distance_component1;
    std::optional<double> distance_component2;
};

struct ConvergenceSweepOptions {
    std::optional<double> rate;
    std::size_t atom_cap = kDefaultAtomCap;
    std::size_t distance_budget = kDefaultEnumerationBudget;
    bool with_distances = true;
    int threads = 1;
};

inline std::vector<ConvergenceRecord> convergence_sweep(
    const std::vector<ProductComponent>& components, ProductMode mode,
    const std::vector<int>& n_list, double delta,
    const ConvergenceSweepOptions& options = {}) {
    if (n_list.empty()) throw DomainError("convergence_sweep: empty n list");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
            throw DomainError(
                "convergence_sweep: n list must be ascending and positive");
        }
    }
    const std::size_t want = mode == ProductMode::kAlternating ? 2 : 1;
    if (components.size() != want) {
        throw DomainError("convergence_sweep: wrong component count");
    }

    std::vector<Spectrum> per_letter;
    std::vector<FiniteDistribution> outputs;
    for (const auto& comp : components) {
        outputs.push_back(output_distribution(comp.source, comp.channel));
        per_letter.push_back(info_density_spectrum(
            comp.source, comp.channel, outputs.back(), 1,
            /*normalize_by_n=*/false, options.atom_cap));
    }

    std::vector<ConvergenceRecord> records(n_list.size());
    detail::parallel_for(n_list.size(), options.threads, [&](std::size_t k) {
        const int n = n_list[k];
        ConvergenceRecord rec;
        rec.n = n;
        const Spectrum block = spectrum_memoryless_exact(
            per_letter, n, mode, /*normalize_by_n=*/false, options.atom_cap);

        std::vector<SpectrumAtom> scaled = block.atoms();
        for (auto& a : scaled) {
            if (a.value != std::numeric_limits<double>::infinity()) {
                a.value /= static_cast<double>(n);
            }
        }
        rec.first_order = eps_upper_quantile(
            Spectrum(std::move(scaled), n, SpectrumScale::kPerSymbol,
                     options.atom_cap),
            delta);

        if (options.rate) {
            rec.second_order = eps_upper_quantile(
                normalize_second_order(block, n, *options.rate,
                                       options.atom_cap),
                delta);
        }

        if (options.with_distances) {
            const std::size_t active =
                mode == ProductMode::kAlternating && n % 2 == 0 ? 1 : 0;
            try {
                rec.distance_component1 = product_tv_distance(
                    outputs[active], outputs[0], n, options.distance_budget);
                if (components.size() == 2) {
                    rec.distance_component2 =
                        product_tv_distance(outputs[active], outputs[1], n,
                                            options.distance_budget);
                }
            } catch (const ResourceError&) {
                // distances are a diagnostic; skip them past the budget
            }
        }
        records[k] = std::move(rec);
    });
    return records;
}

}  // namespace resolv
