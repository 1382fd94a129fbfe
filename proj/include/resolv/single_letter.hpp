#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/linalg.hpp"
#include "resolv/detail/parallel.hpp"
#include "resolv/detail/sum.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/product.hpp"

namespace resolv {

/// I(Q; W) = sum_{a,b} Q(a) W(b|a) log(W(b|a) / (QW)(b)) in nats, with the
/// 0 log 0 convention.
inline double mutual_information(const FiniteDistribution& q,
                                 const Channel& w) {
    const auto perm = detail::label_permutation(q.labels(), w.in_labels());
    if (!perm) {
        throw DomainError(
            "mutual_information: input alphabet does not match channel");
    }
    std::vector<detail::NeumaierSum> out_bins(w.out_size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double qa = q.prob(i);
        if (qa == 0.0) continue;
        const std::size_t r = (*perm)[i];
        for (std::size_t j = 0; j < w.out_size(); ++j) {
            out_bins[j].add(qa * w.prob(r, j));
        }
    }
    std::vector<double> log_qw(w.out_size());
    for (std::size_t j = 0; j < w.out_size(); ++j) {
        log_qw[j] = std::log(out_bins[j].value());
    }
    detail::NeumaierSum acc;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double qa = q.prob(i);
        if (qa == 0.0) continue;
        const std::size_t r = (*perm)[i];
        for (std::size_t j = 0; j < w.out_size(); ++j) {
            const double wv = w.prob(r, j);
            if (wv == 0.0) continue;
            acc.add(qa * wv * (std::log(wv) - log_qw[j]));
        }
    }
    return std::max(0.0, acc.value());
}

/// D(W || ref | P) = sum_a P(a) sum_b W(b|a) log(W(b|a)/ref(b)). Returns
/// +infinity when ref has a zero under positive mass; equals
/// mutual_information(P, W) when ref = PW.
inline double conditional_divergence(const Channel& w,
                                     const FiniteDistribution& ref_y,
                                     const FiniteDistribution& p) {
    const auto in_perm = detail::label_permutation(p.labels(), w.in_labels());
    if (!in_perm) {
        throw DomainError(
            "conditional_divergence: input alphabet does not match channel");
    }
    const auto out_perm =
        detail::label_permutation(ref_y.labels(), w.out_labels());
    if (!out_perm) {
        throw DomainError(
            "conditional_divergence: reference alphabet does not match "
            "channel output");
    }
    std::vector<double> log_ref(w.out_size());
    for (std::size_t j = 0; j < ref_y.size(); ++j) {
        log_ref[(*out_perm)[j]] = std::log(ref_y.prob(j));
    }
    detail::NeumaierSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pa = p.prob(i);
        if (pa == 0.0) continue;
        const std::size_t r = (*in_perm)[i];
        for (std::size_t j = 0; j < w.out_size(); ++j) {
            const double wv = w.prob(r, j);
            if (wv == 0.0) continue;
            if (log_ref[j] == -std::numeric_limits<double>::infinity()) {
                return std::numeric_limits<double>::infinity();
            }
            acc.add(pa * wv * (std::log(wv) - log_ref[j]));
        }
    }
    return acc.value();
}

struct PolytopeVertex {
    FiniteDistribution q;
    std::vector<std::size_t> support;  // strictly positive coordinates
    double mutual_info = 0.0;
    double feasibility = 0.0;  // max |QW - P_Y| over outputs
};

struct PolytopeVertexSet {
    std::vector<PolytopeVertex> vertices;
    int constraint_rank = 0;
};

namespace detail {

inline double pushforward_error(const std::vector<double>& q,
                                const Channel& w,
                                const std::vector<double>& target) {
    double worst = 0.0;
    for (std::size_t j = 0; j < w.out_size(); ++j) {
        NeumaierSum acc;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] != 0.0) acc.add(q[i] * w.prob(i, j));
        }
        worst = std::max(worst, std::abs(acc.value() - target[j]));
    }
    return worst;
}

}  // namespace detail

/// All vertices (basic feasible solutions) of {Q >= 0 : QW = P_Y}, found by
/// support enumeration: every support no larger than the rank of the
/// constraint system is solved in least squares and kept when it
/// reproduces P_Y within tol. Near-duplicate vertices are collapsed by
/// rounding coordinates to 1e-9.
inline PolytopeVertexSet feasible_polytope_vertices(
    const Channel& w, const FiniteDistribution& p_y, double tol = 1e-9) {
    const auto out_perm =
        detail::label_permutation(p_y.labels(), w.out_labels());
    if (!out_perm) {
        throw DomainError(
            "feasible_polytope_vertices: target alphabet does not match "
            "channel output");
    }
    const std::size_t nx = w.in_size();
    const std::size_t ny = w.out_size();
    std::vector<double> target(ny, 0.0);
    for (std::size_t j = 0; j < p_y.size(); ++j) {
        target[(*out_perm)[j]] = p_y.prob(j);
    }

    // Constraint system C q = target with C = W^T.
    detail::Matrix c(ny, nx);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) c.at(j, i) = w.prob(i, j);
    }
    const int rank = detail::matrix_rank(c, 1e-10);

    PolytopeVertexSet result;
    result.constraint_rank = rank;
    std::vector<std::vector<long long>> seen;  // rounded coordinate keys

    std::vector<std::size_t> support;
    auto try_support = [&]() {
        detail::Matrix cs(ny, support.size());
        for (std::size_t k = 0; k < support.size(); ++k) {
            for (std::size_t j = 0; j < ny; ++j) {
                cs.at(j, k) = c.at(j, support[k]);
            }
        }
        const auto sol = detail::solve_least_squares(cs, target, 1e-10);
        if (!sol) return;
        std::vector<double> q(nx, 0.0);
        for (std::size_t k = 0; k < support.size(); ++k) {
            double v = (*sol)[k];
            if (v < 0.0) {
                if (v < -1e-12) return;  // infeasible support
                v = 0.0;
            }
            q[support[k]] = v;
        }
        if (detail::pushforward_error(q, w, target) > tol) return;

        std::vector<long long> key(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            key[i] = std::llround(q[i] * 1e9);
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
        seen.push_back(key);

        std::vector<std::size_t> positive;
        for (std::size_t i = 0; i < nx; ++i) {
            if (q[i] > 0.0) positive.push_back(i);
        }
        // pushforward_error <= tol only pins the mass sum to within
        // |Y| * tol, so relax the constructor check accordingly.
        FiniteDistribution dist(w.in_labels(), q,
                                static_cast<double>(ny) * tol + 1e-12);
        const double mi = mutual_information(dist, w);
        result.vertices.push_back({std::move(dist), std::move(positive), mi,
                                   detail::pushforward_error(q, w, target)});
    };

    auto enumerate = [&](auto&& self, std::size_t start,
                         std::size_t remaining) -> void {
        if (remaining == 0) {
            if (!support.empty()) try_support();
            return;
        }
        for (std::size_t i = start; i < nx; ++i) {
            support.push_back(i);
            self(self, i + 1, remaining - 1);
            support.pop_back();
        }
    };
    for (int size = 1; size <= rank; ++size) {
        enumerate(enumerate, 0, static_cast<std::size_t>(size));
    }
    if (result.vertices.empty()) {
        throw InfeasibilityError(
            "feasible_polytope_vertices: no input reproduces the target "
            "output");
    }
    return result;
}

struct MinMutualInformation {
    FiniteDistribution q_star;
    double value = 0.0;
    std::vector<std::size_t> support;
};

/// Minimum of I(Q; W) over {Q >= 0 : QW = P_Y}. I is concave in Q, so the
/// minimum sits at a vertex; exact support enumeration replaces iterative
/// descent. Ties within 1e-12 go to the lexicographically smallest
/// support.
inline MinMutualInformation min_mutual_information(
    const Channel& w, const FiniteDistribution& p_y, double tol = 1e-9) {
    const PolytopeVertexSet set = feasible_polytope_vertices(w, p_y, tol);
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.vertices.size(); ++i) {
        const double a = set.vertices[i].mutual_info;
        const double b = set.vertices[best].mutual_info;
        if (a < b - 1e-12) {
            best = i;
        } else if (std::abs(a - b) <= 1e-12 &&
                   set.vertices[i].support < set.vertices[best].support) {
            best = i;
        }
    }
    return {set.vertices[best].q, set.vertices[best].mutual_info,
            set.vertices[best].support};
}

struct GridOracleResult {
    double value = 0.0;
    FiniteDistribution arg;
    /// Conservative estimate of how far the grid minimum can sit from the
    /// exact one: L (2|X| step + sqrt(|Y|) match_tol / sigma_min+), where L
    /// bounds the sensitivity of I through log(W/y_min) and sigma_min+ is
    /// the smallest positive singular value of the constraint matrix.
    double error_bound = 0.0;
};

/// Brute-force minimum of I over simplex grid points whose pushforward
/// matches P_Y within match_tol. Only a validation oracle: |X| <= 4, and
/// nullopt signals that no grid point was feasible (oracle inconclusive).
inline std::optional<GridOracleResult> grid_oracle_min_mutual_information(
    const Channel& w, const FiniteDistribution& p_y, double step,
    double match_tol, int threads = 1) {
    const std::size_t nx = w.in_size();
    const std::size_t ny = w.out_size();
    if (nx > 4) {
        throw DomainError(
            "grid oracle: input alphabets larger than 4 explode the grid");
    }
    if (!(step > 0.0) || !(step <= 1.0)) {
        throw DomainError("grid oracle: step must lie in (0, 1]");
    }
    const auto out_perm =
        detail::label_permutation(p_y.labels(), w.out_labels());
    if (!out_perm) throw DomainError("grid oracle: alphabet mismatch");
    std::vector<double> target(ny, 0.0);
    for (std::size_t j = 0; j < p_y.size(); ++j) {
        target[(*out_perm)[j]] = p_y.prob(j);
    }

    const long long steps = std::llround(1.0 / step);
    const double unit = 1.0 / static_cast<double>(steps);

    struct Slot {
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> arg;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(steps) + 1);

    detail::parallel_for(slots.size(), threads, [&](std::size_t c0) {
        Slot& slot = slots[c0];
        std::vector<long long> counts(nx, 0);
        counts[0] = static_cast<long long>(c0);
        std::vector<double> q(nx, 0.0);
        std::vector<double> qw(ny, 0.0);

        auto evaluate = [&]() {
            for (std::size_t i = 0; i < nx; ++i) {
                q[i] = static_cast<double>(counts[i]) * unit;
            }
            for (std::size_t j = 0; j < ny; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < nx; ++i) {
                    acc += q[i] * w.prob(i, j);
                }
                qw[j] = acc;
                if (std::abs(acc - target[j]) > match_tol) return;
            }
            double info = 0.0;
            for (std::size_t i = 0; i < nx; ++i) {
                if (q[i] == 0.0) continue;
                for (std::size_t j = 0; j < ny; ++j) {
                    const double wv = w.prob(i, j);
                    if (wv == 0.0) continue;
                    info += q[i] * wv * std::log(wv / qw[j]);
                }
            }
            if (info < slot.best) {
                slot.best = info;
                slot.arg = q;
            }
        };

        auto recurse = [&](auto&& self, std::size_t pos,
                           long long remaining) -> void {
            if (pos + 1 == nx) {
                counts[pos] = remaining;
                evaluate();
                return;
            }
            for (long long c = 0; c <= remaining; ++c) {
                counts[pos] = c;
                self(self, pos + 1, remaining - c);
            }
        };
        const long long remaining = steps - static_cast<long long>(c0);
        if (remaining < 0) return;
        if (nx == 1) {
            if (remaining == 0) evaluate();
            return;
        }
        recurse(recurse, 1, remaining);
    });

    std::size_t best = slots.size();
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].arg.empty()) continue;
        if (best == slots.size() || slots[i].best < slots[best].best) {
            best = i;
        }
    }
    if (best == slots.size()) return std::nullopt;

    double y_min = 1.0;
    double log_ratio = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        double col_min = 1.0;
        for (std::size_t i = 0; i < nx; ++i) {
            col_min = std::min(col_min, w.prob(i, j));
        }
        y_min = std::min(y_min, col_min);
    }
    if (y_min > 0.0) {
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                const double wv = w.prob(i, j);
                if (wv > 0.0) {
                    log_ratio =
                        std::max(log_ratio, std::abs(std::log(wv / y_min)));
                }
            }
        }
        log_ratio = std::max(log_ratio, std::abs(std::log(y_min)));
    } else {
        log_ratio = std::numeric_limits<double>::infinity();
    }
    detail::Matrix c(ny, nx);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) c.at(j, i) = w.prob(i, j);
    }
    const auto sv = detail::singular_values(c);
    double sigma_min = 0.0;
    for (double s : sv) {
        if (s > 1e-10 * sv.front()) sigma_min = s;
    }
    const double kappa = sigma_min > 0.0
                             ? 1.0 / sigma_min
                             : std::numeric_limits<double>::infinity();
    const double bound =
        log_ratio * (2.0 * static_cast<double>(nx) * unit +
                     std::sqrt(static_cast<double>(ny)) * match_tol * kappa);

    return GridOracleResult{
        slots[best].best,
        FiniteDistribution(w.in_labels(), slots[best].arg, 1e-9), bound};
}

struct AlternatingResolvability {
    double component_value[2] = {0.0, 0.0};
    double s = 0.0;       // max of the two component minima
    double s_star = 0.0;  // min of the two component minima
};

/// Per-component minimum mutual information over inputs matching the
/// component's own output, combined as max (pessimistic) and min
/// (optimistic) over the two parity classes.
inline AlternatingResolvability alternating_resolvability(
    const ProductComponent& first, const ProductComponent& second,
    double tol = 1e-9) {
    AlternatingResolvability res;
    const ProductComponent* comps[2] = {&first, &second};
    for (int j = 0; j < 2; ++j) {
        const FiniteDistribution out =
            output_distribution(comps[j]->source, comps[j]->channel);
        res.component_value[j] =
            min_mutual_information(comps[j]->channel, out, tol).value;
    }
    res.s = std::max(res.component_value[0], res.component_value[1]);
    res.s_star = std::min(res.component_value[0], res.component_value[1]);
    return res;
}

}  // namespace resolv
