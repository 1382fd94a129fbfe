#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "resolv/detail/sum.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/product.hpp"

namespace resolv {

/// Absolute tolerance for merging equal density values. Log computations
/// carry representation noise well below any per-letter value gap at desk
/// scale.
inline constexpr double kDedupTol = 1e-9;
inline constexpr std::size_t kDefaultAtomCap = 10'000'000;

struct SpectrumAtom {
    double value;
    double prob;
};

/// What the atom values measure.
enum class SpectrumScale {
    kBlock,        // raw log-density of the whole block
    kPerSymbol,    // divided by the blocklength n
    kSecondOrder,  // (block value - n R) / sqrt(n)
};

/// Exact distribution of an information-density random variable: sorted
/// atoms with strictly increasing values after dedup, plus at most one
/// +infinity atom collecting reference-zero collisions.
class Spectrum {
public:
    Spectrum(std::vector<SpectrumAtom> atoms, int n, SpectrumScale scale,
             std::size_t atom_cap = kDefaultAtomCap,
             double dedup_tol = kDedupTol)
        : n_(n), scale_(scale) {
        if (n_ < 0) throw ValidationError("spectrum: negative blocklength");
        double inf_mass = 0.0;
        std::vector<SpectrumAtom> finite;
        finite.reserve(atoms.size());
        for (const auto& a : atoms) {
            if (std::isnan(a.value) ||
                a.value == -std::numeric_limits<double>::infinity()) {
                throw ValidationError(
                    "spectrum: values must be finite or +infinity");
            }
            if (!(a.prob >= 0.0)) {
                throw ValidationError("spectrum: negative atom probability");
            }
            if (a.prob == 0.0) continue;
            if (a.value == std::numeric_limits<double>::infinity()) {
                inf_mass += a.prob;
            } else {
                finite.push_back(a);
            }
        }
        std::sort(finite.begin(), finite.end(),
                  [](const SpectrumAtom& x, const SpectrumAtom& y) {
                      return x.value < y.value;
                  });

        // Merge runs of values within dedup_tol of the run's first value;
        // the merged value is the probability-weighted mean of the run.
        std::size_t i = 0;
        while (i < finite.size()) {
            std::size_t j = i + 1;
            while (j < finite.size() &&
                   finite[j].value - finite[i].value <= dedup_tol) {
                ++j;
            }
            if (j == i + 1) {
                atoms_.push_back(finite[i]);
            } else {
                detail::NeumaierSum mass, moment;
                for (std::size_t k = i; k < j; ++k) {
                    mass.add(finite[k].prob);
                    moment.add(finite[k].prob * finite[k].value);
                }
                atoms_.push_back({moment.value() / mass.value(), mass.value()});
            }
            i = j;
        }
        if (inf_mass > 0.0) {
            atoms_.push_back(
                {std::numeric_limits<double>::infinity(), inf_mass});
        }
        if (atoms_.empty()) {
            throw ValidationError("spectrum: no probability mass");
        }
        if (atoms_.size() > atom_cap) {
            throw ResourceError("spectrum: " + std::to_string(atoms_.size()) +
                                " atoms exceed cap " +
                                std::to_string(atom_cap));
        }
        detail::NeumaierSum total;
        for (const auto& a : atoms_) total.add(a.prob);
        if (std::abs(total.value() - 1.0) > kProductSumTol) {
            throw ValidationError("spectrum: probabilities sum to " +
                                  std::to_string(total.value()));
        }
    }

    const std::vector<SpectrumAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    int n() const { return n_; }
    SpectrumScale scale() const { return scale_; }

    bool has_infinite_atom() const {
        return !atoms_.empty() &&
               atoms_.back().value == std::numeric_limits<double>::infinity();
    }
    double infinite_mass() const {
        return has_infinite_atom() ? atoms_.back().prob : 0.0;
    }

private:
    std::vector<SpectrumAtom> atoms_;
    int n_;
    SpectrumScale scale_;
};

/// Pr{Z > alpha} (strict) or Pr{Z >= alpha} (non-strict).
inline double tail_probability(const Spectrum& s, double alpha, bool strict) {
    detail::NeumaierSum acc;
    for (auto it = s.atoms().rbegin(); it != s.atoms().rend(); ++it) {
        const bool in = strict ? it->value > alpha : it->value >= alpha;
        if (!in) break;
        acc.add(it->prob);
    }
    return std::min(acc.value(), 1.0);
}

/// inf{ alpha : Pr{Z > alpha} <= eps }, evaluated exactly on the step
/// function. eps = 1 admits every alpha, so the infimum is -infinity by
/// convention; an infinity atom heavier than eps forces +infinity.
inline double eps_upper_quantile(const Spectrum& s, double eps) {
    if (!(eps >= 0.0) || !(eps <= 1.0)) {
        throw DomainError("eps_upper_quantile: eps must lie in [0,1]");
    }
    if (eps >= 1.0) return -std::numeric_limits<double>::infinity();
    const auto& atoms = s.atoms();
    // suffix[i] = Pr{Z > value_i} = mass of atoms after i.
    std::vector<double> suffix(atoms.size());
    detail::NeumaierSum acc;
    for (std::size_t i = atoms.size(); i-- > 0;) {
        suffix[i] = acc.value();
        acc.add(atoms[i].prob);
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (suffix[i] <= eps) return atoms[i].value;
    }
    return atoms.back().value;  // unreachable: suffix of last atom is 0
}

/// Exact mean and variance of a finite spectrum.
inline std::pair<double, double> spectrum_mean_var(const Spectrum& s) {
    if (s.has_infinite_atom()) {
        throw DomainError("spectrum_mean_var: spectrum has an infinite atom");
    }
    detail::NeumaierSum mean_acc;
    for (const auto& a : s.atoms()) mean_acc.add(a.prob * a.value);
    const double mean = mean_acc.value();
    detail::NeumaierSum var_acc;
    for (const auto& a : s.atoms()) {
        const double d = a.value - mean;
        var_acc.add(a.prob * d * d);
    }
    return {mean, std::max(0.0, var_acc.value())};
}

/// Exact pmf of log(W(y|x)/ref(y)), optionally divided by n, under the
/// joint P_X x W. Pairs with zero joint mass contribute nothing; ref(y) = 0
/// under positive joint mass maps to the +infinity atom.
inline Spectrum info_density_spectrum(const FiniteDistribution& p_x,
                                      const Channel& w,
                                      const FiniteDistribution& ref, int n,
                                      bool normalize_by_n = true,
                                      std::size_t atom_cap = kDefaultAtomCap) {
    if (n < 1) throw DomainError("info_density_spectrum: n must be >= 1");
    const auto in_perm = detail::label_permutation(p_x.labels(), w.in_labels());
    if (!in_perm) {
        throw DomainError(
            "info_density_spectrum: input alphabet does not match channel");
    }
    const auto out_perm =
        detail::label_permutation(ref.labels(), w.out_labels());
    if (!out_perm) {
        throw DomainError(
            "info_density_spectrum: reference alphabet does not match channel "
            "output");
    }
    std::vector<double> log_ref(w.out_size());
    for (std::size_t j = 0; j < ref.size(); ++j) {
        log_ref[(*out_perm)[j]] = std::log(ref.prob(j));
    }
    const double denom = normalize_by_n ? static_cast<double>(n) : 1.0;

    std::vector<SpectrumAtom> atoms;
    atoms.reserve(p_x.size() * 4);
    for (std::size_t i = 0; i < p_x.size(); ++i) {
        const double px = p_x.prob(i);
        if (px == 0.0) continue;
        const std::size_t r = (*in_perm)[i];
        for (std::size_t j = 0; j < w.out_size(); ++j) {
            const double wv = w.prob(r, j);
            if (wv == 0.0) continue;
            const double joint = px * wv;
            if (joint == 0.0) continue;
            if (log_ref[j] == -std::numeric_limits<double>::infinity()) {
                atoms.push_back(
                    {std::numeric_limits<double>::infinity(), joint});
            } else {
                atoms.push_back({(std::log(wv) - log_ref[j]) / denom, joint});
            }
        }
    }
    return Spectrum(std::move(atoms), n,
                    normalize_by_n ? SpectrumScale::kPerSymbol
                                   : SpectrumScale::kBlock,
                    atom_cap);
}

namespace detail {

struct LatticeView {
    bool ok = false;
    double origin = 0.0;
    double gap = 0.0;
    std::vector<long long> index;  // per finite atom
};

/// Recognizes finite atom values of the form origin + k * gap. Holes are
/// allowed; the gap is the smallest adjacent difference.
inline LatticeView detect_lattice(const std::vector<SpectrumAtom>& atoms) {
    LatticeView view;
    std::size_t count = atoms.size();
    while (count > 0 &&
           atoms[count - 1].value == std::numeric_limits<double>::infinity()) {
        --count;
    }
    if (count == 0) return view;
    view.origin = atoms[0].value;
    if (count == 1) {
        view.ok = true;
        view.gap = 0.0;
        view.index = {0};
        return view;
    }
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < count; ++i) {
        gap = std::min(gap, atoms[i].value - atoms[i - 1].value);
    }
    const double span = atoms[count - 1].value - view.origin;
    const double tol = 1e-12 * std::max(1.0, std::abs(view.origin) + span);
    if (!(gap > 4.0 * tol)) return view;
    view.gap = gap;
    view.index.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double rel = (atoms[i].value - view.origin) / gap;
        const long long k = std::llround(rel);
        if (k < 0 || std::abs(atoms[i].value - (view.origin + k * gap)) > tol) {
            view.ok = false;
            return view;
        }
        view.index[i] = k;
    }
    view.ok = true;
    return view;
}

inline constexpr std::size_t kPairExpansionCap = 10'000'000;

}  // namespace detail

/// Distribution of the sum of two independent spectra (block scale).
/// Arithmetic-lattice operands convolve by index; anything else expands
/// all value pairs, subject to the atom cap.
inline Spectrum convolve(const Spectrum& a, const Spectrum& b,
                         std::size_t atom_cap = kDefaultAtomCap) {
    if (a.scale() != SpectrumScale::kBlock ||
        b.scale() != SpectrumScale::kBlock) {
        throw DomainError("convolve: operands must be block-scale spectra");
    }
    const double inf_a = a.infinite_mass();
    const double inf_b = b.infinite_mass();
    const double inf_mass = inf_a + inf_b - inf_a * inf_b;
    const int n_out = a.n() + b.n();

    std::vector<SpectrumAtom> out;
    const auto& atoms_a = a.atoms();
    const auto& atoms_b = b.atoms();
    const std::size_t fin_a = atoms_a.size() - (inf_a > 0.0 ? 1 : 0);
    const std::size_t fin_b = atoms_b.size() - (inf_b > 0.0 ? 1 : 0);

    if (fin_a > 0 && fin_b > 0) {
        const auto lat_a = detail::detect_lattice(atoms_a);
        const auto lat_b = detail::detect_lattice(atoms_b);
        bool lattice = lat_a.ok && lat_b.ok;
        double gap = 0.0;
        if (lattice) {
            if (lat_a.gap == 0.0) {
                gap = lat_b.gap;
            } else if (lat_b.gap == 0.0) {
                gap = lat_a.gap;
            } else if (std::abs(lat_a.gap - lat_b.gap) <=
                       1e-12 * std::max(1.0, lat_a.gap)) {
                gap = lat_a.gap;
            } else {
                lattice = false;
            }
        }
        if (lattice) {
            const long long max_idx =
                lat_a.index.back() + lat_b.index.back();
            if (static_cast<std::size_t>(max_idx) + 1 >
                detail::kPairExpansionCap) {
                throw ResourceError("convolve: lattice span " +
                                    std::to_string(max_idx + 1) +
                                    " exceeds cap");
            }
            std::vector<double> probs(static_cast<std::size_t>(max_idx) + 1,
                                      0.0);
            for (std::size_t i = 0; i < fin_a; ++i) {
                for (std::size_t j = 0; j < fin_b; ++j) {
                    probs[static_cast<std::size_t>(lat_a.index[i] +
                                                   lat_b.index[j])] +=
                        atoms_a[i].prob * atoms_b[j].prob;
                }
            }
            const double origin = lat_a.origin + lat_b.origin;
            out.reserve(probs.size() + 1);
            for (std::size_t k = 0; k < probs.size(); ++k) {
                if (probs[k] > 0.0) {
                    out.push_back({origin + static_cast<double>(k) * gap,
                                   probs[k]});
                }
            }
        } else {
            if (fin_a > detail::kPairExpansionCap / fin_b) {
                throw ResourceError(
                    "convolve: pair expansion exceeds cap; spectra are not "
                    "on a common lattice");
            }
            out.reserve(fin_a * fin_b + 1);
            for (std::size_t i = 0; i < fin_a; ++i) {
                for (std::size_t j = 0; j < fin_b; ++j) {
                    out.push_back({atoms_a[i].value + atoms_b[j].value,
                                   atoms_a[i].prob * atoms_b[j].prob});
                }
            }
        }
    }
    if (inf_mass > 0.0) {
        out.push_back({std::numeric_limits<double>::infinity(), inf_mass});
    }
    return Spectrum(std::move(out), n_out, SpectrumScale::kBlock, atom_cap);
}

namespace detail {

inline Spectrum convolution_power(const Spectrum& s, int n,
                                  std::size_t atom_cap) {
    Spectrum result({{0.0, 1.0}}, 0, SpectrumScale::kBlock, atom_cap);
    Spectrum base = s;
    int e = n;
    bool first = true;
    while (e > 0) {
        if (e & 1) {
            result = first ? base : convolve(result, base, atom_cap);
            first = false;
        }
        e >>= 1;
        if (e > 0) base = convolve(base, base, atom_cap);
    }
    return result;
}

}  // namespace detail

/// Exact n-letter spectrum of a memoryless block from its per-letter
/// spectrum components (one for iid, two for the parity-alternating model;
/// the component for the whole block is selected by the parity of n).
inline Spectrum spectrum_memoryless_exact(
    const std::vector<Spectrum>& per_letter, int n, ProductMode mode,
    bool normalize_by_n = true, std::size_t atom_cap = kDefaultAtomCap) {
    if (n < 1) throw DomainError("spectrum_memoryless_exact: n must be >= 1");
    const std::size_t want = mode == ProductMode::kAlternating ? 2 : 1;
    if (per_letter.size() != want) {
        throw DomainError("spectrum_memoryless_exact: expected " +
                          std::to_string(want) + " per-letter components");
    }
    for (const auto& s : per_letter) {
        if (s.n() != 1) {
            throw DomainError(
                "spectrum_memoryless_exact: components must be per-letter "
                "(n = 1) spectra");
        }
    }
    const std::size_t which =
        mode == ProductMode::kAlternating && n % 2 == 0 ? 1 : 0;
    Spectrum block =
        detail::convolution_power(per_letter[which], n, atom_cap);

    if (!normalize_by_n) return block;
    std::vector<SpectrumAtom> atoms = block.atoms();
    for (auto& a : atoms) a.value /= static_cast<double>(n);
    return Spectrum(std::move(atoms), n, SpectrumScale::kPerSymbol, atom_cap);
}

}  // namespace resolv
