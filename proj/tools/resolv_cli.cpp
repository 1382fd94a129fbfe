// Batch front end: loads a JSON model, runs one experiment subcommand, and
// emits CSV (stdout or --out). Identical invocations with identical inputs,
// seeds, and --threads values produce byte-identical CSV.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resolv/resolv.hpp"

namespace {

using namespace resolv;

struct CommonOpts {
    std::string model_path;
    std::string out_path;
    std::string units = "nats";
    int threads = 1;
    std::uint64_t budget = kDefaultEnumerationBudget;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--model", opts.model_path, "model JSON file")
        ->required();
    cmd->add_option("--out", opts.out_path,
                    "write CSV here instead of stdout");
    cmd->add_option("--units", opts.units,
                    "unit for logarithmic columns (default nats)")
        ->check(CLI::IsMember({"nats", "bits"}));
    cmd->add_option("--threads", opts.threads, "worker parallelism cap")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--budget", opts.budget,
                    "exact-enumeration budget (outcomes/entries)");
}

double unit_scale(const CommonOpts& opts) {
    return opts.units == "bits" ? 1.0 / std::log(2.0) : 1.0;
}

std::string fmt(double v) { return CsvWriter::format_double(v); }

void emit(const CommonOpts& opts, const CsvWriter& csv) {
    if (opts.out_path.empty()) {
        std::fwrite(csv.str().data(), 1, csv.str().size(), stdout);
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write output file '" + opts.out_path +
                              "'");
    }
    out << csv.str();
}

/// Model materialized at one blocklength.
struct Block {
    int n = 1;
    FiniteDistribution input;
    Channel channel;
    FiniteDistribution output;
    FiniteDistribution target;
};

std::size_t parity_component(const ModelFile& model, int n) {
    return model.mode == ModelMode::kAlternating && n % 2 == 0 ? 1 : 0;
}

int resolve_blocklength(const ModelFile& model, int n_flag) {
    if (model.mode == ModelMode::kExplicitN) {
        if (n_flag != 0 && n_flag != *model.explicit_n) {
            throw ValidationError(
                "--n disagrees with the explicit-n model (n = " +
                std::to_string(*model.explicit_n) + ")");
        }
        return *model.explicit_n;
    }
    return n_flag == 0 ? 1 : n_flag;
}

Block make_block(const ModelFile& model, int n, std::uint64_t budget) {
    if (model.mode == ModelMode::kExplicitN) {
        Block b{*model.explicit_n, model.sources[0], model.channels[0],
                output_distribution(model.sources[0], model.channels[0]),
                model.sources[0]};
        b.target = model.target ? *model.target : b.output;
        return b;
    }
    const std::size_t which = parity_component(model, n);
    FiniteDistribution input =
        product_distribution(model.sources[which], n, budget);
    Channel channel = product_channel(model.channels[which], n, budget);
    FiniteDistribution output = output_distribution(input, channel);
    FiniteDistribution target =
        model.target ? product_distribution(*model.target, n, budget)
                     : output;
    return Block{n, std::move(input), std::move(channel), std::move(output),
                 std::move(target)};
}

/// Per-symbol block density spectrum without materializing the product:
/// per-letter density convolved n times (parity component for even n).
Spectrum block_density_spectrum(const ModelFile& model, int n,
                                bool against_target, std::uint64_t budget) {
    if (model.mode == ModelMode::kExplicitN) {
        const Block b = make_block(model, n, budget);
        return info_density_spectrum(b.input, b.channel,
                                     against_target ? b.target : b.output, n,
                                     true);
    }
    const std::size_t which = parity_component(model, n);
    const auto& src = model.sources[which];
    const auto& ch = model.channels[which];
    const FiniteDistribution out = output_distribution(src, ch);
    const FiniteDistribution& ref =
        against_target && model.target ? *model.target : out;
    const Spectrum letter = info_density_spectrum(src, ch, ref, 1, false);
    return spectrum_memoryless_exact({letter}, n, ProductMode::kIid, true);
}

// ---- subcommands ----

void run_spectrum(const CommonOpts& opts, const ModelFile& model,
                  int n_flag) {
    const int n = resolve_blocklength(model, n_flag);
    const Spectrum s = block_density_spectrum(
        model, n, /*against_target=*/false, opts.budget);
    const double scale = unit_scale(opts);
    CsvWriter csv;
    csv.row({"value_" + opts.units, "probability"});
    for (const auto& a : s.atoms()) {
        csv.row({fmt(a.value * scale), fmt(a.prob)});
    }
    emit(opts, csv);
}

void run_distance(const CommonOpts& opts, const ModelFile& model, int n_flag,
                  const std::string& code_path, std::uint64_t m,
                  std::uint64_t seed) {
    const int n = resolve_blocklength(model, n_flag);
    const Block block = make_block(model, n, opts.budget);
    ResolvabilityCode code;
    if (!code_path.empty()) {
        code = read_code_file(code_path);
        if (code.n != n) {
            throw ValidationError("code blocklength " +
                                  std::to_string(code.n) +
                                  " does not match n = " + std::to_string(n));
        }
    } else {
        if (m == 0) {
            throw ValidationError("distance needs --code or --M");
        }
        code = random_code(block.input, m, seed, n);
    }
    const double d = code_distance(code, block.channel, block.target);
    CsvWriter csv;
    csv.row({"n", "M", "seed", "distance"});
    csv.row({std::to_string(n), std::to_string(code.size()),
             code.seed ? std::to_string(*code.seed) : "", fmt(d)});
    emit(opts, csv);
}

void run_bounds(const CommonOpts& opts, const ModelFile& model, int n_flag,
                const std::vector<std::uint64_t>& ms, std::uint64_t seed,
                std::uint64_t trials, const std::string& which) {
    const int n = resolve_blocklength(model, n_flag);
    if (ms.empty()) throw ValidationError("bounds needs --M");
    const double scale = unit_scale(opts);
    CsvWriter csv;
    csv.row({"bound", "n", "M", "c_star_" + opts.units, "value", "raw",
             "seed", "trials", "best_trial"});

    if (which == "achievability" || which == "both") {
        const Spectrum s = block_density_spectrum(
            model, n, /*against_target=*/false, opts.budget);
        for (std::uint64_t m : ms) {
            const auto best =
                optimize_bound_over_c(s, m, n, BoundKind::kAchievability,
                                      default_c_grid(s), opts.threads);
            csv.row({"achievability", std::to_string(n), std::to_string(m),
                     fmt(best.c_star * scale), fmt(best.value),
                     fmt(best.raw), "", "", ""});
        }
    }
    if (which == "converse" || which == "both") {
        const Block block = make_block(model, n, opts.budget);
        for (std::uint64_t m : ms) {
            const auto found = best_random_code(
                block.input, block.channel, block.target, m, trials, seed, n);
            const Spectrum s = code_info_spectrum(found.code, block.channel,
                                                  block.target, n);
            // the grid is filtered by M <= e^{n c}; rows violating the
            // side condition never appear
            const auto best = optimize_bound_over_c(
                s, m, n, BoundKind::kConverse, default_c_grid(s),
                opts.threads);
            csv.row({"converse", std::to_string(n), std::to_string(m),
                     fmt(best.c_star * scale), fmt(best.value),
                     fmt(best.raw), std::to_string(seed),
                     std::to_string(trials),
                     std::to_string(found.best_trial)});
        }
    }
    emit(opts, csv);
}

std::string join_codewords(const ResolvabilityCode& code) {
    std::string s;
    for (std::size_t i = 0; i < code.codewords.size(); ++i) {
        if (i > 0) s += ' ';
        s += code.codewords[i];
    }
    return s;
}

void run_code_search(const CommonOpts& opts, const ModelFile& model,
                     int n_flag, std::uint64_t m,
                     const std::string& save_code) {
    const int n = resolve_blocklength(model, n_flag);
    if (m == 0) throw ValidationError("code-search needs --M");
    const Block block = make_block(model, n, opts.budget);
    const auto best = exhaustive_optimal_code(block.channel, block.target, m,
                                              n, opts.budget, opts.threads);
    if (!save_code.empty()) write_code_file(best.code, save_code);
    CsvWriter csv;
    csv.row({"n", "M", "distance", "codewords"});
    csv.row({std::to_string(n), std::to_string(m), fmt(best.distance),
             join_codewords(best.code)});
    emit(opts, csv);
}

void run_code_random(const CommonOpts& opts, const ModelFile& model,
                     int n_flag, std::uint64_t m, std::uint64_t seed,
                     std::uint64_t trials, const std::string& save_code) {
    const int n = resolve_blocklength(model, n_flag);
    if (m == 0) throw ValidationError("code-random needs --M");
    const Block block = make_block(model, n, opts.budget);
    const auto found = best_random_code(block.input, block.channel,
                                        block.target, m, trials, seed, n);
    if (!save_code.empty()) write_code_file(found.code, save_code);
    CsvWriter csv;
    csv.row({"n", "M", "seed", "trials", "best_trial", "distance",
             "codewords"});
    csv.row({std::to_string(n), std::to_string(m), std::to_string(seed),
             std::to_string(trials), std::to_string(found.best_trial),
             fmt(found.distance), join_codewords(found.code)});
    emit(opts, csv);
}

void run_optimize(const CommonOpts& opts, const ModelFile& model) {
    if (model.mode == ModelMode::kAlternating) {
        throw ValidationError(
            "optimize works on one (source, channel) pair; use `alt` for "
            "alternating models");
    }
    const auto& src = model.sources[0];
    const auto& ch = model.channels[0];
    const FiniteDistribution target =
        model.target ? *model.target : output_distribution(src, ch);
    const auto set = feasible_polytope_vertices(ch, target);
    const auto best = min_mutual_information(ch, target);
    const double scale = unit_scale(opts);

    CsvWriter csv;
    std::vector<std::string> head = {"vertex", "optimal", "I_" + opts.units,
                                     "feasibility"};
    for (const auto& l : ch.in_labels()) head.push_back("q_" + l);
    csv.row(head);
    for (std::size_t v = 0; v < set.vertices.size(); ++v) {
        const auto& vert = set.vertices[v];
        const bool is_best = vert.q.pmf() == best.q_star.pmf();
        std::vector<std::string> row = {std::to_string(v),
                                        is_best ? "1" : "0",
                                        fmt(vert.mutual_info * scale),
                                        fmt(vert.feasibility)};
        for (std::size_t i = 0; i < vert.q.size(); ++i) {
            row.push_back(fmt(vert.q.prob(i)));
        }
        csv.row(row);
    }
    emit(opts, csv);
}

void run_alt(const CommonOpts& opts, const ModelFile& model) {
    if (model.mode != ModelMode::kAlternating) {
        throw ValidationError("alt needs an alternating model");
    }
    const auto comps = model.components();
    const auto r = alternating_resolvability(comps[0], comps[1]);
    const double scale = unit_scale(opts);
    CsvWriter csv;
    csv.row({"quantity", "value_" + opts.units});
    csv.row({"component1_min_I", fmt(r.component_value[0] * scale)});
    csv.row({"component2_min_I", fmt(r.component_value[1] * scale)});
    csv.row({"S", fmt(r.s * scale)});
    csv.row({"S_star", fmt(r.s_star * scale)});
    emit(opts, csv);
}

void run_second_order(const CommonOpts& opts, const ModelFile& model,
                      const std::vector<int>& n_list, double delta,
                      std::optional<double> rate) {
    if (model.mode == ModelMode::kExplicitN) {
        throw ValidationError(
            "second-order sweeps blocklengths; explicit-n models fix one");
    }
    if (n_list.empty()) throw ValidationError("second-order needs --n");
    ConvergenceSweepOptions sweep;
    sweep.rate = rate;
    sweep.threads = opts.threads;
    sweep.distance_budget = opts.budget;
    const auto records = convergence_sweep(
        model.components(),
        model.mode == ModelMode::kAlternating ? ProductMode::kAlternating
                                              : ProductMode::kIid,
        n_list, delta, sweep);
    const double scale = unit_scale(opts);
    CsvWriter csv;
    csv.row({"n", "first_order_" + opts.units, "second_order_" + opts.units,
             "d_comp1", "d_comp2"});
    for (const auto& r : records) {
        csv.row({std::to_string(r.n), fmt(r.first_order * scale),
                 r.second_order ? fmt(*r.second_order * scale) : "",
                 r.distance_component1 ? fmt(*r.distance_component1) : "",
                 r.distance_component2 ? fmt(*r.distance_component2) : ""});
    }
    emit(opts, csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "resolv: finite-alphabet channel-resolvability toolkit.\n"
        "Every subcommand reads a JSON model (--model) and writes CSV whose\n"
        "header names the unit of each logarithmic column (nats unless\n"
        "--units bits). Reruns with identical inputs, seeds, and --threads\n"
        "are byte-identical."};
    app.require_subcommand(1);

    CommonOpts opts;
    int n_flag = 0;
    std::vector<int> n_list;
    std::vector<std::uint64_t> m_list;
    std::uint64_t m = 0, seed = 0, trials = 1;
    double delta = 0.1;
    double rate = 0.0;
    bool rate_set = false;
    std::string code_path, save_code, which = "both";

    std::function<void(const ModelFile&)> action;

    auto* c_spectrum = app.add_subcommand(
        "spectrum",
        "emit the information-density spectrum at blocklength --n; "
        "columns: value_<units>,probability");
    add_common(c_spectrum, opts);
    c_spectrum->add_option("--n", n_flag, "blocklength (default 1)");
    c_spectrum->callback([&] {
        action = [&](const ModelFile& mf) { run_spectrum(opts, mf, n_flag); };
    });

    auto* c_distance = app.add_subcommand(
        "distance",
        "variational distance between a code's output and the target; "
        "columns: n,M,seed,distance");
    add_common(c_distance, opts);
    c_distance->add_option("--n", n_flag, "blocklength (default 1)");
    c_distance->add_option("--code", code_path, "serialized code JSON");
    c_distance->add_option("--M", m, "random-code size (with --seed)");
    c_distance->add_option("--seed", seed, "random-code seed");
    c_distance->callback([&] {
        action = [&](const ModelFile& mf) {
            run_distance(opts, mf, n_flag, code_path, m, seed);
        };
    });

    auto* c_bounds = app.add_subcommand(
        "bounds",
        "optimized finite-length bounds swept over --M (comma list); "
        "converse rows evaluate a seeded random code; columns: "
        "bound,n,M,c_star_<units>,value,raw,seed,trials,best_trial");
    add_common(c_bounds, opts);
    c_bounds->add_option("--n", n_flag, "blocklength (default 1)");
    c_bounds->add_option("--M", m_list, "codebook sizes")
        ->delimiter(',')
        ->required();
    c_bounds->add_option("--seed", seed, "converse code seed");
    c_bounds->add_option("--trials", trials, "converse code trials");
    c_bounds->add_option("--which", which, "achievability|converse|both")
        ->check(CLI::IsMember({"achievability", "converse", "both"}));
    c_bounds->callback([&] {
        action = [&](const ModelFile& mf) {
            run_bounds(opts, mf, n_flag, m_list, seed, trials, which);
        };
    });

    auto* c_search = app.add_subcommand(
        "code-search",
        "exhaustive minimum-distance codebook; columns: "
        "n,M,distance,codewords");
    add_common(c_search, opts);
    c_search->add_option("--n", n_flag, "blocklength (default 1)");
    c_search->add_option("--M", m, "codebook size")->required();
    c_search->add_option("--save-code", save_code,
                         "write the code JSON here");
    c_search->callback([&] {
        action = [&](const ModelFile& mf) {
            run_code_search(opts, mf, n_flag, m, save_code);
        };
    });

    auto* c_random = app.add_subcommand(
        "code-random",
        "seeded random codebook (best of --trials); columns: "
        "n,M,seed,trials,best_trial,distance,codewords");
    add_common(c_random, opts);
    c_random->add_option("--n", n_flag, "blocklength (default 1)");
    c_random->add_option("--M", m, "codebook size")->required();
    c_random->add_option("--seed", seed, "generator seed");
    c_random->add_option("--trials", trials, "draws to try");
    c_random->add_option("--save-code", save_code,
                         "write the code JSON here");
    c_random->callback([&] {
        action = [&](const ModelFile& mf) {
            run_code_random(opts, mf, n_flag, m, seed, trials, save_code);
        };
    });

    auto* c_optimize = app.add_subcommand(
        "optimize",
        "minimum mutual information over inputs matching the target "
        "output, with every polytope vertex listed; columns: "
        "vertex,optimal,I_<units>,feasibility,q_<label>...");
    add_common(c_optimize, opts);
    c_optimize->callback([&] {
        action = [&](const ModelFile& mf) { run_optimize(opts, mf); };
    });

    auto* c_alt = app.add_subcommand(
        "alt",
        "alternating-pair summary (per-component minima, S, S*); columns: "
        "quantity,value_<units>");
    add_common(c_alt, opts);
    c_alt->callback([&] {
        action = [&](const ModelFile& mf) { run_alt(opts, mf); };
    });

    auto* c_second = app.add_subcommand(
        "second-order",
        "first/second-order quantile sweep over --n (comma list) at level "
        "--delta, optional --rate; columns: n,first_order_<units>,"
        "second_order_<units>,d_comp1,d_comp2");
    add_common(c_second, opts);
    c_second->add_option("--n", n_list, "blocklengths")
        ->delimiter(',')
        ->required();
    c_second->add_option("--delta", delta, "quantile level (default 0.1)");
    c_second
        ->add_option("--rate", rate,
                     "first-order rate R for the second-order column")
        ->each([&](const std::string&) { rate_set = true; });
    c_second->callback([&] {
        action = [&](const ModelFile& mf) {
            run_second_order(opts, mf, n_list, delta,
                             rate_set ? std::optional<double>(rate)
                                      : std::nullopt);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ModelFile model = parse_model_file(opts.model_path);
        action(model);
        return 0;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibilityError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateTruncationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
