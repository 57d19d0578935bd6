#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ising/bounds.hpp"
#include "ising/exact.hpp"
#include "ising/harness.hpp"

namespace ising {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open output file '" + path + "'");
    return out;
}

// Experiment subcommands share one option set; every override is funneled
// through the config-file grammar so flags and files validate identically.
struct ExperimentArgs {
    std::string config_path;
    std::string family, test, mode, burn_in;
    std::string s_grid, n_grid, s, n;
    std::string p, alpha, trials, seed, fresh_alternate, epsilon, gap_constant;
    std::string csv, svg, decisions;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file of key = value lines");
        cmd->add_option("--family", family, "null model shape: complete-binary, star, path, two-layer-star");
        cmd->add_option("--p", p, "number of nodes");
        cmd->add_option("--alpha", alpha, "uniform coupling weight");
        cmd->add_option("--test", test,
                        "forest-deletion, tree-change, tolerant-forest, tolerant-tree, "
                        "ferro-deletion or sl-gof");
        cmd->add_option("--s-grid", s_grid, "comma-separated change sizes");
        cmd->add_option("--n-grid", n_grid, "comma-separated sample sizes");
        cmd->add_option("--s", s, "single change size");
        cmd->add_option("--n", n, "single sample size");
        cmd->add_option("--trials", trials, "Monte-Carlo trials per cell");
        cmd->add_option("--seed", seed, "experiment seed");
        cmd->add_option("--burn-in", burn_in, "Glauber burn-in steps, or 'auto'");
        cmd->add_option("--mode", mode, "sampler: glauber, exact-oracle, shared-chain");
        cmd->add_option("--fresh-alternate", fresh_alternate,
                        "true/false: redraw the deleted edges each trial");
        cmd->add_option("--epsilon", epsilon, "tolerance for the tolerant tests");
        cmd->add_option("--gap-constant", gap_constant, "ferromagnet threshold constant");
        cmd->add_option("--csv", csv, "CSV output path (default: stdout)");
        cmd->add_option("--svg", svg, "SVG heatmap output path");
        cmd->add_option("--decisions", decisions, "per-trial decision log path");
    }

    ExperimentConfig build() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        std::string text;
        auto add = [&text](const char* key, const std::string& value) {
            if (!value.empty()) text += std::string(key) + " = " + value + "\n";
        };
        add("family", family);
        add("p", p);
        add("alpha", alpha);
        add("test", test);
        add("s_grid", s_grid);
        add("n_grid", n_grid);
        add("s", s);
        add("n", n);
        add("trials", trials);
        add("seed", seed);
        add("burn_in", burn_in);
        add("mode", mode);
        add("fresh_alternate", fresh_alternate);
        add("epsilon", epsilon);
        add("gap_constant", gap_constant);
        add("csv", csv);
        add("svg", svg);
        add("decisions", decisions);
        std::istringstream in(text);
        apply_config_text(cfg, in);
        return cfg;
    }
};

void run_heatmap(const ExperimentArgs& args) {
    ExperimentConfig cfg = args.build();
    std::vector<HeatmapCell> cells = risk_heatmap(cfg);
    if (cfg.csv_path.empty()) write_heatmap_csv(cells, std::cout);
}

void run_curve(const ExperimentArgs& args) {
    ExperimentConfig cfg = args.build();
    std::vector<CurvePoint> points = chow_liu_error_curve(cfg);
    if (cfg.csv_path.empty()) write_curve_csv(points, std::cout);
}

void run_risk(const ExperimentArgs& args) {
    ExperimentConfig cfg = args.build();
    if (cfg.s_grid.size() != 1 || cfg.n_grid.size() != 1)
        throw parameter_error("risk evaluates a single cell: give exactly one --s and one --n");
    std::vector<HeatmapCell> cells = risk_heatmap(cfg);
    if (cfg.csv_path.empty()) write_heatmap_csv(cells, std::cout);
}

struct VerifyArgs {
    std::string grid = "default";
    std::string out_path;
    int limit = kEnumerationLimit;
};

void run_verify(const VerifyArgs& args) {
    std::vector<WidgetSpec> grid;
    if (args.grid == "default")
        grid = default_verification_grid();
    else if (args.grid == "quick")
        grid = quick_verification_grid();
    else
        throw parameter_error("unknown grid '" + args.grid + "' (expected default or quick)");
    std::vector<VerificationRow> rows = verify_widget_bounds(grid, args.limit);
    if (args.out_path.empty()) {
        write_verification_csv(rows, std::cout);
    } else {
        std::ofstream out = open_output(args.out_path);
        write_verification_csv(rows, out);
    }
}

struct BoundsArgs {
    std::string theorem;
    BoundQuery q;
    double eps = 0.0;
};

BoundResult evaluate_theorem(const BoundsArgs& args) {
    const std::string& name = args.theorem;
    const BoundQuery& q = args.q;
    if (name == "sl-upper") return sl_upper(q);
    if (name == "gof-lower-small-s") return gof_lower_small_s(q);
    if (name == "eof-lower-small-s") return eof_lower_small_s(q);
    if (name == "gof-lower-large-s") return gof_lower_large_s(q);
    if (name == "eof-lower-large-s") return eof_lower_large_s(q);
    if (name == "gof-lower-very-small-s") return gof_lower_very_small_s(q);
    if (name == "eof-lower-very-small-s") return eof_lower_very_small_s(q);
    if (name == "forest-upper") return forest_bounds(q).upper;
    if (name == "forest-lower") return forest_bounds(q).lower;
    if (name == "forest-eof-lower") return *forest_bounds(q).lower_eof;
    if (name == "tree-upper") return tree_bounds(q).upper;
    if (name == "tree-lower") return tree_bounds(q).lower;
    if (name == "ferro-upper") return ferro_bounds(q).upper;
    if (name == "ferro-lower") return ferro_bounds(q).lower;
    if (name == "ferro-eof-lower") return *ferro_bounds(q).lower_eof;
    if (name == "tolerant-forest-upper") return tolerant_forest_upper(q, args.eps);
    if (name == "tolerant-tree-upper") return tolerant_tree_upper(q, args.eps);
    throw parameter_error(
        "unknown theorem '" + name +
        "'; expected one of: sl-upper, gof-lower-small-s, eof-lower-small-s, "
        "gof-lower-large-s, eof-lower-large-s, gof-lower-very-small-s, "
        "eof-lower-very-small-s, forest-upper, forest-lower, forest-eof-lower, "
        "tree-upper, tree-lower, ferro-upper, ferro-lower, ferro-eof-lower, "
        "tolerant-forest-upper, tolerant-tree-upper");
}

void run_bounds(const BoundsArgs& args) {
    BoundResult r = evaluate_theorem(args);
    std::cout << fmt_double(r.value) << "\n";
    if (!r.valid)
        std::cerr << "warning: " << r.formula << " condition not met (" << r.condition
                  << ")\n";
}

struct SampleArgs {
    std::string model_path;
    std::string family = "complete-binary";
    int p = 0;
    double alpha = 0.1;
    long long n = 0;
    std::uint64_t seed = 0;
    std::string burn_in = "1600";
    std::string mode = "glauber";
    std::string out_path;
};

void run_sample(const SampleArgs& args) {
    if (args.n < 1) throw parameter_error("sample needs --n >= 1");
    IsingModel model;
    if (!args.model_path.empty()) {
        model = read_model_file(args.model_path);
    } else if (args.p >= 1) {
        model = build_uniform_tree(tree_shape_from_name(args.family), args.p, args.alpha);
    } else {
        throw parameter_error("sample needs --model FILE or --p (with --family/--alpha)");
    }
    SamplerConfig sc;
    sc.seed = args.seed;
    sc.mode = sampler_mode_from_name(args.mode);
    if (args.burn_in == "auto") {
        ExperimentConfig probe;
        probe.burn_in = -1;
        probe.seed = args.seed;
        sc.burn_in = resolve_burn_in(probe, model);
    } else {
        try {
            std::size_t idx = 0;
            sc.burn_in = std::stoll(args.burn_in, &idx);
            if (idx != args.burn_in.size() || sc.burn_in < 0) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parameter_error("--burn-in expects a non-negative integer or 'auto'");
        }
    }
    SampleBatch batch = sample(model, args.n, sc);
    if (args.out_path.empty()) {
        write_batch(batch, std::cout);
    } else {
        write_batch_file(batch, args.out_path);
    }
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"structural goodness-of-fit tests for Ising models"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    ExperimentArgs heatmap_args, curve_args, risk_args;
    CLI::App* heatmap =
        app.add_subcommand("heatmap", "Monte-Carlo risk over an (s, n) grid");
    heatmap_args.add_options(heatmap);
    CLI::App* curve =
        app.add_subcommand("chow-liu-curve", "mean tree-recovery edge error per n");
    curve_args.add_options(curve);
    CLI::App* risk = app.add_subcommand("risk", "Monte-Carlo risk of a single (s, n) cell");
    risk_args.add_options(risk);

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand(
        "verify-widgets", "check the closed-form chi^2 values and their bounds");
    verify->add_option("--grid", verify_args.grid, "default or quick");
    verify->add_option("--out", verify_args.out_path, "CSV output path (default: stdout)");
    verify->add_option("--limit", verify_args.limit, "enumeration limit");

    BoundsArgs bounds_args;
    CLI::App* bounds =
        app.add_subcommand("bounds", "evaluate a sample-complexity bound");
    bounds->add_option("--theorem", bounds_args.theorem, "bound name, e.g. forest-upper")
        ->required();
    bounds->add_option("--p", bounds_args.q.p, "number of nodes");
    bounds->add_option("--d", bounds_args.q.d, "maximum degree");
    bounds->add_option("--s", bounds_args.q.s, "change size");
    bounds->add_option("--alpha", bounds_args.q.alpha, "minimum coupling");
    bounds->add_option("--beta", bounds_args.q.beta, "maximum coupling");
    bounds->add_option("--C", bounds_args.q.C, "leading constant override");
    bounds->add_option("--K", bounds_args.q.K, "range constant override");
    bounds->add_option("--zeta", bounds_args.q.zeta, "large-s regime exponent");
    bounds->add_option("--eta", bounds_args.q.eta, "high-temperature level");
    bounds->add_option("--eps", bounds_args.eps, "tolerance (tolerant bounds)");

    SampleArgs sample_args;
    CLI::App* smp = app.add_subcommand("sample", "draw a batch and write it out");
    smp->add_option("--model", sample_args.model_path, "model file");
    smp->add_option("--family", sample_args.family,
                    "tree shape when no model file is given");
    smp->add_option("--p", sample_args.p, "number of nodes");
    smp->add_option("--alpha", sample_args.alpha, "uniform coupling weight");
    smp->add_option("--n", sample_args.n, "number of samples")->required();
    smp->add_option("--seed", sample_args.seed, "sampler seed");
    smp->add_option("--burn-in", sample_args.burn_in, "burn-in steps or 'auto'");
    smp->add_option("--mode", sample_args.mode, "glauber, exact-oracle, shared-chain");
    smp->add_option("--out", sample_args.out_path, "batch output path (default: stdout)");

    heatmap->callback([&] { run_heatmap(heatmap_args); });
    curve->callback([&] { run_curve(curve_args); });
    risk->callback([&] { run_risk(risk_args); });
    verify->callback([&] { run_verify(verify_args); });
    bounds->callback([&] { run_bounds(bounds_args); });
    smp->callback([&] { run_sample(sample_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ising_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace ising
