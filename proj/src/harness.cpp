#include "ising/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ising/exact.hpp"
#include "ising/rng.hpp"

namespace ising {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long long parse_ll(const std::string& text, const std::string& what) {
    try {
        std::size_t idx = 0;
        long long v = std::stoll(text, &idx);
        if (idx != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw parameter_error("expected an integer for " + what + ", got '" + text + "'");
    }
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t idx = 0;
        double v = std::stod(text, &idx);
        if (idx != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw parameter_error("expected a number for " + what + ", got '" + text + "'");
    }
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw parameter_error("expected true/false for " + what + ", got '" + text + "'");
}

std::vector<long long> parse_grid(const std::string& text, const std::string& what) {
    std::string cleaned = text;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::vector<long long> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_ll(tok, what));
    if (out.empty()) throw parameter_error(what + " needs at least one value");
    return out;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open output file '" + path + "'");
    return out;
}

} // namespace

TestKind test_kind_from_name(const std::string& name) {
    if (name == "forest-deletion") return TestKind::ForestDeletion;
    if (name == "tree-change") return TestKind::TreeChange;
    if (name == "tolerant-forest") return TestKind::TolerantForest;
    if (name == "tolerant-tree") return TestKind::TolerantTree;
    if (name == "ferro-deletion") return TestKind::FerroDeletion;
    if (name == "sl-gof") return TestKind::SlGof;
    throw parameter_error("unknown test '" + name +
                          "' (expected forest-deletion, tree-change, tolerant-forest, "
                          "tolerant-tree, ferro-deletion or sl-gof)");
}

const char* test_kind_name(TestKind kind) {
    switch (kind) {
    case TestKind::ForestDeletion: return "forest-deletion";
    case TestKind::TreeChange: return "tree-change";
    case TestKind::TolerantForest: return "tolerant-forest";
    case TestKind::TolerantTree: return "tolerant-tree";
    case TestKind::FerroDeletion: return "ferro-deletion";
    case TestKind::SlGof: return "sl-gof";
    }
    return "unknown";
}

RiskEstimate estimate_risk(const IsingModel& p_model,
                           const AlternateGenerator& make_alternate,
                           const BoundTest& test, long long n, int trials,
                           std::uint64_t seed, const SamplerConfig& sampler,
                           const std::string& test_label, int s_label,
                           std::vector<DecisionRow>* decisions) {
    if (n < 1) throw parameter_error("risk estimation needs n >= 1 samples per trial");
    if (trials < 1) throw parameter_error("risk estimation needs trials >= 1");

    long long fa = 0, md = 0;
    std::vector<DecisionRow> rows(decisions ? std::size_t(2) * trials : 0);
    std::atomic<bool> failed{false};
    std::exception_ptr error;

    const int nt = max_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (trials > 1) \
    reduction(+ : fa, md)
#endif
    for (int trial = 0; trial < trials; ++trial) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            SamplerConfig null_cfg = sampler;
            null_cfg.seed = stream_key(seed, std::uint64_t(trial), 0);
            SampleBatch null_batch = sample(p_model, n, null_cfg);
            TestDecision on_null = test(null_batch);
            if (!on_null.is_null) ++fa;

            IsingModel alt = make_alternate(stream_key(seed, std::uint64_t(trial), 1));
            SamplerConfig alt_cfg = sampler;
            alt_cfg.seed = stream_key(seed, std::uint64_t(trial), 2);
            SampleBatch alt_batch = sample(alt, n, alt_cfg);
            TestDecision on_alt = test(alt_batch);
            if (on_alt.is_null) ++md;

            if (decisions) {
                DecisionRow& r0 = rows[std::size_t(2) * trial];
                r0.test = test_label.empty() ? on_null.test_name : test_label;
                r0.s = s_label;
                r0.n = n;
                r0.seed = null_cfg.seed;
                r0.statistic = on_null.statistic_value;
                r0.threshold = on_null.threshold;
                r0.is_null = on_null.is_null;
                DecisionRow& r1 = rows[std::size_t(2) * trial + 1];
                r1 = r0;
                r1.seed = alt_cfg.seed;
                r1.statistic = on_alt.statistic_value;
                r1.threshold = on_alt.threshold;
                r1.is_null = on_alt.is_null;
            }
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(ising_estimate_risk_error)
#endif
            {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    }
    (void)nt;
    if (failed.load()) std::rethrow_exception(error);

    RiskEstimate est;
    est.false_alarms = fa;
    est.missed_detections = md;
    est.trials = trials;
    double t = double(trials);
    double pfa = fa / t, pmd = md / t;
    est.risk = pfa + pmd;
    est.ci95 = 1.96 * std::sqrt(pfa * (1.0 - pfa) / t + pmd * (1.0 - pmd) / t) + 1.0 / t;
    if (decisions) decisions->insert(decisions->end(), rows.begin(), rows.end());
    return est;
}

long long resolve_burn_in(const ExperimentConfig& config, const IsingModel& model) {
    if (config.burn_in >= 0) return config.burn_in;
    if (model.p == 127) return 1600;
    long long lag = estimate_autocorrelation_time(model, ConfigStatistic{}, config.seed);
    return 4 * lag;
}

namespace {

// The expected value of the edge statistic under the null, computed once per
// experiment: exactly when the model is enumerable, otherwise from one large
// calibration run (size and seed derived from the experiment seed).
double expected_statistic_for(const ExperimentConfig& cfg, const IsingModel& model,
                              long long max_n, long long burn_in) {
    GraphStructure g = network_structure(model);
    if (model.p <= kEnumerationLimit) {
        std::vector<double> m = pair_moments(model);
        double total = 0.0;
        for (const auto& [i, j] : g.edges) total += m[std::size_t(i) * model.p + j];
        return total;
    }
    SamplerConfig calib;
    calib.mode = cfg.mode;
    calib.burn_in = burn_in;
    calib.seed = stream_key(cfg.seed, 0xca11bULL);
    long long m = std::max<long long>(10000, 100 * max_n);
    SampleBatch batch = sample(model, m, calib);
    return statistic_T(batch, g);
}

BoundTest make_bound_test(const ExperimentConfig& cfg, const IsingModel& model,
                          int s, std::optional<double> expected) {
    switch (cfg.test) {
    case TestKind::ForestDeletion:
        return [&model, s](const SampleBatch& b) { return forest_deletion_test(model, b, s); };
    case TestKind::TreeChange:
        return [&model, s](const SampleBatch& b) { return tree_change_test(model, b, s); };
    case TestKind::TolerantForest:
        return [&model, s, eps = cfg.epsilon](const SampleBatch& b) {
            return tolerant_forest_test(model, b, s, eps);
        };
    case TestKind::TolerantTree:
        return [&model, s, eps = cfg.epsilon](const SampleBatch& b) {
            return tolerant_tree_test(model, b, s, eps);
        };
    case TestKind::FerroDeletion:
        return [&model, s, gap = cfg.gap_constant, expected](const SampleBatch& b) {
            return ferro_deletion_test(model, b, s, gap, expected);
        };
    case TestKind::SlGof:
        return [&model, s](const SampleBatch& b) { return sl_based_gof(model, b, s); };
    }
    throw parameter_error("unhandled test kind");
}

std::vector<int> default_s_grid() {
    std::vector<int> g;
    for (int s = 3; s <= 60; s += 3) g.push_back(s);
    return g;
}

std::vector<long long> default_n_grid() {
    std::vector<long long> g;
    for (long long n = 20; n <= 480; n += 20) g.push_back(n);
    return g;
}

} // namespace

std::vector<HeatmapCell> risk_heatmap(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    if (cfg.s_grid.empty()) cfg.s_grid = default_s_grid();
    if (cfg.n_grid.empty()) cfg.n_grid = default_n_grid();
    if (cfg.trials < 1) throw parameter_error("trials must be >= 1");

    IsingModel model =
        build_uniform_tree(tree_shape_from_name(cfg.family), cfg.p, cfg.alpha);
    SamplerConfig sampler;
    sampler.mode = cfg.mode;
    sampler.burn_in = resolve_burn_in(cfg, model);

    long long max_n = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
    std::optional<double> expected;
    if (cfg.test == TestKind::FerroDeletion)
        expected = expected_statistic_for(cfg, model, max_n, sampler.burn_in);

    const bool want_decisions = !cfg.decisions_path.empty();
    std::vector<DecisionRow> decisions;
    std::vector<HeatmapCell> cells;
    cells.reserve(cfg.s_grid.size() * cfg.n_grid.size());

    for (std::size_t ci = 0; ci < cfg.s_grid.size(); ++ci) {
        int s = cfg.s_grid[ci];
        if (s < 1) throw parameter_error("s values must be >= 1");
        BoundTest test = make_bound_test(cfg, model, s, expected);
        AlternateGenerator gen;
        if (cfg.fresh_alternate) {
            gen = [&model, s](std::uint64_t trial_seed) {
                return random_edge_deletion(model, s, trial_seed);
            };
        } else {
            IsingModel fixed = random_edge_deletion(model, s, stream_key(cfg.seed, ci));
            gen = [fixed](std::uint64_t) { return fixed; };
        }
        for (std::size_t cj = 0; cj < cfg.n_grid.size(); ++cj) {
            HeatmapCell cell;
            cell.s = s;
            cell.n = cfg.n_grid[cj];
            cell.estimate = estimate_risk(
                model, gen, test, cell.n, cfg.trials, stream_key(cfg.seed, ci, cj),
                sampler, test_kind_name(cfg.test), s,
                want_decisions ? &decisions : nullptr);
            cells.push_back(cell);
        }
    }

    if (!cfg.csv_path.empty()) {
        std::ofstream out = open_output(cfg.csv_path);
        write_heatmap_csv(cells, out);
    }
    if (!cfg.svg_path.empty()) {
        std::ofstream out = open_output(cfg.svg_path);
        write_heatmap_svg(cells, out);
    }
    if (want_decisions) {
        std::ofstream out = open_output(cfg.decisions_path);
        write_decisions_csv(decisions, out);
    }
    return cells;
}

std::vector<CurvePoint> chow_liu_error_curve(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    if (cfg.n_grid.empty()) cfg.n_grid = default_n_grid();
    if (cfg.trials < 1) throw parameter_error("trials must be >= 1");

    IsingModel model =
        build_uniform_tree(tree_shape_from_name(cfg.family), cfg.p, cfg.alpha);
    SamplerConfig sampler;
    sampler.mode = cfg.mode;
    sampler.burn_in = resolve_burn_in(cfg, model);
    GraphStructure truth = network_structure(model);

    std::vector<CurvePoint> points;
    points.reserve(cfg.n_grid.size());
    for (std::size_t cj = 0; cj < cfg.n_grid.size(); ++cj) {
        long long n = cfg.n_grid[cj];
        if (n < 1) throw parameter_error("n values must be >= 1");
        long long total = 0;
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        const int nt = max_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (cfg.trials > 1) \
    reduction(+ : total)
#endif
        for (int trial = 0; trial < cfg.trials; ++trial) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                SamplerConfig sc = sampler;
                sc.seed = stream_key(cfg.seed, cj, std::uint64_t(trial));
                SampleBatch batch = sample(model, n, sc);
                GraphStructure learned = chow_liu(batch);
                total += static_cast<long long>(symmetric_difference(truth, learned).edge_count());
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical(ising_curve_error)
#endif
                {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        }
        (void)nt;
        if (failed.load()) std::rethrow_exception(error);
        CurvePoint pt;
        pt.n = n;
        pt.mean_edge_error = double(total) / double(cfg.trials);
        pt.trials = cfg.trials;
        points.push_back(pt);
    }

    if (!cfg.csv_path.empty()) {
        std::ofstream out = open_output(cfg.csv_path);
        write_curve_csv(points, out);
    }
    return points;
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw parameter_error("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw parameter_error("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");

        if (key == "family") {
            tree_shape_from_name(value); // validates the name
            config.family = value;
        } else if (key == "p") {
            long long v = parse_ll(value, "p");
            if (v < 1) throw parameter_error("p must be >= 1");
            config.p = int(v);
        } else if (key == "alpha") {
            config.alpha = parse_double(value, "alpha");
        } else if (key == "test") {
            config.test = test_kind_from_name(value);
        } else if (key == "s_grid") {
            config.s_grid.clear();
            for (long long v : parse_grid(value, "s_grid")) config.s_grid.push_back(int(v));
        } else if (key == "n_grid") {
            config.n_grid = parse_grid(value, "n_grid");
        } else if (key == "s") {
            config.s_grid = {int(parse_ll(value, "s"))};
        } else if (key == "n") {
            config.n_grid = {parse_ll(value, "n")};
        } else if (key == "trials") {
            long long v = parse_ll(value, "trials");
            if (v < 1) throw parameter_error("trials must be >= 1");
            config.trials = int(v);
        } else if (key == "seed") {
            config.seed = std::uint64_t(parse_ll(value, "seed"));
        } else if (key == "burn_in") {
            config.burn_in = (value == "auto") ? -1 : parse_ll(value, "burn_in");
        } else if (key == "mode") {
            config.mode = sampler_mode_from_name(value);
        } else if (key == "fresh_alternate") {
            config.fresh_alternate = parse_bool(value, "fresh_alternate");
        } else if (key == "epsilon") {
            config.epsilon = parse_double(value, "epsilon");
        } else if (key == "gap_constant") {
            config.gap_constant = parse_double(value, "gap_constant");
        } else if (key == "csv") {
            config.csv_path = value;
        } else if (key == "svg") {
            config.svg_path = value;
        } else if (key == "decisions") {
            config.decisions_path = value;
        } else {
            throw parameter_error("unknown config key '" + key + "' on line " +
                                  std::to_string(lineno));
        }
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open config file '" + path + "'");
    ExperimentConfig config;
    apply_config_text(config, in);
    return config;
}

void write_heatmap_csv(const std::vector<HeatmapCell>& cells, std::ostream& out) {
    out << "s,n,fa,md,trials,risk,ci95\n";
    for (const HeatmapCell& c : cells) {
        out << c.s << ',' << c.n << ',' << c.estimate.false_alarms << ','
            << c.estimate.missed_detections << ',' << c.estimate.trials << ','
            << fmt_double(c.estimate.risk) << ',' << fmt_double(c.estimate.ci95) << '\n';
    }
}

std::vector<HeatmapCell> read_heatmap_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "s,n,fa,md,trials,risk,ci95")
        throw parameter_error("heatmap CSV: missing or wrong header");
    std::vector<HeatmapCell> cells;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw parameter_error("heatmap CSV line " + std::to_string(lineno) +
                                  ": expected 7 fields");
        HeatmapCell c;
        c.s = int(parse_ll(fields[0], "s"));
        c.n = parse_ll(fields[1], "n");
        c.estimate.false_alarms = parse_ll(fields[2], "fa");
        c.estimate.missed_detections = parse_ll(fields[3], "md");
        c.estimate.trials = parse_ll(fields[4], "trials");
        c.estimate.risk = parse_double(fields[5], "risk");
        c.estimate.ci95 = parse_double(fields[6], "ci95");
        cells.push_back(c);
    }
    return cells;
}

void write_heatmap_svg(const std::vector<HeatmapCell>& cells, std::ostream& out) {
    std::set<int> s_set;
    std::set<long long> n_set;
    std::map<std::pair<int, long long>, double> risk;
    for (const HeatmapCell& c : cells) {
        s_set.insert(c.s);
        n_set.insert(c.n);
        risk[{c.s, c.n}] = c.estimate.risk;
    }
    std::vector<int> s_vals(s_set.begin(), s_set.end());
    std::vector<long long> n_vals(n_set.begin(), n_set.end());
    const int cell = 18;
    const int ml = 64, mt = 28, mr = 16, mb = 44;
    const int w = ml + cell * int(n_vals.size()) + mr;
    const int h = mt + cell * int(s_vals.size()) + mb;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w
        << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"#f8f8f8\"/>\n"
        << "  <text x=\"" << ml << "\" y=\"18\" font-family=\"monospace\" font-size=\"12\">"
        << "risk heatmap: black &gt; 0.35, white &lt; 0.15, orange between</text>\n";

    // Smallest s at the bottom row, n increasing to the right.
    for (std::size_t si = 0; si < s_vals.size(); ++si) {
        int y = mt + cell * int(s_vals.size() - 1 - si);
        for (std::size_t nj = 0; nj < n_vals.size(); ++nj) {
            int x = ml + cell * int(nj);
            auto it = risk.find({s_vals[si], n_vals[nj]});
            const char* fill = "#f8f8f8";
            if (it != risk.end())
                fill = it->second > 0.35 ? "#000000"
                       : it->second < 0.15 ? "#ffffff"
                                           : "#ff8c00";
            out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << fill
                << "\" stroke=\"#b0b0b0\" stroke-width=\"0.5\"/>\n";
        }
    }

    std::size_t s_step = std::max<std::size_t>(1, s_vals.size() / 10);
    for (std::size_t si = 0; si < s_vals.size(); si += s_step) {
        int y = mt + cell * int(s_vals.size() - 1 - si) + cell / 2 + 4;
        out << "  <text x=\"" << ml - 8 << "\" y=\"" << y
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
            << s_vals[si] << "</text>\n";
    }
    std::size_t n_step = std::max<std::size_t>(1, n_vals.size() / 12);
    for (std::size_t nj = 0; nj < n_vals.size(); nj += n_step) {
        int x = ml + cell * int(nj) + cell / 2;
        out << "  <text x=\"" << x << "\" y=\"" << mt + cell * int(s_vals.size()) + 16
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << n_vals[nj] << "</text>\n";
    }
    out << "  <text x=\"" << ml / 4 << "\" y=\"" << mt + cell * int(s_vals.size()) / 2
        << "\" font-family=\"monospace\" font-size=\"12\">s</text>\n"
        << "  <text x=\"" << ml + cell * int(n_vals.size()) / 2 << "\" y=\"" << h - 8
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">n</text>\n"
        << "</svg>\n";
}

void write_curve_csv(const std::vector<CurvePoint>& points, std::ostream& out) {
    out << "n,mean_edge_error,trials\n";
    for (const CurvePoint& p : points)
        out << p.n << ',' << fmt_double(p.mean_edge_error) << ',' << p.trials << '\n';
}

} // namespace ising
