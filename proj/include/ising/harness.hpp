#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/model.hpp"
#include "ising/sampler.hpp"
#include "ising/stattests.hpp"

namespace ising {

enum class TestKind {
    ForestDeletion,
    TreeChange,
    TolerantForest,
    TolerantTree,
    FerroDeletion,
    SlGof,
};
TestKind test_kind_from_name(const std::string& name);
const char* test_kind_name(TestKind kind);

struct ExperimentConfig {
    std::string family = "complete-binary"; // tree shape for the null model
    int p = 127;
    double alpha = 0.1;
    TestKind test = TestKind::ForestDeletion;
    std::vector<int> s_grid;        // default 3,6,...,60
    std::vector<long long> n_grid;  // default 20,40,...,480
    int trials = 100;
    std::uint64_t seed = 1;
    long long burn_in = -1;         // -1 = auto: 1600 if p==127, else 4x the
                                    // estimated autocorrelation lag
    SamplerMode mode = SamplerMode::Glauber;
    bool fresh_alternate = true;    // re-draw the s deleted edges every trial
    double epsilon = 0.0;           // tolerant tests
    double gap_constant = 1.0 / 800.0;
    std::string csv_path, svg_path, decisions_path;
};

struct RiskEstimate {
    long long false_alarms = 0;
    long long missed_detections = 0;
    long long trials = 0;
    double risk = 0.0; // FA/trials + MD/trials, in [0,2]
    double ci95 = 0.0; // normal-approximation half width w/ continuity correction
};

using AlternateGenerator = std::function<IsingModel(std::uint64_t trial_seed)>;
using BoundTest = std::function<TestDecision(const SampleBatch&)>;

// Monte-Carlo risk of a test: per trial, draw n null samples (false alarm if
// the test rejects), build an alternate, draw n alternate samples (missed
// detection if the test accepts).  Every trial derives its own RNG streams
// from (seed, trial), so the estimate is deterministic under any parallel
// schedule.  decisions, when non-null, receives two rows per trial.
RiskEstimate estimate_risk(const IsingModel& p_model,
                           const AlternateGenerator& make_alternate,
                           const BoundTest& test, long long n, int trials,
                           std::uint64_t seed, const SamplerConfig& sampler,
                           const std::string& test_label = "",
                           int s_label = 0,
                           std::vector<DecisionRow>* decisions = nullptr);

struct HeatmapCell {
    int s = 0;
    long long n = 0;
    RiskEstimate estimate;
};

// Full (s, n) risk sweep; writes CSV/SVG/decision log when paths are set.
std::vector<HeatmapCell> risk_heatmap(const ExperimentConfig& config);

struct CurvePoint {
    long long n = 0;
    double mean_edge_error = 0.0;
    int trials = 0;
};

// Mean |G(P) symmetric-difference chow_liu(batch)| on null data per n.
std::vector<CurvePoint> chow_liu_error_curve(const ExperimentConfig& config);

long long resolve_burn_in(const ExperimentConfig& config, const IsingModel& model);

// Plain-text "key = value" config files ('#' comments); unknown keys raise
// parameter_error.  Keys: family, p, alpha, test, s_grid, n_grid, s, n,
// trials, seed, burn_in (integer or "auto"), mode, fresh_alternate, epsilon,
// gap_constant, csv, svg, decisions.
void apply_config_text(ExperimentConfig& config, std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

void write_heatmap_csv(const std::vector<HeatmapCell>& cells, std::ostream& out);
std::vector<HeatmapCell> read_heatmap_csv(std::istream& in);
// Self-contained SVG: one rect per cell, black if risk > 0.35, white if
// risk < 0.15, orange between.
void write_heatmap_svg(const std::vector<HeatmapCell>& cells, std::ostream& out);
void write_curve_csv(const std::vector<CurvePoint>& points, std::ostream& out);

// CLI entry point (subcommands: heatmap, chow-liu-curve, verify-widgets,
// bounds, sample, risk).  Returns the process exit code: 0 success,
// 1 parameter/usage error, 2 capacity error.
int run_cli(int argc, const char* const* argv);

} // namespace ising
