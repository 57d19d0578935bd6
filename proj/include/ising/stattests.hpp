#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/model.hpp"
#include "ising/sampler.hpp"

namespace ising {

struct TestDecision {
    bool is_null = false;
    double statistic_value = 0.0;
    double threshold = 0.0;
    std::string test_name;
    std::string note; // provenance (e.g. calibration batch size/seed)
};

struct ForestMoments {
    double mean = 0.0;        // E[T] for one sample
    double variance_n1 = 0.0; // Var[T] for one sample
};

// T = (1/n) sum_samples sum_{(i,j) in g} x_i x_j.
double statistic_T(const SampleBatch& batch, const GraphStructure& g);

// Uniform-weight forests with negative weights are handled by weighting each
// edge term with the sign of its coupling, which gauges the model back to the
// positive case; all thresholds below then use tau = |tanh alpha|.
double statistic_T_signed(const SampleBatch& batch,
                          const std::vector<std::pair<int, int>>& edges,
                          const std::vector<int>& signs);

// Mean/variance of the (sign-weighted) statistic under the model itself:
// mean = k tau, variance = k (1 - tau^2), k = edge count.
ForestMoments forest_moments(const IsingModel& model);

// Moments of P's statistic under another forest law Q with G(Q) a subset of
// G(P) (the deletion setting): deleted edges contribute mean 0, variance 1.
// Computed from tanh path products, no enumeration, so valid at any p.
ForestMoments forest_cross_moments(const IsingModel& p_model,
                                   const IsingModel& q_model);

// Threshold tests.  Each returns the statistic, the threshold, and the
// verdict side documented below; verdicts are deterministic in (value,
// threshold).
//
// forest_deletion_test: null iff T >= (k - s/2) tau.
TestDecision forest_deletion_test(const IsingModel& p_model,
                                  const SampleBatch& batch, int s);
// tree_change_test: null iff T > (p-1) tau - s tau (1-tau)/4.
TestDecision tree_change_test(const IsingModel& p_model,
                              const SampleBatch& batch, int s);
// tolerant_forest_test (0 <= eps < 1): null iff T >= (k - (1+eps) s/2) tau.
TestDecision tolerant_forest_test(const IsingModel& p_model,
                                  const SampleBatch& batch, int s, double eps);
// tolerant_tree_test (0 <= eps < (1 - tanh alpha)/2):
// null iff T > (p-1) tau - ((1+2 eps)/4) s tau + (s/4) tau^2.
TestDecision tolerant_tree_test(const IsingModel& p_model,
                                const SampleBatch& batch, int s, double eps);
// ferro_deletion_test (uniform ferromagnet, alpha d < 1):
// null iff T >= E_P[T] - gap_constant * s * alpha.  E_P[T] is exact when
// p <= limit, otherwise estimated from a calibration batch of
// max(10^4, 100 n) samples (size and seed recorded in the note), unless the
// caller supplies expected_statistic.
TestDecision ferro_deletion_test(const IsingModel& p_model,
                                 const SampleBatch& batch, int s,
                                 double gap_constant = 1.0 / 800.0,
                                 std::optional<double> expected_statistic = std::nullopt,
                                 int limit = kEnumerationLimit);

// Maximum spanning tree under weights |E[X_i X_j]| (Kruskal); ties broken by
// lexicographic edge order for determinism.
GraphStructure chow_liu_from_moments(int p, const std::vector<double>& moments);
GraphStructure chow_liu(const SampleBatch& batch);

// Structure-learning baseline: estimate the tree, count
// D = |Ghat symmetric-difference G(P)|, alternate iff D >= s/2.
TestDecision sl_based_gof(const IsingModel& p_model, const SampleBatch& batch,
                          int s);

// Decision log row, one per test invocation:
// "test,s,n,seed,statistic,threshold,verdict".
struct DecisionRow {
    std::string test;
    int s = 0;
    long long n = 0;
    std::uint64_t seed = 0;
    double statistic = 0.0;
    double threshold = 0.0;
    bool is_null = false;
};
void write_decisions_csv(const std::vector<DecisionRow>& rows, std::ostream& out);

} // namespace ising
