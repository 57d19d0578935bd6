#pragma once

#include <vector>

#include "ising/common.hpp"
#include "ising/model.hpp"

namespace ising {

// ---------------------------------------------------------------------------
// Brute-force enumeration (p <= limit).  The parallel versions split the
// state space into a fixed number of chunks walked in Gray-code order with
// incremental energy updates; partial results are combined in a fixed
// pairwise tree, so values are bit-identical for any thread count.  The
// _serial variants are the plain reference implementations kept for testing.
// ---------------------------------------------------------------------------

double log_partition(const IsingModel& model, int limit = kEnumerationLimit);
double log_partition_serial(const IsingModel& model, int limit = kEnumerationLimit);

// p x p matrix of E[X_i X_j] (row-major, ones on the diagonal).
std::vector<double> pair_moments(const IsingModel& model, int limit = kEnumerationLimit);
std::vector<double> pair_moments_serial(const IsingModel& model, int limit = kEnumerationLimit);

// Normalized probabilities indexed by state mask (bit i set means x_i = +1).
std::vector<double> exact_distribution(const IsingModel& model, int limit = kEnumerationLimit);

// chi^2(Q || P) through the partition-function identity
//   1 + chi^2 = Z_P * Z_{2Q-P} / Z_Q^2,
// assembled in log space as expm1(logZ_P + logZ_{2Q-P} - 2 logZ_Q).
double chi_square(const IsingModel& q, const IsingModel& p, int limit = kEnumerationLimit);

// Cross-check mode: direct enumeration of sum_x Q(x)^2 / P(x) - 1.
double chi_square_direct(const IsingModel& q, const IsingModel& p, int limit = kEnumerationLimit);

// chi^2 of n-fold products: (1+kappa)^n - 1, evaluated stably.
double tensorize(double kappa, long long n);

struct MixtureChi2 {
    double value;          // exact hypergeometric mixture chi^2
    double binomial_bound; // exp(t^2 a_n / m) - 1
    double block_chi2;     // a_n = (1+kappa)^n - 1 for one switched block
};

// chi^2 of the uniform mixture over alternates of a product-form ensemble
// against P^(x)n.  With H the hypergeometric overlap of two random t-subsets
// of the m blocks, the exact value is E[(1+a_n)^H] - 1.
MixtureChi2 mixture_chi_square(const ChangeEnsemble& ensemble, long long n,
                               int limit = kEnumerationLimit);

// Tiny-case oracle: enumerate all alternates and all n-sample joint states.
// Requires n * p <= limit and a modest subset count.
double mixture_chi_square_enumerated(const ChangeEnsemble& ensemble, int n,
                                     int limit = kEnumerationLimit);

// log of the binomial coefficient via lgamma.
double log_binomial(long long n, long long k);

// ---------------------------------------------------------------------------
// Symmetry-reduced partition sums for the clique widgets.  These are exact
// for d far beyond the enumeration limit; enumeration certifies them at
// small d.
// ---------------------------------------------------------------------------

// S_i(lambda) = sum_{j=0}^{d+1-ell} C(d+1-ell, j) exp(-2 lambda j (d+1-2i-j)).
// The special-edge clique uses the ell = 2 instances: S_1 = S(d,.,2,0),
// S_2 = S(d,.,2,1).
double log_clique_partition_sum(int d, double lambda, int ell, int i);
double clique_partition_sum(int d, double lambda, int ell, int i);

// Full log partition functions of the structured models (equal to the
// enumeration value, including all normalization):
//   clique_special_edge: (d+1)-clique, common weight lambda, edge (0,1) = w.
//   clique_with_hole:    (d+1)-clique, K_ell on nodes 0..ell-1 at weight w,
//                        all other pairs lambda.
//   multipartite:        d nodes in groups of ell+1; cross-group lambda,
//                        within-group w.
//   multipartite_extra:  multipartite plus an extra node coupled at lambda to
//                        every group but the last and at w to the last group.
//   clique:              uniform mu-clique on m nodes.
// The occupancy-count tables are exact in doubles for d <= 52.
double log_partition_clique_special_edge(int d, double lambda, double w);
double log_partition_clique_with_hole(int d, int ell, double lambda, double w);
double log_partition_multipartite(int d, int ell, double lambda, double w);
double log_partition_multipartite_extra(int d, int ell, double lambda, double w);
double log_partition_clique(int m, double mu);

// For a family Z(x) = sum_i exp(logw_i + x * shift_i), returns
// Z(+1) Z(-1) / Z(0)^2 - 1 at full relative precision (every cross term is a
// nonnegative 4 sinh^2 factor).  Every widget chi^2 reduces to this form.
double log_linear_family_chi2(const std::vector<double>& logw,
                              const std::vector<double>& shift);

// Exact chi^2(alt || null) of a widget from its closed form / symmetry
// reduction; valid for any d (no enumeration).  The reverse direction
// chi^2(null || alt) exists for CliqueWithHole and CliqueVsEmpty.
double widget_chi2_closed_form(const WidgetSpec& spec);
double widget_chi2_closed_form_reverse(const WidgetSpec& spec);
bool widget_has_reverse_form(WidgetFamily family);

} // namespace ising
