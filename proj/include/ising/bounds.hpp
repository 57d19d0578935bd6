#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/exact.hpp"
#include "ising/model.hpp"

namespace ising {

// Inputs for the sample-complexity formulas.  The named constants default to
// NaN meaning "use the formula's stated default" (1 for most, 64 for the
// structure-learning upper bound, 4000 and 16e inside the lifted bounds).
struct BoundQuery {
    double p = 0, d = 0, s = 0;
    double alpha = 0, beta = 0;
    double C = std::numeric_limits<double>::quiet_NaN(); // leading constant
    double K = std::numeric_limits<double>::quiet_NaN(); // range constant (s <= p/K etc.)
    double zeta = 0; // large-s regime exponent
    double eta = 0;  // high-temperature level (alpha d <= eta)
};

struct BoundResult {
    double value = 0.0;
    bool valid = false;        // whether the formula's preconditions held
    std::string formula;       // evaluator id, e.g. "forest-upper"
    std::string condition;     // the precondition that was checked
};

// Upper bound on structure-learning sample complexity:
// C d e^{2 beta d} / sinh^2(alpha/4) * (1 + log(p^2/(2s)) + 1/s), C = 64.
BoundResult sl_upper(const BoundQuery& q);

// Lower bounds for testing/localising s edits (valid for 20 <= d <= s <= p/K):
// C max{e^{2b}/tanh^2 a, e^{2b(d-3)}/(d^2 min(1, a^2 d^4))} * log(1 + C p/s^2)
// and the localisation variant with log(C p / s).
BoundResult gof_lower_small_s(const BoundQuery& q);
BoundResult eof_lower_small_s(const BoundQuery& q);

// Large-s regime (zeta in (0,1], s <= p d^{1-zeta}/K, d >= 10); the value is
// the best of the two applicable temperature regimes:
//   high temp (a d^{1-zeta} <= 1/32): C/(d^{2-2z} a^2) log(1 + C p d^{3-3z}/s^2)
//   low temp  (b d >= 4 log(d-4)):    C e^{2bd(1-d^-z)}/(d^2 min(1, a^2 d^4))
//                                       * log(1 + C p d^{2-3z}/s^2)
// and the localisation variant replaces the log with log(1 + C p d^{1-z}/s).
BoundResult gof_lower_large_s(const BoundQuery& q);
BoundResult eof_lower_large_s(const BoundQuery& q);

// Very sparse changes (s <= d):
// C max{e^{2b}/tanh^2 a, e^{2b(d-1-2 sqrt s)}/(d^6 sinh^2(a sqrt s))}
//   * log(1 + C min(p/s^2, p/d)), localisation variant log(C p / d).
BoundResult gof_lower_very_small_s(const BoundQuery& q);
BoundResult eof_lower_very_small_s(const BoundQuery& q);

struct BoundSet {
    BoundResult upper;
    BoundResult lower;
    std::optional<BoundResult> lower_eof;
};

// Deletion testing in forests:
//   upper C max{1, p/(sinh^2 a s^2)}
//   lower max{1, (1/C) sinh^-2 a log(1 + p/(C s^2))}   (valid s <= p/(32e))
//   eof   (1/(C sinh^2 a)) log(p/(C s))
BoundSet forest_bounds(const BoundQuery& q);

// Arbitrary changes in trees:
//   upper C max{1, p/((1-tanh a)^2 sinh^2 a s^2)}
//   lower (c/tanh^2 a) log(1 + c p/s^2)      (no localisation form stated)
BoundSet tree_bounds(const BoundQuery& q);

// Deletions in high-temperature ferromagnets (lower valid for eta <= 1/16,
// s <= c p d):
//   upper C_eta max{1, p d/(a^2 s^2)}
//   lower (c/(a^2 d^2)) log(1 + c p d^3/s^2)
//   eof   (c/(a^2 d^2)) log(1 + c p d/s)
BoundSet ferro_bounds(const BoundQuery& q);

// Tolerant-testing upper bounds:
//   forest (0 <= eps < 1):
//     C max{1, p/(sinh^2 a (1-eps)^2 s^2), 1/((1-eps)^2 s)}
//   tree (eps < (1 - tanh a)/2), with D = 1 - 2 eps - tanh a:
//     C max{1, p/(sinh^2 a D^2 s^2), 1/(D^2 s)}
BoundResult tolerant_forest_upper(const BoundQuery& q, double eps);
BoundResult tolerant_tree_upper(const BoundQuery& q, double eps);

// The per-family chi^2 upper bounds with their validity conditions.  The
// value is always returned; valid reports whether the condition held.
BoundResult widget_chi2_bound(const WidgetSpec& spec);
// Reverse-direction bounds (chi^2(null || alt)) where one exists:
// CliqueWithHole and CliqueVsEmpty.
std::optional<BoundResult> widget_chi2_bound_reverse(const WidgetSpec& spec);

struct LiftedBounds {
    double n_gof = 0.0;
    double n_eof = 0.0;
    double kappa = 0.0;
    int m = 0;
    int t = 0;
    bool valid = false;  // t < m/(16e)
    std::string condition;
};

// Sample-complexity lower bounds from lifting a widget to p nodes with
// t = ceil(s/sigma) switched blocks, m = floor(p/nu):
//   n_gof = log(1 + m/t^2) / (2 log(1+kappa))
//   n_eof = log(m/(4000 t)) / (2 log(1+kappa))
// kappa is the exact widget chi^2 by default; use_bound_kappa swaps in the
// (looser) proposition bound.
LiftedBounds lifted_sample_bounds(const WidgetSpec& spec, int p, int s,
                                  bool use_bound_kappa = false);

// Two-point risk bound: R >= 1 - sqrt(log(1 + chi2_mixture)/2), clamped to 0.
double lecam_risk_lower(double mixture_chi2);

// One verification row per widget point: exact chi^2 (enumeration when the
// widget fits, otherwise the symmetry-reduced closed form), the closed form,
// the proposition bound, whether the validity condition held, and pass =
// (closed form matches exact) AND (exact <= bound when valid).
struct VerificationRow {
    std::string family; // family name, with "Reverse" suffix for the reverse rows
    double lambda = 0.0, mu = 0.0;
    int d = 0, ell = 0;
    double exact_chi2 = 0.0;
    double closed_form = 0.0;
    double bound = 0.0;
    bool valid = false;
    bool pass = false;
};

std::vector<VerificationRow> verify_widget_bounds(const std::vector<WidgetSpec>& grid,
                                                  int limit = kEnumerationLimit);
// The default verification grid (>= 200 points across all families' validity
// regions; every point either fits enumeration or the reduced evaluators).
std::vector<WidgetSpec> default_verification_grid();
std::vector<WidgetSpec> quick_verification_grid();

// CSV schema: family,lambda,mu,d,ell,exact_chi2,closed_form,bound,valid,pass
void write_verification_csv(const std::vector<VerificationRow>& rows,
                            std::ostream& out);

} // namespace ising
