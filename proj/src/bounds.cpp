#include "ising/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ising {

namespace {

constexpr double kSixteenE = 16.0 * 2.718281828459045235360287471352662498;

double with_default(double v, double fallback) {
    return std::isnan(v) ? fallback : v;
}

double sq(double x) { return x * x; }

bool sane(const BoundQuery& q) {
    return q.p >= 1.0 && q.s >= 1.0 && q.alpha > 0.0 && std::isfinite(q.p) &&
           std::isfinite(q.d) && std::isfinite(q.s) && std::isfinite(q.alpha) &&
           std::isfinite(q.beta);
}

// The degree-aware bounds additionally need a real degree.
bool sane_with_degree(const BoundQuery& q) { return sane(q) && q.d >= 1.0; }

// max{ e^{2b}/tanh^2 a , e^{2b(d-3)}/(d^2 min(1, a^2 d^4)) }
double small_s_prefactor(const BoundQuery& q) {
    double hot = std::exp(2.0 * q.beta) / sq(std::tanh(q.alpha));
    double cold = std::exp(2.0 * q.beta * (q.d - 3.0)) /
                  (sq(q.d) * std::min(1.0, sq(q.alpha * q.d * q.d)));
    return std::max(hot, cold);
}

// max{ e^{2b}/tanh^2 a , e^{2b(d-1-2 sqrt s)}/(d^6 sinh^2(a sqrt s)) }
double very_small_s_prefactor(const BoundQuery& q) {
    double rs = std::sqrt(q.s);
    double hot = std::exp(2.0 * q.beta) / sq(std::tanh(q.alpha));
    double cold = std::exp(2.0 * q.beta * (q.d - 1.0 - 2.0 * rs)) /
                  (sq(q.d) * sq(q.d) * sq(q.d) * sq(std::sinh(q.alpha * rs)));
    return std::max(hot, cold);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

BoundResult sl_upper(const BoundQuery& q) {
    BoundResult r;
    r.formula = "sl-upper";
    r.condition = "s <= p d / 2";
    double C = with_default(q.C, 64.0);
    r.value = C * q.d * std::exp(2.0 * q.beta * q.d) / sq(std::sinh(q.alpha / 4.0)) *
              (1.0 + std::log(sq(q.p) / (2.0 * q.s)) + 1.0 / q.s);
    r.valid = sane_with_degree(q) && q.s <= q.p * q.d / 2.0;
    return r;
}

BoundResult gof_lower_small_s(const BoundQuery& q) {
    BoundResult r;
    r.formula = "gof-lower-small-s";
    r.condition = "20 <= d <= s <= p/K";
    double C = with_default(q.C, 1.0);
    double K = with_default(q.K, 1.0);
    r.value = C * small_s_prefactor(q) * std::log1p(C * q.p / sq(q.s));
    r.valid = sane_with_degree(q) && q.d >= 20.0 && q.d <= q.s && q.s <= q.p / K;
    return r;
}

BoundResult eof_lower_small_s(const BoundQuery& q) {
    BoundResult r = gof_lower_small_s(q);
    r.formula = "eof-lower-small-s";
    double C = with_default(q.C, 1.0);
    r.value = C * small_s_prefactor(q) * std::log(C * q.p / q.s);
    return r;
}

namespace {

// Shared skeleton of the large-s bounds: the prefactors are fixed, only the
// logarithmic factors differ between the testing and localisation variants.
BoundResult large_s_bound(const BoundQuery& q, bool localisation) {
    BoundResult r;
    r.formula = localisation ? "eof-lower-large-s" : "gof-lower-large-s";
    r.condition =
        "zeta in (0,1], d >= 10, s <= p d^(1-zeta)/K, and a temperature regime "
        "(a d^(1-zeta) <= 1/32 or b d >= 4 log(d-4)) applies";
    double C = with_default(q.C, 1.0);
    double K = with_default(q.K, 1.0);
    double z = q.zeta;
    bool pre = sane_with_degree(q) && z > 0.0 && z <= 1.0 && q.d >= 10.0 &&
               q.s <= q.p * std::pow(q.d, 1.0 - z) / K;
    bool high_temp = q.alpha * std::pow(q.d, 1.0 - z) <= 1.0 / 32.0;
    bool low_temp = q.d > 5.0 && q.beta * q.d >= 4.0 * std::log(q.d - 4.0);
    double value = 0.0;
    if (high_temp) {
        double lg = localisation
                        ? std::log1p(C * q.p * std::pow(q.d, 1.0 - z) / q.s)
                        : std::log1p(C * q.p * std::pow(q.d, 3.0 - 3.0 * z) / sq(q.s));
        value = std::max(value, C / (std::pow(q.d, 2.0 - 2.0 * z) * sq(q.alpha)) * lg);
    }
    if (low_temp) {
        double lg = localisation
                        ? std::log1p(C * q.p * std::pow(q.d, 1.0 - z) / q.s)
                        : std::log1p(C * q.p * std::pow(q.d, 2.0 - 3.0 * z) / sq(q.s));
        value = std::max(value, C * std::exp(2.0 * q.beta * q.d * (1.0 - std::pow(q.d, -z))) /
                                    (sq(q.d) * std::min(1.0, sq(q.alpha * q.d * q.d))) * lg);
    }
    r.value = value;
    r.valid = pre && (high_temp || low_temp);
    return r;
}

} // namespace

BoundResult gof_lower_large_s(const BoundQuery& q) { return large_s_bound(q, false); }
BoundResult eof_lower_large_s(const BoundQuery& q) { return large_s_bound(q, true); }

BoundResult gof_lower_very_small_s(const BoundQuery& q) {
    BoundResult r;
    r.formula = "gof-lower-very-small-s";
    r.condition = "s <= d";
    double C = with_default(q.C, 1.0);
    r.value = C * very_small_s_prefactor(q) *
              std::log1p(C * std::min(q.p / sq(q.s), q.p / q.d));
    r.valid = sane_with_degree(q) && q.s <= q.d;
    return r;
}

BoundResult eof_lower_very_small_s(const BoundQuery& q) {
    BoundResult r = gof_lower_very_small_s(q);
    r.formula = "eof-lower-very-small-s";
    double C = with_default(q.C, 1.0);
    r.value = C * very_small_s_prefactor(q) * std::log(C * q.p / q.d);
    return r;
}

BoundSet forest_bounds(const BoundQuery& q) {
    double C = with_default(q.C, 1.0);
    double sh2 = sq(std::sinh(q.alpha));
    BoundSet set;

    set.upper.formula = "forest-upper";
    set.upper.condition = "alpha > 0, s >= 1";
    set.upper.value = C * std::max(1.0, q.p / (sh2 * sq(q.s)));
    set.upper.valid = sane(q);

    set.lower.formula = "forest-lower";
    set.lower.condition = "s <= p/(32 e)";
    set.lower.value = std::max(1.0, (1.0 / C) / sh2 * std::log1p(q.p / (C * sq(q.s))));
    set.lower.valid = sane(q) && q.s <= q.p / (2.0 * kSixteenE);

    BoundResult eof;
    eof.formula = "forest-eof-lower";
    eof.condition = "s <= p/(32 e)";
    eof.value = 1.0 / (C * sh2) * std::log(q.p / (C * q.s));
    eof.valid = set.lower.valid;
    set.lower_eof = eof;
    return set;
}

BoundSet tree_bounds(const BoundQuery& q) {
    double C = with_default(q.C, 1.0);
    BoundSet set;

    set.upper.formula = "tree-upper";
    set.upper.condition = "alpha > 0, s >= 1";
    set.upper.value =
        C * std::max(1.0, q.p / (sq(1.0 - std::tanh(q.alpha)) * sq(std::sinh(q.alpha)) * sq(q.s)));
    set.upper.valid = sane(q);

    set.lower.formula = "tree-lower";
    set.lower.condition = "alpha > 0, s >= 1";
    set.lower.value = C / sq(std::tanh(q.alpha)) * std::log1p(C * q.p / sq(q.s));
    set.lower.valid = sane(q);

    set.lower_eof.reset(); // no localisation form stated for trees
    return set;
}

BoundSet ferro_bounds(const BoundQuery& q) {
    double C = with_default(q.C, 1.0);
    bool in_class = sane_with_degree(q) && q.eta > 0.0 && q.alpha * q.d <= q.eta;
    BoundSet set;

    set.upper.formula = "ferro-upper";
    set.upper.condition = "alpha d <= eta";
    set.upper.value = C * std::max(1.0, q.p * q.d / (sq(q.alpha) * sq(q.s)));
    set.upper.valid = in_class;

    set.lower.formula = "ferro-lower";
    set.lower.condition = "alpha d <= eta <= 1/16, s <= c p d";
    set.lower.value = C / (sq(q.alpha) * sq(q.d)) * std::log1p(C * q.p * q.d * q.d * q.d / sq(q.s));
    set.lower.valid = in_class && q.eta <= 1.0 / 16.0 && q.s <= C * q.p * q.d;

    BoundResult eof;
    eof.formula = "ferro-eof-lower";
    eof.condition = set.lower.condition;
    eof.value = C / (sq(q.alpha) * sq(q.d)) * std::log1p(C * q.p * q.d / q.s);
    eof.valid = set.lower.valid;
    set.lower_eof = eof;
    return set;
}

BoundResult tolerant_forest_upper(const BoundQuery& q, double eps) {
    BoundResult r;
    r.formula = "tolerant-forest-upper";
    r.condition = "0 <= eps < 1";
    double C = with_default(q.C, 1.0);
    double shrink = sq(1.0 - eps);
    r.value = C * std::max({1.0, q.p / (sq(std::sinh(q.alpha)) * shrink * sq(q.s)),
                            1.0 / (shrink * q.s)});
    r.valid = sane(q) && eps >= 0.0 && eps < 1.0;
    return r;
}

BoundResult tolerant_tree_upper(const BoundQuery& q, double eps) {
    BoundResult r;
    r.formula = "tolerant-tree-upper";
    r.condition = "0 <= eps < (1 - tanh alpha)/2";
    double C = with_default(q.C, 1.0);
    double gap = 1.0 - 2.0 * eps - std::tanh(q.alpha);
    r.value = C * std::max({1.0, q.p / (sq(std::sinh(q.alpha)) * sq(gap) * sq(q.s)),
                            1.0 / (sq(gap) * q.s)});
    r.valid = sane(q) && eps >= 0.0 && eps < (1.0 - std::tanh(q.alpha)) / 2.0;
    return r;
}

BoundResult widget_chi2_bound(const WidgetSpec& spec) {
    BoundResult r;
    r.formula = std::string(family_name(spec.family)) + "-chi2-bound";
    const double lam = spec.lambda;
    const double mu = spec.mu;
    const double d = spec.d;
    const double ell = spec.ell;
    switch (spec.family) {
    case WidgetFamily::SingleEdge:
        r.value = sq(std::sinh(mu));
        r.condition = "none (the bound is an identity)";
        r.valid = std::isfinite(mu);
        break;
    case WidgetFamily::Triangle:
        // Enumeration shows the bound fails for frustrated closing edges
        // (mu < 0, e.g. lambda = 1.8, mu = -1.8 gives chi^2 about 39 times the
        // bound), so validity is restricted to the ferromagnetic side.
        r.value = 8.0 * std::exp(-2.0 * lam) * sq(std::tanh(mu));
        r.condition = "lambda >= mu > 0";
        r.valid = lam >= mu && mu > 0.0;
        break;
    case WidgetFamily::Fan:
        // (1 + 16 e^{-2 lambda} tanh^2 mu)^ell - 1, with ell deleted blades
        // out of d.
        r.value = std::expm1(ell * std::log1p(16.0 * std::exp(-2.0 * lam) * sq(std::tanh(mu))));
        r.condition = "1 <= ell <= blade count, lambda mu >= 0";
        r.valid = spec.ell >= 1 && spec.ell <= spec.blades && lam * mu >= 0.0;
        break;
    case WidgetFamily::CliqueMinusEdge:
        r.value = 16.0 * std::exp(-2.0 * lam * (d - 1.0)) * sq(std::sinh(mu));
        r.condition = "lambda d > log d";
        r.valid = spec.d >= 2 && lam * d > std::log(d);
        break;
    case WidgetFamily::CliqueWithHole:
        r.value = 32.0 * ell * std::exp(-2.0 * lam * (d + 1.0 - ell)) * sq(std::sinh(mu * (ell - 1.0)));
        r.condition = "2 <= ell, ell + 1 <= d/8, lambda >= |mu|, lambda d > 3 log d";
        r.valid = spec.ell >= 2 && 8.0 * (ell + 1.0) <= d && lam >= std::fabs(mu) &&
                  lam * d > 3.0 * std::log(d);
        break;
    case WidgetFamily::EmmentalerExtraNode:
        r.value = 32.0 * d * std::exp(-2.0 * lam * (d - 1.0 - ell));
        r.condition = "2 <= ell + 1 <= d/4, lambda (d-4) >= 3 log d, |mu| <= lambda";
        r.valid = spec.ell >= 1 && 4.0 * (ell + 1.0) <= d &&
                  lam * (d - 4.0) >= 3.0 * std::log(d) && std::fabs(mu) <= lam;
        break;
    case WidgetFamily::EmmentalerVsFull:
        r.value = sq(d) * std::min(1.0, sq(mu * d * d)) * std::exp(-2.0 * lam * (d - 1.0 - ell));
        r.condition = "ell + 1 <= d/4, lambda (d-4) >= 3 log d";
        r.valid = spec.ell >= 1 && 4.0 * (ell + 1.0) <= d &&
                  lam * (d - 4.0) >= 3.0 * std::log(d);
        break;
    case WidgetFamily::CliqueVsEmpty:
        r.value = 8.0 * sq(mu * d);
        r.condition = "32 |mu| d <= 1";
        r.valid = 32.0 * std::fabs(mu) * d <= 1.0;
        break;
    }
    return r;
}

std::optional<BoundResult> widget_chi2_bound_reverse(const WidgetSpec& spec) {
    if (!widget_has_reverse_form(spec.family)) return std::nullopt;
    BoundResult r;
    r.formula = std::string(family_name(spec.family)) + "-reverse-chi2-bound";
    const double lam = spec.lambda;
    const double mu = spec.mu;
    const double d = spec.d;
    const double ell = spec.ell;
    if (spec.family == WidgetFamily::CliqueWithHole) {
        r.value =
            64.0 * ell * std::exp(-2.0 * lam * (d + 1.0 - ell)) * sq(std::sinh(2.0 * mu * (ell - 1.0)));
        r.condition = "2 <= ell, ell + 1 <= d/12, lambda >= |mu|, lambda d > 3 log d";
        r.valid = spec.ell >= 2 && 12.0 * (ell + 1.0) <= d && lam >= std::fabs(mu) &&
                  lam * d > 3.0 * std::log(d);
    } else { // CliqueVsEmpty
        r.value = 3.0 * sq(d) * sq(mu);
        r.condition = "32 |mu| d <= 1";
        r.valid = 32.0 * std::fabs(mu) * d <= 1.0;
    }
    return r;
}

LiftedBounds lifted_sample_bounds(const WidgetSpec& spec, int p, int s,
                                  bool use_bound_kappa) {
    if (p < 1 || s < 1) throw parameter_error("lifted bounds require p >= 1 and s >= 1");
    int sigma = widget_sigma(spec);
    int nu = widget_nodes(spec);
    LiftedBounds out;
    out.t = (s + sigma - 1) / sigma;
    out.m = p / nu;
    if (out.m < 1) throw parameter_error("lifted bounds: p holds no complete widget block");
    out.kappa =
        use_bound_kappa ? widget_chi2_bound(spec).value : widget_chi2_closed_form(spec);
    if (!(out.kappa > 0.0) || !std::isfinite(out.kappa))
        throw parameter_error("lifted bounds need a positive finite block chi^2");
    double per_copy = 2.0 * std::log1p(out.kappa);
    out.n_gof = std::log1p(double(out.m) / (double(out.t) * double(out.t))) / per_copy;
    out.n_eof = std::log(double(out.m) / (4000.0 * double(out.t))) / per_copy;
    out.valid = double(out.t) < double(out.m) / kSixteenE;
    out.condition = "t < m/(16 e) with t = ceil(s/sigma), m = floor(p/nu)";
    return out;
}

double lecam_risk_lower(double mixture_chi2) {
    double c = std::max(mixture_chi2, 0.0);
    return std::max(0.0, 1.0 - std::sqrt(std::log1p(c) / 2.0));
}

namespace {

bool row_pass(const VerificationRow& row) {
    double scale = std::max(std::fabs(row.exact_chi2), std::fabs(row.closed_form));
    bool match = std::fabs(row.closed_form - row.exact_chi2) <= 1e-9 * scale + 1e-13;
    bool bound_ok = !row.valid || row.exact_chi2 <= row.bound * (1.0 + 1e-9) + 1e-15;
    return match && bound_ok;
}

} // namespace

std::vector<VerificationRow> verify_widget_bounds(const std::vector<WidgetSpec>& grid,
                                                  int limit) {
    std::vector<VerificationRow> rows;
    rows.reserve(2 * grid.size());
    const int enum_cap = std::min(limit, 14);
    for (const WidgetSpec& spec : grid) {
        const bool enumerable = widget_nodes(spec) <= enum_cap;
        std::optional<WidgetPair> pair;
        if (enumerable) pair = build_widget(spec);

        VerificationRow fwd;
        fwd.family = family_name(spec.family);
        fwd.lambda = spec.lambda;
        fwd.mu = spec.mu;
        fwd.d = spec.d;
        fwd.ell = spec.ell;
        fwd.closed_form = widget_chi2_closed_form(spec);
        fwd.exact_chi2 =
            enumerable ? chi_square(pair->alt_model, pair->null_model, limit) : fwd.closed_form;
        BoundResult bound = widget_chi2_bound(spec);
        fwd.bound = bound.value;
        fwd.valid = bound.valid;
        fwd.pass = row_pass(fwd);
        rows.push_back(std::move(fwd));

        if (widget_has_reverse_form(spec.family)) {
            VerificationRow rev;
            rev.family = std::string(family_name(spec.family)) + "Reverse";
            rev.lambda = spec.lambda;
            rev.mu = spec.mu;
            rev.d = spec.d;
            rev.ell = spec.ell;
            rev.closed_form = widget_chi2_closed_form_reverse(spec);
            rev.exact_chi2 = enumerable ? chi_square(pair->null_model, pair->alt_model, limit)
                                        : rev.closed_form;
            BoundResult rbound = *widget_chi2_bound_reverse(spec);
            rev.bound = rbound.value;
            rev.valid = rbound.valid;
            rev.pass = row_pass(rev);
            rows.push_back(std::move(rev));
        }
    }
    return rows;
}

namespace {

WidgetSpec make_spec(WidgetFamily f, double lambda, double mu, int d, int ell,
                     int blades = 0) {
    WidgetSpec s;
    s.family = f;
    s.lambda = lambda;
    s.mu = mu;
    s.d = d;
    s.ell = ell;
    s.blades = blades;
    return s;
}

} // namespace

std::vector<WidgetSpec> default_verification_grid() {
    std::vector<WidgetSpec> grid;

    for (double mu : {0.05, 0.1, 0.15, 0.25, 0.35, 0.5, 0.75, 1.0, 1.25, 1.5,
                      2.0, 2.5, 3.0}) {
        grid.push_back(make_spec(WidgetFamily::SingleEdge, 0.0, mu, 0, 0));
        grid.push_back(make_spec(WidgetFamily::SingleEdge, 0.0, -mu, 0, 0));
    }

    for (double lam : {0.3, 0.5, 0.8, 1.2, 1.8, 2.5}) {
        for (double mu : {0.1, -0.1, 0.3, -0.3}) {
            grid.push_back(make_spec(WidgetFamily::Triangle, lam, mu, 0, 0));
        }
        if (lam != 0.3) { // the boundary case |mu| = lambda, skipping duplicates
            grid.push_back(make_spec(WidgetFamily::Triangle, lam, lam, 0, 0));
            grid.push_back(make_spec(WidgetFamily::Triangle, lam, -lam, 0, 0));
        }
    }

    for (int blades = 1; blades <= 3; ++blades) {
        for (int ell = 1; ell <= blades; ++ell) {
            for (double lam : {0.5, 1.0, 2.0}) {
                for (double mu : {0.2, 0.5, 1.0}) {
                    grid.push_back(make_spec(WidgetFamily::Fan, lam, mu, 0, ell, blades));
                }
            }
        }
    }

    for (int d : {4, 6, 8, 10, 13}) {
        for (double lam : {0.5, 1.0, 1.5}) {
            for (double mu : {0.2, -0.2, 0.5, -0.5}) {
                grid.push_back(make_spec(WidgetFamily::CliqueMinusEdge, lam, mu, d, 0));
            }
        }
    }

    // Small holes exercise the closed form against enumeration; the large ones
    // sit inside the forward (d >= 8(ell+1)) and reverse (d >= 12(ell+1))
    // validity regions.
    for (auto [d, ell] : {std::pair{5, 2}, {7, 2}, {9, 2}, {9, 3}, {13, 2}, {13, 3}}) {
        grid.push_back(make_spec(WidgetFamily::CliqueWithHole, 0.8, 0.4, d, ell));
    }
    for (auto [d, ell] :
         {std::pair{24, 2}, {32, 2}, {32, 3}, {40, 2}, {40, 3}, {36, 2}, {48, 2}, {48, 3}}) {
        for (double lam : {0.5, 1.0}) {
            for (double mu : {0.3, 0.5}) {
                grid.push_back(make_spec(WidgetFamily::CliqueWithHole, lam, mu, d, ell));
            }
        }
    }

    for (WidgetFamily f : {WidgetFamily::EmmentalerExtraNode, WidgetFamily::EmmentalerVsFull}) {
        for (int ell : {1, 2}) {
            for (double lam : {1.0, 1.5}) {
                for (double mu : {0.5, 1.0}) {
                    grid.push_back(make_spec(f, lam, mu, 12, ell));
                }
            }
        }
        for (int d : {16, 24}) {
            for (int ell : {1, 3}) {
                for (double lam : {1.0, 1.5}) {
                    grid.push_back(make_spec(f, lam, 0.5, d, ell));
                }
            }
        }
    }

    for (int d : {4, 8, 12, 20, 40}) {
        for (double c : {0.9, 0.5, -0.5}) {
            grid.push_back(make_spec(WidgetFamily::CliqueVsEmpty, 0.0, c / (32.0 * d), d, 0));
        }
    }

    return grid;
}

std::vector<WidgetSpec> quick_verification_grid() {
    std::vector<WidgetSpec> grid;
    grid.push_back(make_spec(WidgetFamily::SingleEdge, 0.0, 0.5, 0, 0));
    grid.push_back(make_spec(WidgetFamily::SingleEdge, 0.0, -0.3, 0, 0));
    grid.push_back(make_spec(WidgetFamily::Triangle, 1.0, 0.3, 0, 0));
    grid.push_back(make_spec(WidgetFamily::Triangle, 0.8, -0.5, 0, 0));
    grid.push_back(make_spec(WidgetFamily::Fan, 1.1, 0.4, 0, 2, 3));
    grid.push_back(make_spec(WidgetFamily::CliqueMinusEdge, 0.8, 0.4, 5, 0));
    grid.push_back(make_spec(WidgetFamily::CliqueMinusEdge, 1.0, -0.3, 8, 0));
    grid.push_back(make_spec(WidgetFamily::CliqueWithHole, 1.2, 0.5, 7, 3));
    grid.push_back(make_spec(WidgetFamily::CliqueWithHole, 1.0, 0.5, 24, 2));
    grid.push_back(make_spec(WidgetFamily::EmmentalerExtraNode, 1.5, 0.7, 6, 1));
    grid.push_back(make_spec(WidgetFamily::EmmentalerExtraNode, 1.0, 0.5, 12, 2));
    grid.push_back(make_spec(WidgetFamily::EmmentalerVsFull, 1.5, 0.7, 6, 1));
    grid.push_back(make_spec(WidgetFamily::EmmentalerVsFull, 1.0, 0.5, 12, 1));
    grid.push_back(make_spec(WidgetFamily::CliqueVsEmpty, 0.0, 1.0 / 300.0, 8, 0));
    grid.push_back(make_spec(WidgetFamily::CliqueVsEmpty, 0.0, 0.9 / 640.0, 20, 0));
    return grid;
}

void write_verification_csv(const std::vector<VerificationRow>& rows, std::ostream& out) {
    out << "family,lambda,mu,d,ell,exact_chi2,closed_form,bound,valid,pass\n";
    for (const VerificationRow& r : rows) {
        out << r.family << ',' << fmt_double(r.lambda) << ',' << fmt_double(r.mu) << ','
            << r.d << ',' << r.ell << ',' << fmt_double(r.exact_chi2) << ','
            << fmt_double(r.closed_form) << ',' << fmt_double(r.bound) << ','
            << (r.valid ? 1 : 0) << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

} // namespace ising
