#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ising/bounds.hpp"
#include "ising/exact.hpp"
#include "ising/model.hpp"

using namespace ising;

namespace {

doctest::Approx near(double v) { return doctest::Approx(v).epsilon(1e-12); }

BoundQuery query(double p, double d, double s, double alpha, double beta = 0.0) {
    BoundQuery q;
    q.p = p;
    q.d = d;
    q.s = s;
    q.alpha = alpha;
    q.beta = beta;
    return q;
}

WidgetSpec spec_of(WidgetFamily f, double lambda, double mu, int d, int ell,
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

TEST_CASE("sample-complexity formulas: frozen values") {
    SUBCASE("structure-learning upper") {
        BoundResult r = sl_upper(query(127, 3, 10, 0.1, 0.1));
        CHECK(r.value == near(4361060.8218367099)); // default C = 64
        CHECK(r.valid);                             // s <= p d / 2
        CHECK(r.formula == "sl-upper");
        BoundQuery q = query(127, 3, 10, 0.1, 0.1);
        q.C = 1.0;
        CHECK(sl_upper(q).value == near(4361060.8218367099 / 64.0));
    }
    SUBCASE("small-s lower bounds") {
        BoundResult g = gof_lower_small_s(query(1000, 20, 40, 0.2, 0.3));
        CHECK(g.value == near(32.654267771252197));
        CHECK(g.valid); // 20 <= d <= s <= p/K
        CHECK(g.formula == "gof-lower-small-s");
        BoundResult e = eof_lower_small_s(query(1000, 20, 40, 0.2, 0.3));
        CHECK(e.value == near(216.49503816621813));
        CHECK(e.valid);

        CHECK_FALSE(gof_lower_small_s(query(1000, 19, 40, 0.2, 0.3)).valid);
        CHECK_FALSE(gof_lower_small_s(query(1000, 20, 15, 0.2, 0.3)).valid); // s < d
        BoundQuery qk = query(1000, 20, 40, 0.2, 0.3);
        qk.K = 30.0; // s > p/K
        CHECK_FALSE(gof_lower_small_s(qk).valid);
    }
    SUBCASE("large-s lower bounds") {
        BoundQuery high = query(1e6, 20, 100, 0.001, 0.0);
        high.zeta = 0.5;
        BoundResult r1 = gof_lower_large_s(high);
        CHECK(r1.value == near(454944.01967342093));
        CHECK(r1.valid);
        BoundResult e1 = eof_lower_large_s(high);
        CHECK(e1.value == near(535411.44345914785));

        BoundQuery low = query(1e6, 20, 100, 2.0, 2.0);
        low.zeta = 0.5;
        BoundResult r2 = gof_lower_large_s(low);
        CHECK(r2.value == near(1.439817865627617e+25));
        CHECK(r2.valid);

        // zeta outside (0,1] invalidates the regime
        BoundQuery nz = high;
        nz.zeta = 0.0;
        CHECK_FALSE(gof_lower_large_s(nz).valid);
        // neither temperature regime: warm but not hot, weak beta
        BoundQuery none = query(1e6, 20, 100, 0.5, 0.0);
        none.zeta = 0.5;
        BoundResult r3 = gof_lower_large_s(none);
        CHECK_FALSE(r3.valid);
        CHECK(r3.value == 0.0);
        CHECK_FALSE(r3.condition.empty());
    }
    SUBCASE("very-small-s lower bounds") {
        BoundResult g = gof_lower_very_small_s(query(1000, 16, 4, 0.2, 0.5));
        CHECK(g.value == near(289.64477274013268));
        CHECK(g.valid); // s <= d
        BoundResult e = eof_lower_very_small_s(query(1000, 16, 4, 0.2, 0.5));
        CHECK(e.value == near(288.53718699939692));
        CHECK_FALSE(gof_lower_very_small_s(query(1000, 16, 20, 0.2, 0.5)).valid);
    }
    SUBCASE("forest bounds") {
        BoundSet f = forest_bounds(query(127, 0, 24, 0.1));
        CHECK(f.upper.value == near(21.975262498489068));
        CHECK(f.upper.valid);
        CHECK(f.upper.formula == "forest-upper");
        CHECK_FALSE(f.lower.valid); // 24 > 127/(32 e)
        REQUIRE(f.lower_eof.has_value());
        CHECK(f.lower_eof->formula == "forest-eof-lower");

        BoundSet f1 = forest_bounds(query(1000, 0, 3, 0.1));
        CHECK(f1.lower.valid); // 3 <= 1000/(32 e) ~ 11.5
        CHECK(f1.lower.value >=
              1.0 / std::pow(std::sinh(0.1), 2) * std::log1p(1000.0 / 9.0) * (1 - 1e-12));
        // doubling C doubles the upper bound in the nontrivial branch
        BoundQuery qc = query(127, 0, 24, 0.1);
        qc.C = 2.0;
        CHECK(forest_bounds(qc).upper.value == near(2 * 21.975262498489068));
    }
    SUBCASE("tree bounds") {
        BoundSet t = tree_bounds(query(127, 0, 10, 0.1));
        CHECK(t.upper.value == near(156.15330377008558));
        CHECK(t.lower.value == near(82.525048690602029));
        CHECK(t.upper.valid);
        CHECK(t.lower.valid);
        CHECK_FALSE(t.lower_eof.has_value()); // no localisation form for trees
    }
    SUBCASE("ferro bounds") {
        BoundQuery q = query(100, 4, 8, 0.02);
        q.eta = 0.1; // alpha d = 0.08 <= eta, but eta > 1/16
        BoundSet f = ferro_bounds(q);
        CHECK(f.upper.value == near(15625.0));
        CHECK(f.upper.valid);
        CHECK(f.lower.value == near(721.11258075644679));
        CHECK_FALSE(f.lower.valid); // the lower bound needs eta <= 1/16
        REQUIRE(f.lower_eof.has_value());
        CHECK(f.lower_eof->value == near(614.3477551131759));

        BoundQuery cool = query(100, 4, 8, 0.01);
        cool.eta = 1.0 / 16.0; // alpha d = 0.04 <= eta <= 1/16: lower valid
        BoundSet fc = ferro_bounds(cool);
        CHECK(fc.lower.valid);
        CHECK(fc.lower.value ==
              near(1.0 / (0.01 * 0.01 * 16) * std::log1p(100.0 * 64 / 64.0)));
        CHECK(fc.lower_eof->valid);

        BoundQuery hot = q;
        hot.eta = 0.05; // alpha d = 0.08 > eta: outside the class
        CHECK_FALSE(ferro_bounds(hot).upper.valid);
    }
    SUBCASE("tolerant upper bounds") {
        BoundResult f = tolerant_forest_upper(query(127, 0, 12, 0.1), 0.2);
        CHECK(f.value == near(137.34539061555667));
        CHECK(f.valid);
        BoundResult t = tolerant_tree_upper(query(127, 0, 12, 0.1), 0.2);
        CHECK(t.value == near(351.13772670500558));
        CHECK(t.valid);
        CHECK_FALSE(tolerant_forest_upper(query(127, 0, 12, 0.1), 1.0).valid);
        CHECK_FALSE(tolerant_forest_upper(query(127, 0, 12, 0.1), -0.1).valid);
        // eps must stay below (1 - tanh alpha)/2 ~ 0.4502 at alpha = 0.1
        CHECK_FALSE(tolerant_tree_upper(query(127, 0, 12, 0.1), 0.46).valid);
        CHECK(tolerant_tree_upper(query(127, 0, 12, 0.1), 0.45).valid);
        // at eps = 0 the tolerant forest bound reduces to the plain one when
        // the p-term dominates
        CHECK(tolerant_forest_upper(query(127, 0, 24, 0.1), 0.0).value ==
              near(forest_bounds(query(127, 0, 24, 0.1)).upper.value));
    }
}

TEST_CASE("widget chi-square bounds") {
    SUBCASE("single edge is an identity") {
        BoundResult r = widget_chi2_bound(spec_of(WidgetFamily::SingleEdge, 0, 0.5, 0, 0));
        CHECK(r.value == near(0.27154031740762189));
        CHECK(r.valid);
        CHECK(r.formula == "SingleEdge-chi2-bound");
    }
    SUBCASE("triangle") {
        // 8 e^{-2 lambda} tanh^2 mu at lambda = 2, mu = 0.5
        BoundResult r = widget_chi2_bound(spec_of(WidgetFamily::Triangle, 2.0, 0.5, 0, 0));
        CHECK(r.value == near(8.0 * std::exp(-4.0) * std::pow(std::tanh(0.5), 2)));
        CHECK(r.valid);
        CHECK(widget_chi2_closed_form(spec_of(WidgetFamily::Triangle, 2.0, 0.5, 0, 0)) <=
              r.value);

        // a frustrated closing edge escapes the bound: the formula's value is
        // reported but flagged invalid, and the exact chi^2 indeed exceeds it
        WidgetSpec bad = spec_of(WidgetFamily::Triangle, 1.8, -1.8, 0, 0);
        BoundResult rb = widget_chi2_bound(bad);
        CHECK_FALSE(rb.valid);
        CHECK(widget_chi2_closed_form(bad) > rb.value);
        CHECK_FALSE(widget_chi2_bound(spec_of(WidgetFamily::Triangle, 0.5, 0.8, 0, 0))
                        .valid); // mu > lambda
    }
    SUBCASE("fan") {
        WidgetSpec s = spec_of(WidgetFamily::Fan, 1.1, 0.4, 0, 2, 3);
        BoundResult r = widget_chi2_bound(s);
        double per_blade = 16.0 * std::exp(-2.2) * std::pow(std::tanh(0.4), 2);
        CHECK(r.value == near(std::expm1(2 * std::log1p(per_blade))));
        CHECK(r.valid);
        CHECK(0.11308109601085898 <= r.value); // frozen exact chi^2 under it
        WidgetSpec opp = spec_of(WidgetFamily::Fan, 1.1, -0.4, 0, 2, 3);
        CHECK_FALSE(widget_chi2_bound(opp).valid); // lambda mu < 0
    }
    SUBCASE("clique minus edge") {
        WidgetSpec s = spec_of(WidgetFamily::CliqueMinusEdge, 0.8, 0.4, 5, 0);
        BoundResult r = widget_chi2_bound(s);
        CHECK(r.value ==
              near(16.0 * std::exp(-2.0 * 0.8 * 4) * std::pow(std::sinh(0.4), 2)));
        CHECK(r.valid); // lambda d = 4 > log 5
        CHECK(0.0023085755166166088 <= r.value);
        WidgetSpec cold = spec_of(WidgetFamily::CliqueMinusEdge, 0.1, 0.4, 5, 0);
        CHECK_FALSE(widget_chi2_bound(cold).valid); // lambda d < log d
    }
    SUBCASE("clique with hole, forward and reverse") {
        // the small frozen point violates 8(ell+1) <= d, so it is flagged
        WidgetSpec small = spec_of(WidgetFamily::CliqueWithHole, 1.2, 0.5, 7, 3);
        CHECK_FALSE(widget_chi2_bound(small).valid);
        auto rev = widget_chi2_bound_reverse(small);
        REQUIRE(rev.has_value());
        CHECK_FALSE(rev->valid); // 12(ell+1) <= d fails too

        WidgetSpec big = spec_of(WidgetFamily::CliqueWithHole, 0.5, 0.3, 24, 2);
        BoundResult rf = widget_chi2_bound(big);
        CHECK(rf.valid); // 8*3 <= 24, 0.5*24 > 3 log 24
        CHECK(rf.value ==
              near(32.0 * 2 * std::exp(-2.0 * 0.5 * 23) * std::pow(std::sinh(0.3), 2)));
        CHECK(widget_chi2_closed_form(big) <= rf.value);
        WidgetSpec big_rev = spec_of(WidgetFamily::CliqueWithHole, 0.5, 0.3, 36, 2);
        auto rr = widget_chi2_bound_reverse(big_rev);
        REQUIRE(rr.has_value());
        CHECK(rr->valid); // 12*3 <= 36
        CHECK(rr->value ==
              near(64.0 * 2 * std::exp(-2.0 * 0.5 * 35) * std::pow(std::sinh(0.6), 2)));
        CHECK(widget_chi2_closed_form_reverse(big_rev) <= rr->value);
        CHECK(rr->formula == "CliqueWithHole-reverse-chi2-bound");
    }
    SUBCASE("emmentaler families") {
        WidgetSpec e1 = spec_of(WidgetFamily::EmmentalerExtraNode, 1.0, 0.5, 12, 1);
        BoundResult r1 = widget_chi2_bound(e1);
        CHECK(r1.valid); // 4*2 <= 12, 1.0*8 >= 3 log 12, |mu| <= lambda
        CHECK(r1.value == near(32.0 * 12 * std::exp(-2.0 * 1.0 * 10)));
        CHECK(widget_chi2_closed_form(e1) <= r1.value);

        WidgetSpec e2 = spec_of(WidgetFamily::EmmentalerVsFull, 1.0, 0.5, 12, 1);
        BoundResult r2 = widget_chi2_bound(e2);
        CHECK(r2.valid);
        CHECK(r2.value == near(144.0 * std::min(1.0, 0.25 * 20736.0) *
                               std::exp(-2.0 * 1.0 * 10)));
        CHECK(widget_chi2_closed_form(e2) <= r2.value);

        // frozen tiny points violate 4(ell+1) <= d and are flagged
        CHECK_FALSE(
            widget_chi2_bound(spec_of(WidgetFamily::EmmentalerExtraNode, 1.5, 0.7, 6, 1))
                .valid);
        CHECK_FALSE(
            widget_chi2_bound(spec_of(WidgetFamily::EmmentalerVsFull, 1.5, 0.7, 6, 1))
                .valid);
    }
    SUBCASE("clique vs empty, frozen bounds") {
        WidgetSpec s = spec_of(WidgetFamily::CliqueVsEmpty, 0, 1.0 / 300.0, 8, 0);
        BoundResult r = widget_chi2_bound(s);
        CHECK(r.value == near(0.0056888888888888889)); // 8 (mu d)^2
        CHECK(r.valid);                                // 32 mu d <= 1
        CHECK(0.00031121080548154905 <= r.value);
        auto rev = widget_chi2_bound_reverse(s);
        REQUIRE(rev.has_value());
        CHECK(rev->value == near(0.0021333333333333333)); // 3 d^2 mu^2
        CHECK(rev->valid);
        CHECK(0.0003239746378261414 <= rev->value);

        WidgetSpec strong = spec_of(WidgetFamily::CliqueVsEmpty, 0, 0.05, 8, 0);
        CHECK_FALSE(widget_chi2_bound(strong).valid); // 32 mu d > 1
    }
    SUBCASE("reverse bounds exist only where stated") {
        CHECK_FALSE(widget_chi2_bound_reverse(spec_of(WidgetFamily::Triangle, 1, 0.3, 0, 0))
                        .has_value());
        CHECK_FALSE(
            widget_chi2_bound_reverse(spec_of(WidgetFamily::Fan, 1, 0.3, 0, 1, 2))
                .has_value());
        CHECK_FALSE(
            widget_chi2_bound_reverse(spec_of(WidgetFamily::SingleEdge, 0, 0.3, 0, 0))
                .has_value());
    }
}

TEST_CASE("lifted sample-complexity bounds") {
    WidgetSpec edge = spec_of(WidgetFamily::SingleEdge, 0, 0.1, 0, 0);

    SUBCASE("frozen value") {
        LiftedBounds lb = lifted_sample_bounds(edge, 127, 5);
        CHECK(lb.n_gof == near(63.027816565441318));
        CHECK(lb.kappa == near(0.010033377809537923)); // sinh^2(0.1)
        CHECK(lb.m == 63);
        CHECK(lb.t == 5);
        CHECK_FALSE(lb.valid); // t = 5 >= m/(16 e) ~ 1.45
        CHECK_FALSE(lb.condition.empty());
        // localisation count follows the same kappa
        CHECK(lb.n_eof ==
              near(std::log(63.0 / (4000.0 * 5)) / (2 * std::log1p(lb.kappa))));
    }
    SUBCASE("validity region") {
        // m = 500, t = 1: 1 < 500/(16 e) ~ 11.5
        CHECK(lifted_sample_bounds(edge, 1000, 1).valid);
        CHECK_FALSE(lifted_sample_bounds(edge, 1000, 12 * 1).valid);
    }
    SUBCASE("monotone in s and in kappa") {
        double prev = HUGE_VAL;
        for (int s = 1; s <= 10; ++s) {
            double n = lifted_sample_bounds(edge, 1000, s).n_gof;
            CHECK(n <= prev * (1 + 1e-12));
            prev = n;
        }
        WidgetSpec stronger = spec_of(WidgetFamily::SingleEdge, 0, 0.2, 0, 0);
        CHECK(lifted_sample_bounds(stronger, 1000, 5).n_gof <
              lifted_sample_bounds(edge, 1000, 5).n_gof);
        // bound-kappa equals exact kappa for the single edge (the bound is
        // an identity there)
        CHECK(lifted_sample_bounds(edge, 1000, 5, true).n_gof ==
              near(lifted_sample_bounds(edge, 1000, 5).n_gof));
    }
    SUBCASE("small-kappa linearization") {
        WidgetSpec tiny = spec_of(WidgetFamily::SingleEdge, 0, 1e-3, 0, 0);
        LiftedBounds lb = lifted_sample_bounds(tiny, 127, 1);
        double taylor = std::log1p(63.0 / 1.0) / (2 * lb.kappa);
        CHECK(lb.n_gof == doctest::Approx(taylor).epsilon(0.01));
    }
    SUBCASE("blocks grow with the widget") {
        WidgetSpec tri = spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0);
        LiftedBounds lb = lifted_sample_bounds(tri, 9, 2); // sigma = 1, nu = 3
        CHECK(lb.m == 3);
        CHECK(lb.t == 2);
        // hole widget with sigma = 3: s = 5 edits need t = ceil(5/3) = 2
        WidgetSpec hole = spec_of(WidgetFamily::CliqueWithHole, 0.5, 0.3, 24, 3);
        CHECK(lifted_sample_bounds(hole, 1000, 5).t == 2);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(lifted_sample_bounds(edge, 1, 1), parameter_error);
        CHECK_THROWS_AS(lifted_sample_bounds(edge, 127, 0), parameter_error);
        CHECK_THROWS_AS(lifted_sample_bounds(edge, 0, 1), parameter_error);
    }
}

TEST_CASE("two-point risk lower bound") {
    CHECK(lecam_risk_lower(0.0) == 1.0);
    CHECK(lecam_risk_lower(-0.5) == 1.0); // clamped chi^2
    CHECK(lecam_risk_lower(1e300) == 0.0);
    CHECK(lecam_risk_lower(std::expm1(0.5)) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = 1.0;
    for (double chi : {0.01, 0.1, 1.0, 10.0}) {
        double r = lecam_risk_lower(chi);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("verification grids") {
    SUBCASE("quick grid passes end to end") {
        std::vector<WidgetSpec> grid = quick_verification_grid();
        std::vector<VerificationRow> rows = verify_widget_bounds(grid);
        CHECK(rows.size() == 19); // reverse families add a second row
        for (const VerificationRow& r : rows) {
            CAPTURE(r.family);
            CAPTURE(r.lambda);
            CAPTURE(r.mu);
            CHECK(r.pass);
        }
        bool found = false;
        for (const VerificationRow& r : rows)
            if (r.family == "CliqueVsEmpty" && r.d == 8) {
                found = true;
                CHECK(r.bound == near(0.0056888888888888889));
                CHECK(r.exact_chi2 == near(0.00031121080548154905));
                CHECK(r.valid);
            }
        CHECK(found);
        bool found_rev = false;
        for (const VerificationRow& r : rows)
            if (r.family == "CliqueVsEmptyReverse" && r.d == 8) {
                found_rev = true;
                CHECK(r.bound == near(0.0021333333333333333));
                CHECK(r.exact_chi2 == near(0.0003239746378261414));
            }
        CHECK(found_rev);
    }
    SUBCASE("default grid is large enough") {
        CHECK(default_verification_grid().size() >= 200);
    }
    SUBCASE("CSV schema") {
        VerificationRow row;
        row.family = "SingleEdge";
        row.lambda = 0.0;
        row.mu = 0.5;
        row.exact_chi2 = 0.25;
        row.closed_form = 0.25;
        row.bound = 0.5;
        row.valid = true;
        row.pass = true;
        std::ostringstream out;
        write_verification_csv({row}, out);
        CHECK(out.str() ==
              "family,lambda,mu,d,ell,exact_chi2,closed_form,bound,valid,pass\n"
              "SingleEdge,0,0.5,0,0,0.25,0.25,0.5,1,1\n");
    }
}
