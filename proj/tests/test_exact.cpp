#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "ising/exact.hpp"
#include "ising/model.hpp"
#include "ising/rng.hpp"

using namespace ising;

namespace {

// Closed-form values are frozen from an independent high-precision
// implementation; the enumeration reproduces them to a few ulps.
constexpr double kRel = 1e-12;

doctest::Approx near(double v) { return doctest::Approx(v).epsilon(kRel); }

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

IsingModel random_model(int p, double scale, std::uint64_t seed) {
    IsingModel m(p);
    SplitMix64 rng(seed);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (rng.uniform01() < 0.4)
                m.set_edge(i, j, scale * (2.0 * rng.uniform01() - 1.0));
    return m;
}

} // namespace

TEST_CASE("log partition: frozen closed-form values") {
    IsingModel edge(2);
    edge.set_edge(0, 1, 0.5);
    CHECK(log_partition(edge) == near(1.5064088680781681)); // ln(4 cosh 0.5)

    CHECK(log_partition(IsingModel(3)) == near(2.0794415416798359)); // ln 8

    WidgetPair tri = build_widget(spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0));
    CHECK(log_partition(tri.alt_model) == near(3.1474659565303141));
    CHECK(log_partition(tri.null_model) == near(2.9470032026458903)); // ln(8 cosh^2 1)
}

TEST_CASE("log partition: sandwich bound and invariances") {
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        IsingModel m = random_model(9, 0.8, seed);
        double lz = log_partition(m);
        double total = 0.0;
        for (int i = 0; i < m.p; ++i)
            for (int j = i + 1; j < m.p; ++j) total += std::fabs(m.at(i, j));
        CHECK(std::fabs(lz - m.p * std::log(2.0)) <= total + 1e-12);
        CHECK(log_partition_serial(m) == near(lz));
    }

    SUBCASE("relabeling nodes leaves the value unchanged") {
        IsingModel m = random_model(8, 0.6, 42);
        std::vector<int> perm = {3, 7, 1, 0, 6, 2, 5, 4};
        IsingModel q(8);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                if (m.at(i, j) != 0.0) q.set_edge(perm[i], perm[j], m.at(i, j));
        CHECK(log_partition(q) == near(log_partition(m)));
    }

    SUBCASE("value is bit-identical across thread counts") {
        IsingModel m = random_model(12, 0.7, 99);
        setenv("ISING_THREADS", "1", 1);
        double v1 = log_partition(m);
        auto mom1 = pair_moments(m);
        setenv("ISING_THREADS", "3", 1);
        double v3 = log_partition(m);
        auto mom3 = pair_moments(m);
        unsetenv("ISING_THREADS");
        CHECK(v1 == v3); // exact equality by construction
        CHECK(mom1 == mom3);
    }
}

TEST_CASE("enumeration capacity checks") {
    CHECK_THROWS_AS(log_partition(random_model(8, 0.5, 1), 6), capacity_error);
    CHECK_THROWS_AS(pair_moments(random_model(8, 0.5, 1), 6), capacity_error);
    CHECK_THROWS_AS(exact_distribution(random_model(8, 0.5, 1), 6), capacity_error);
    IsingModel big(23); // above the default enumeration limit
    CHECK_THROWS_AS(log_partition(big), capacity_error);
    // the limit argument cannot push enumeration past 30 nodes
    IsingModel huge(31);
    CHECK_THROWS_AS(log_partition(huge, 40), capacity_error);
}

TEST_CASE("pair moments: frozen values and structure") {
    WidgetPair tri = build_widget(spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0));
    auto mom = pair_moments(tri.alt_model);
    REQUIRE(mom.size() == 9);
    CHECK(mom[0 * 3 + 1] == near(0.84130230653573528));
    CHECK(mom[1 * 3 + 2] == near(0.84130230653573528));
    CHECK(mom[0 * 3 + 2] == near(0.7453905343031166));
    for (int i = 0; i < 3; ++i) CHECK(mom[i * 3 + i] == 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(mom[i * 3 + j] == mom[j * 3 + i]);

    // path correlations factor into tanh products
    IsingModel path(3);
    path.set_edge(0, 1, 0.3);
    path.set_edge(1, 2, 0.3);
    auto pm = pair_moments(path);
    CHECK(pm[0 * 3 + 2] == near(0.084863038173370797)); // tanh(0.3)^2
    CHECK(pm[0 * 3 + 1] == near(std::tanh(0.3)));

    auto serial = pair_moments_serial(tri.alt_model);
    for (std::size_t k = 0; k < mom.size(); ++k)
        CHECK(serial[k] == near(mom[k]));
}

TEST_CASE("exact distribution of a single edge") {
    IsingModel edge(2);
    edge.set_edge(0, 1, 0.5);
    auto dist = exact_distribution(edge);
    REQUIRE(dist.size() == 4);
    double z = 4.0 * std::cosh(0.5);
    CHECK(dist[0b00] == near(std::exp(0.5) / z)); // both -1: aligned
    CHECK(dist[0b11] == near(std::exp(0.5) / z));
    CHECK(dist[0b01] == near(std::exp(-0.5) / z));
    CHECK(dist[0b10] == near(std::exp(-0.5) / z));
    CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == near(1.0));
}

TEST_CASE("chi-square: identity mode, direct mode, frozen values") {
    WidgetPair tri = build_widget(spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0));
    double chi = chi_square(tri.alt_model, tri.null_model);
    CHECK(chi == near(0.041209717855703137));
    CHECK(chi_square_direct(tri.alt_model, tri.null_model) == near(chi));

    WidgetPair edge = build_widget(spec_of(WidgetFamily::SingleEdge, 0.0, 0.5, 0, 0));
    CHECK(chi_square(edge.alt_model, edge.null_model) ==
          near(0.27154031740762189)); // sinh(0.5)^2

    SUBCASE("chi^2(P || P) = 0") {
        IsingModel m = random_model(7, 0.5, 5);
        CHECK(std::fabs(chi_square(m, m)) <= 1e-12);
    }
    SUBCASE("modes agree on random pairs") {
        for (std::uint64_t seed : {21ULL, 22ULL}) {
            IsingModel q = random_model(8, 0.5, seed);
            IsingModel p = random_model(8, 0.5, seed + 100);
            double a = chi_square(q, p);
            double b = chi_square_direct(q, p);
            CHECK(b == doctest::Approx(a).epsilon(1e-11));
        }
    }
    SUBCASE("node counts must agree") {
        CHECK_THROWS_AS(chi_square(IsingModel(3), IsingModel(4)), dimension_error);
        CHECK_THROWS_AS(chi_square_direct(IsingModel(3), IsingModel(4)),
                        dimension_error);
    }
}

TEST_CASE("tensorization") {
    CHECK(tensorize(0.25, 1) == 0.25);
    CHECK(tensorize(0.0, 1000000) == 0.0);
    CHECK(tensorize(0.25, 0) == 0.0);
    CHECK(tensorize(0.3, 2) == near(0.3 * 2 + 0.09)); // (1+k)^2 - 1
    // tiny kappa, huge n: expm1/log1p path keeps full precision
    CHECK(tensorize(1e-12, 1000000) == near(std::expm1(1e6 * std::log1p(1e-12))));
    CHECK_THROWS_AS(tensorize(0.5, -1), parameter_error);
    CHECK_THROWS_AS(tensorize(-1.0, 2), parameter_error);
}

TEST_CASE("log binomial") {
    CHECK(log_binomial(6, 3) == near(std::log(20.0)));
    CHECK(log_binomial(52, 5) == near(std::log(2598960.0)));
    CHECK(log_binomial(5, 0) == 0.0);
    CHECK(log_binomial(5, 7) == -HUGE_VAL); // impossible choice has zero weight
    CHECK_THROWS_AS(log_binomial(-1, 0), parameter_error);
}

TEST_CASE("mixture chi-square: frozen value and enumeration cross-check") {
    WidgetPair edge = build_widget(spec_of(WidgetFamily::SingleEdge, 0.0, 0.7, 0, 0));

    SUBCASE("single edge, p = 6, t = 1, n = 1") {
        ChangeEnsemble ens = lift(edge, 6, 1);
        MixtureChi2 mix = mixture_chi_square(ens, 1);
        CHECK(mix.value == near(0.19181641089885676)); // sinh(0.7)^2 / 3
        CHECK(mix.block_chi2 == near(3 * 0.19181641089885676));
        CHECK(mix.value <= mix.binomial_bound * (1 + 1e-12));
        CHECK(mixture_chi_square_enumerated(ens, 1) == near(mix.value));
    }
    SUBCASE("more blocks switched, more samples") {
        ChangeEnsemble ens2 = lift(edge, 6, 2);
        for (int n : {1, 2, 3}) {
            MixtureChi2 mix = mixture_chi_square(ens2, n);
            double enumerated = mixture_chi_square_enumerated(ens2, n);
            CHECK(enumerated == doctest::Approx(mix.value).epsilon(1e-10));
            CHECK(mix.value <= mix.binomial_bound * (1 + 1e-12));
            CHECK(mix.block_chi2 == near(tensorize(
                chi_square(ens2.block_alt, ens2.block_null), n)));
        }
    }
    SUBCASE("triangle blocks") {
        WidgetPair tri = build_widget(spec_of(WidgetFamily::Triangle, 0.6, 0.4, 0, 0));
        ChangeEnsemble ens = lift(tri, 6, 1);
        for (int n : {1, 2, 3}) {
            MixtureChi2 mix = mixture_chi_square(ens, n);
            CHECK(mixture_chi_square_enumerated(ens, n) ==
                  doctest::Approx(mix.value).epsilon(1e-10));
        }
    }
    SUBCASE("monotone in n") {
        ChangeEnsemble ens = lift(edge, 8, 2);
        double prev = 0.0;
        for (int n = 1; n <= 6; ++n) {
            double v = mixture_chi_square(ens, n).value;
            CHECK(v >= prev);
            prev = v;
        }
    }
    SUBCASE("parameter validation") {
        ChangeEnsemble ens = lift(edge, 6, 1);
        CHECK_THROWS_AS(mixture_chi_square(ens, 0), parameter_error);
        ChangeEnsemble shared = two_layer_star_ensemble(7, 0.2, 1);
        CHECK_THROWS_AS(mixture_chi_square(shared, 1), model_class_error);
        CHECK_THROWS_AS(mixture_chi_square_enumerated(ens, 5), capacity_error);
    }
}

TEST_CASE("clique partition sums: frozen values and enumeration certificates") {
    CHECK(clique_partition_sum(6, 1.0, 2, 0) == near(1.0000307443007267));
    CHECK(clique_partition_sum(6, 1.0, 2, 1) == near(2.0034775105260917));
    CHECK(std::exp(log_clique_partition_sum(6, 1.0, 2, 1)) ==
          near(clique_partition_sum(6, 1.0, 2, 1)));
    CHECK_THROWS_AS(log_clique_partition_sum(6, 1.0, 2, 3), parameter_error);

    SUBCASE("special-edge clique matches enumeration") {
        for (double w : {0.4, 0.0, -0.3}) {
            IsingModel m(6);
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) m.set_edge(i, j, 0.8);
            m.set_edge(0, 1, w);
            CHECK(log_partition_clique_special_edge(5, 0.8, w) ==
                  near(log_partition(m)));
        }
        CHECK_THROWS_AS(log_partition_clique_special_edge(1, 0.8, 0.1),
                        parameter_error);
    }
    SUBCASE("clique with hole matches enumeration") {
        IsingModel m(8);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                m.set_edge(i, j, (i < 3 && j < 3) ? 0.5 : 1.2);
        CHECK(log_partition_clique_with_hole(7, 3, 1.2, 0.5) ==
              near(log_partition(m)));
        // a hole of weight lambda is just the clique
        IsingModel c(8);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) c.set_edge(i, j, 1.2);
        CHECK(log_partition_clique_with_hole(7, 3, 1.2, 1.2) ==
              near(log_partition(c)));
        CHECK_THROWS_AS(log_partition_clique_with_hole(7, 1, 1.2, 0.5),
                        parameter_error);
    }
    SUBCASE("multipartite models match enumeration") {
        // d = 6 nodes in 3 groups of 2: cross-group lambda, within-group w
        WidgetPair w2 = build_widget(
            spec_of(WidgetFamily::EmmentalerVsFull, 1.5, 0.7, 6, 1));
        CHECK(log_partition_multipartite(6, 1, 1.5, 0.0) ==
              near(log_partition(w2.null_model)));
        CHECK(log_partition_multipartite(6, 1, 1.5, 0.7) ==
              near(log_partition(w2.alt_model)));

        WidgetPair w1 = build_widget(
            spec_of(WidgetFamily::EmmentalerExtraNode, 1.5, 0.7, 6, 1));
        CHECK(log_partition_multipartite_extra(6, 1, 1.5, 0.0) ==
              near(log_partition(w1.null_model)));
        CHECK(log_partition_multipartite_extra(6, 1, 1.5, 0.7) ==
              near(log_partition(w1.alt_model)));
        CHECK_THROWS_AS(log_partition_multipartite(7, 1, 1.0, 0.5), parameter_error);
        CHECK_THROWS_AS(log_partition_multipartite(54, 1, 1.0, 0.5), capacity_error);
    }
    SUBCASE("uniform clique matches enumeration") {
        IsingModel c(8);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) c.set_edge(i, j, 1.0 / 300.0);
        CHECK(log_partition_clique(8, 1.0 / 300.0) == near(log_partition(c)));
        CHECK(log_partition_clique(1, 0.3) == near(std::log(2.0)));
    }
}

TEST_CASE("log-linear family chi-square") {
    // Z(x) = e^{xs} + 1 gives chi^2 = sinh^2(s/2)
    std::vector<double> logw = {0.0, 0.0};
    std::vector<double> shift = {1.0, 0.0};
    CHECK(log_linear_family_chi2(logw, shift) == near(0.27154031740762189));
    // any single-term family is shift-invariant after normalization
    CHECK(std::fabs(log_linear_family_chi2({2.5}, {0.7})) <= 1e-14);
    CHECK_THROWS_AS(log_linear_family_chi2({0.0}, {0.0, 1.0}), parameter_error);
}

TEST_CASE("widget closed forms: frozen values") {
    CHECK(widget_chi2_closed_form(spec_of(WidgetFamily::SingleEdge, 0, 0.5, 0, 0)) ==
          near(0.27154031740762189));
    CHECK(widget_chi2_closed_form(spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0)) ==
          near(0.041209717855703137));
    CHECK(widget_chi2_closed_form(spec_of(WidgetFamily::Fan, 1.1, 0.4, 0, 2, 3)) ==
          near(0.11308109601085898));
    CHECK(widget_chi2_closed_form(
              spec_of(WidgetFamily::CliqueMinusEdge, 0.8, 0.4, 5, 0)) ==
          near(0.0023085755166166088));
    CHECK(widget_chi2_closed_form(
              spec_of(WidgetFamily::CliqueWithHole, 1.2, 0.5, 7, 3)) ==
          near(0.00010182908283717893));
    CHECK(widget_chi2_closed_form_reverse(
              spec_of(WidgetFamily::CliqueWithHole, 1.2, 0.5, 7, 3)) ==
          near(1.3781507072733671e-5));
    CHECK(widget_chi2_closed_form(
              spec_of(WidgetFamily::EmmentalerExtraNode, 1.5, 0.7, 6, 1)) ==
          near(1.240119890900045e-5));
    CHECK(widget_chi2_closed_form(
              spec_of(WidgetFamily::EmmentalerVsFull, 1.5, 0.7, 6, 1)) ==
          near(2.1145383222392114e-5));
    CHECK(widget_chi2_closed_form(
              spec_of(WidgetFamily::CliqueVsEmpty, 0, 1.0 / 300.0, 8, 0)) ==
          near(0.00031121080548154905));
    CHECK(widget_chi2_closed_form_reverse(
              spec_of(WidgetFamily::CliqueVsEmpty, 0, 1.0 / 300.0, 8, 0)) ==
          near(0.0003239746378261414));
}

TEST_CASE("widget closed forms match enumeration") {
    std::vector<WidgetSpec> specs = {
        spec_of(WidgetFamily::SingleEdge, 0, -1.2, 0, 0),
        spec_of(WidgetFamily::Triangle, 1.8, -1.8, 0, 0), // frustrated closing edge
        spec_of(WidgetFamily::Triangle, 0.5, 0.5, 0, 0),
        spec_of(WidgetFamily::Fan, 0.5, 1.0, 0, 1, 2),
        spec_of(WidgetFamily::Fan, 2.0, -0.5, 0, 3, 3),
        spec_of(WidgetFamily::CliqueMinusEdge, 1.5, -0.5, 8, 0),
        spec_of(WidgetFamily::CliqueWithHole, 0.8, 0.4, 9, 2),
        spec_of(WidgetFamily::EmmentalerExtraNode, 1.0, -0.6, 12, 2),
        spec_of(WidgetFamily::EmmentalerVsFull, 1.0, 0.5, 12, 3),
        spec_of(WidgetFamily::CliqueVsEmpty, 0, -0.01, 12, 0),
    };
    for (const WidgetSpec& s : specs) {
        CAPTURE(family_name(s.family));
        WidgetPair w = build_widget(s);
        double closed = widget_chi2_closed_form(s);
        double exact = chi_square(w.alt_model, w.null_model);
        CHECK(std::fabs(closed - exact) <=
              1e-9 * std::max({1.0, std::fabs(closed), std::fabs(exact)}) + 1e-13);
        if (widget_has_reverse_form(s.family)) {
            double rc = widget_chi2_closed_form_reverse(s);
            double re = chi_square(w.null_model, w.alt_model);
            CHECK(std::fabs(rc - re) <=
                  1e-9 * std::max({1.0, std::fabs(rc), std::fabs(re)}) + 1e-13);
        }
    }
    CHECK(widget_has_reverse_form(WidgetFamily::CliqueWithHole));
    CHECK(widget_has_reverse_form(WidgetFamily::CliqueVsEmpty));
    CHECK_FALSE(widget_has_reverse_form(WidgetFamily::Triangle));
    CHECK_FALSE(widget_has_reverse_form(WidgetFamily::Fan));
    CHECK_THROWS_AS(widget_chi2_closed_form_reverse(
                        spec_of(WidgetFamily::Triangle, 1.0, 0.3, 0, 0)),
                    parameter_error);
}
