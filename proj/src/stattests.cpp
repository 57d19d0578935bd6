#include "ising/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ising/exact.hpp"
#include "ising/rng.hpp"

namespace ising {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

bool is_forest(const GraphStructure& g) {
    UnionFind uf(g.p);
    for (const auto& [i, j] : g.edges)
        if (!uf.unite(i, j)) return false;
    return true;
}

// Common magnitude of the nonzero couplings; throws if they differ.
double uniform_magnitude(const IsingModel& model, const GraphStructure& g,
                         const char* what) {
    double alpha = 0.0;
    for (const auto& [i, j] : g.edges) {
        const double a = std::fabs(model.at(i, j));
        if (alpha == 0.0) {
            alpha = a;
        } else if (a != alpha) {
            throw model_class_error(std::string(what) +
                                    ": couplings must share one magnitude");
        }
    }
    return alpha;
}

std::vector<int> edge_signs(const IsingModel& model, const GraphStructure& g) {
    std::vector<int> signs;
    signs.reserve(g.edges.size());
    for (const auto& [i, j] : g.edges)
        signs.push_back(model.at(i, j) > 0.0 ? 1 : -1);
    return signs;
}

void check_batch(const IsingModel& model, const SampleBatch& batch,
                 const char* what) {
    if (batch.p != model.p)
        throw dimension_error(std::string(what) +
                              ": batch and model node counts differ");
    if (batch.n < 1)
        throw parameter_error(std::string(what) + ": empty batch");
}

} // namespace

double statistic_T(const SampleBatch& batch, const GraphStructure& g) {
    if (batch.p != g.p)
        throw dimension_error("statistic_T: batch and graph node counts differ");
    if (batch.n < 1) throw parameter_error("statistic_T: empty batch");
    long long acc = 0;
    for (long long r = 0; r < batch.n; ++r) {
        const std::int8_t* row =
            batch.spins.data() + static_cast<std::size_t>(r) * batch.p;
        for (const auto& [i, j] : g.edges)
            acc += static_cast<int>(row[i]) * row[j];
    }
    return static_cast<double>(acc) / static_cast<double>(batch.n);
}

double statistic_T_signed(const SampleBatch& batch,
                          const std::vector<std::pair<int, int>>& edges,
                          const std::vector<int>& signs) {
    if (signs.size() != edges.size())
        throw parameter_error("statistic_T_signed: one sign per edge required");
    if (batch.n < 1) throw parameter_error("statistic_T_signed: empty batch");
    long long acc = 0;
    for (long long r = 0; r < batch.n; ++r) {
        const std::int8_t* row =
            batch.spins.data() + static_cast<std::size_t>(r) * batch.p;
        for (std::size_t e = 0; e < edges.size(); ++e)
            acc += signs[e] * row[edges[e].first] * row[edges[e].second];
    }
    return static_cast<double>(acc) / static_cast<double>(batch.n);
}

ForestMoments forest_moments(const IsingModel& model) {
    const GraphStructure g = network_structure(model);
    if (!is_forest(g))
        throw structure_error("forest_moments: model graph has a cycle");
    const double alpha = uniform_magnitude(model, g, "forest_moments");
    const double tau = std::tanh(alpha);
    const double k = static_cast<double>(g.edge_count());
    return {k * tau, k * (1.0 - tau * tau)};
}

ForestMoments forest_cross_moments(const IsingModel& p_model,
                                   const IsingModel& q_model) {
    if (p_model.p != q_model.p)
        throw dimension_error("forest_cross_moments: node counts differ");
    const GraphStructure gp = network_structure(p_model);
    const GraphStructure gq = network_structure(q_model);
    if (!is_forest(gp))
        throw structure_error("forest_cross_moments: P graph has a cycle");
    for (const auto& [i, j] : gq.edges)
        if (q_model.at(i, j) != p_model.at(i, j))
            throw structure_error(
                "forest_cross_moments: Q must be P with edges deleted");
    const double alpha =
        uniform_magnitude(p_model, gp, "forest_cross_moments");
    const double tau = std::tanh(alpha);
    // In a forest the bond variables X_i X_j over edges are independent, and
    // deleting an edge disconnects its endpoints, so a deleted edge's term is
    // a uniform +-1 sign: mean 0, variance 1, all covariances zero.
    const double k = static_cast<double>(gp.edge_count());
    const double s = k - static_cast<double>(gq.edge_count());
    return {(k - s) * tau, (k - s) * (1.0 - tau * tau) + s};
}

TestDecision forest_deletion_test(const IsingModel& p_model,
                                  const SampleBatch& batch, int s) {
    check_batch(p_model, batch, "forest_deletion_test");
    if (s < 0) throw parameter_error("forest_deletion_test: s must be >= 0");
    const GraphStructure g = network_structure(p_model);
    if (!is_forest(g))
        throw structure_error("forest_deletion_test: model graph has a cycle");
    const double alpha = uniform_magnitude(p_model, g, "forest_deletion_test");
    const double tau = std::tanh(alpha);
    const double t =
        statistic_T_signed(batch, g.edges, edge_signs(p_model, g));
    const double threshold =
        (static_cast<double>(g.edge_count()) - s / 2.0) * tau;
    return {t >= threshold, t, threshold, "forest-deletion", ""};
}

TestDecision tree_change_test(const IsingModel& p_model,
                              const SampleBatch& batch, int s) {
    check_batch(p_model, batch, "tree_change_test");
    if (s < 0) throw parameter_error("tree_change_test: s must be >= 0");
    const GraphStructure g = network_structure(p_model);
    if (!is_forest(g) ||
        g.edge_count() != static_cast<std::size_t>(p_model.p - 1))
        throw structure_error("tree_change_test: model graph is not a tree");
    const double alpha = uniform_magnitude(p_model, g, "tree_change_test");
    const double tau = std::tanh(alpha);
    const double t =
        statistic_T_signed(batch, g.edges, edge_signs(p_model, g));
    const double threshold = (p_model.p - 1) * tau -
                             s * tau * (1.0 - tau) / 4.0;
    return {t > threshold, t, threshold, "tree-change", ""};
}

TestDecision tolerant_forest_test(const IsingModel& p_model,
                                  const SampleBatch& batch, int s,
                                  double eps) {
    check_batch(p_model, batch, "tolerant_forest_test");
    if (s < 0) throw parameter_error("tolerant_forest_test: s must be >= 0");
    if (!(eps >= 0.0 && eps < 1.0))
        throw parameter_error("tolerant_forest_test: need 0 <= eps < 1");
    const GraphStructure g = network_structure(p_model);
    if (!is_forest(g))
        throw structure_error("tolerant_forest_test: model graph has a cycle");
    const double alpha =
        uniform_magnitude(p_model, g, "tolerant_forest_test");
    const double tau = std::tanh(alpha);
    const double t =
        statistic_T_signed(batch, g.edges, edge_signs(p_model, g));
    const double threshold =
        (static_cast<double>(g.edge_count()) - (1.0 + eps) * s / 2.0) * tau;
    return {t >= threshold, t, threshold, "tolerant-forest", ""};
}

TestDecision tolerant_tree_test(const IsingModel& p_model,
                                const SampleBatch& batch, int s, double eps) {
    check_batch(p_model, batch, "tolerant_tree_test");
    if (s < 0) throw parameter_error("tolerant_tree_test: s must be >= 0");
    const GraphStructure g = network_structure(p_model);
    if (!is_forest(g) ||
        g.edge_count() != static_cast<std::size_t>(p_model.p - 1))
        throw structure_error("tolerant_tree_test: model graph is not a tree");
    const double alpha = uniform_magnitude(p_model, g, "tolerant_tree_test");
    const double tau = std::tanh(alpha);
    if (!(eps >= 0.0 && eps < (1.0 - tau) / 2.0))
        throw parameter_error(
            "tolerant_tree_test: need 0 <= eps < (1 - tanh alpha)/2");
    const double t =
        statistic_T_signed(batch, g.edges, edge_signs(p_model, g));
    const double threshold = (p_model.p - 1) * tau -
                             ((1.0 + 2.0 * eps) / 4.0) * s * tau +
                             (s / 4.0) * tau * tau;
    return {t > threshold, t, threshold, "tolerant-tree", ""};
}

TestDecision ferro_deletion_test(const IsingModel& p_model,
                                 const SampleBatch& batch, int s,
                                 double gap_constant,
                                 std::optional<double> expected_statistic,
                                 int limit) {
    check_batch(p_model, batch, "ferro_deletion_test");
    if (s < 0) throw parameter_error("ferro_deletion_test: s must be >= 0");
    if (!(gap_constant > 0.0))
        throw parameter_error("ferro_deletion_test: gap constant must be > 0");
    const GraphStructure g = network_structure(p_model);
    double alpha = 0.0;
    for (const auto& [i, j] : g.edges) {
        const double w = p_model.at(i, j);
        if (w <= 0.0)
            throw model_class_error(
                "ferro_deletion_test: couplings must be positive");
        if (alpha == 0.0) {
            alpha = w;
        } else if (w != alpha) {
            throw model_class_error(
                "ferro_deletion_test: couplings must share one value");
        }
    }
    const int d = max_degree(g);
    if (alpha * d >= 1.0)
        throw model_class_error(
            "ferro_deletion_test: needs alpha * max_degree < 1");

    const double t = statistic_T(batch, g);
    double expected;
    std::string note;
    if (expected_statistic) {
        expected = *expected_statistic;
        note = "expected statistic supplied by caller";
    } else if (p_model.p <= std::min(limit, 30)) {
        const std::vector<double> mom = pair_moments(p_model, limit);
        expected = 0.0;
        for (const auto& [i, j] : g.edges)
            expected += mom[static_cast<std::size_t>(i) * p_model.p + j];
        note = "expected statistic from exact moments";
    } else {
        const long long m = std::max<long long>(10000, 100 * batch.n);
        const std::uint64_t cal_seed = stream_key(batch.seed, 0xca11bULL);
        SamplerConfig cfg;
        cfg.mode = SamplerMode::Glauber;
        cfg.burn_in = batch.burn_in > 0 ? batch.burn_in : 1600;
        cfg.seed = cal_seed;
        const SampleBatch calibration = sample(p_model, m, cfg, limit);
        expected = statistic_T(calibration, g);
        note = "calibration batch n=" + std::to_string(m) +
               " seed=" + std::to_string(cal_seed) +
               " burn_in=" + std::to_string(cfg.burn_in);
    }
    const double threshold = expected - gap_constant * s * alpha;
    return {t >= threshold, t, threshold, "ferro-deletion", note};
}

GraphStructure chow_liu_from_moments(int p,
                                     const std::vector<double>& moments) {
    if (p < 1) throw parameter_error("chow_liu: p must be >= 1");
    if (moments.size() != static_cast<std::size_t>(p) * p)
        throw dimension_error("chow_liu: moment matrix must be p x p");
    struct E {
        int i, j;
        double w;
    };
    std::vector<E> edges;
    edges.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            edges.push_back(
                {i, j, std::fabs(moments[static_cast<std::size_t>(i) * p + j])});
    std::sort(edges.begin(), edges.end(), [](const E& a, const E& b) {
        if (a.w != b.w) return a.w > b.w;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    UnionFind uf(p);
    GraphStructure out;
    out.p = p;
    for (const E& e : edges)
        if (uf.unite(e.i, e.j)) out.edges.emplace_back(e.i, e.j);
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

GraphStructure chow_liu(const SampleBatch& batch) {
    if (batch.n < 1) throw parameter_error("chow_liu: empty batch");
    const int p = batch.p;
    std::vector<long long> acc(static_cast<std::size_t>(p) * p, 0);
    for (long long r = 0; r < batch.n; ++r) {
        const std::int8_t* row =
            batch.spins.data() + static_cast<std::size_t>(r) * p;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                acc[static_cast<std::size_t>(i) * p + j] +=
                    static_cast<int>(row[i]) * row[j];
    }
    std::vector<double> moments(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double m = static_cast<double>(
                                 acc[static_cast<std::size_t>(i) * p + j]) /
                             static_cast<double>(batch.n);
            moments[static_cast<std::size_t>(i) * p + j] = m;
            moments[static_cast<std::size_t>(j) * p + i] = m;
        }
    return chow_liu_from_moments(p, moments);
}

TestDecision sl_based_gof(const IsingModel& p_model, const SampleBatch& batch,
                          int s) {
    check_batch(p_model, batch, "sl_based_gof");
    if (s < 0) throw parameter_error("sl_based_gof: s must be >= 0");
    const GraphStructure estimated = chow_liu(batch);
    const GraphStructure truth = network_structure(p_model);
    const double d =
        static_cast<double>(symmetric_difference(estimated, truth).edge_count());
    const double threshold = s / 2.0;
    return {d < threshold, d, threshold, "sl-gof", ""};
}

void write_decisions_csv(const std::vector<DecisionRow>& rows,
                         std::ostream& out) {
    out << "test,s,n,seed,statistic,threshold,verdict\n";
    char buf[128];
    for (const DecisionRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.statistic);
        out << r.test << "," << r.s << "," << r.n << "," << r.seed << ","
            << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.threshold);
        out << buf << "," << (r.is_null ? "null" : "alternate") << "\n";
    }
}

} // namespace ising
