#include "ising/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ising/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ising {

int max_threads() {
#ifdef _OPENMP
    int cap = omp_get_max_threads();
#else
    int cap = 1;
#endif
    if (const char* env = std::getenv("ISING_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw parameter_error("ISING_THREADS must be a positive integer");
        // The variable pins the team size exactly: it can shrink the default
        // or oversubscribe, which is how the determinism-under-threading
        // tests exercise multi-thread schedules on small machines.
        cap = static_cast<int>(v);
    }
    return cap < 1 ? 1 : cap;
}

IsingModel::IsingModel(int nodes) : p(nodes) {
    if (nodes < 1)
        throw parameter_error("model needs at least one node");
    theta.assign(static_cast<std::size_t>(nodes) * nodes, 0.0);
}

void IsingModel::set_edge(int i, int j, double w) {
    if (i < 0 || j < 0 || i >= p || j >= p)
        throw parameter_error("edge endpoint out of range");
    if (i == j)
        throw parameter_error("self-loops are not allowed");
    if (!std::isfinite(w))
        throw parameter_error("edge weight must be finite");
    theta[static_cast<std::size_t>(i) * p + j] = w;
    theta[static_cast<std::size_t>(j) * p + i] = w;
}

bool GraphStructure::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

GraphStructure network_structure(const IsingModel& model, double zero_tol) {
    GraphStructure g;
    g.p = model.p;
    for (int i = 0; i < model.p; ++i)
        for (int j = i + 1; j < model.p; ++j)
            if (std::fabs(model.at(i, j)) > zero_tol)
                g.edges.emplace_back(i, j);
    return g;
}

GraphStructure symmetric_difference(const GraphStructure& a, const GraphStructure& b) {
    if (a.p != b.p)
        throw dimension_error("symmetric difference needs equal node counts");
    GraphStructure out;
    out.p = a.p;
    std::set_symmetric_difference(a.edges.begin(), a.edges.end(),
                                  b.edges.begin(), b.edges.end(),
                                  std::back_inserter(out.edges));
    return out;
}

int max_degree(const GraphStructure& g) {
    std::vector<int> deg(g.p, 0);
    for (const auto& [i, j] : g.edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

const char* family_name(WidgetFamily f) {
    switch (f) {
        case WidgetFamily::SingleEdge: return "SingleEdge";
        case WidgetFamily::Triangle: return "Triangle";
        case WidgetFamily::Fan: return "Fan";
        case WidgetFamily::CliqueMinusEdge: return "CliqueMinusEdge";
        case WidgetFamily::CliqueWithHole: return "CliqueWithHole";
        case WidgetFamily::EmmentalerExtraNode: return "EmmentalerExtraNode";
        case WidgetFamily::EmmentalerVsFull: return "EmmentalerVsFull";
        case WidgetFamily::CliqueVsEmpty: return "CliqueVsEmpty";
    }
    return "?";
}

WidgetFamily family_from_name(const std::string& name) {
    for (WidgetFamily f : {WidgetFamily::SingleEdge, WidgetFamily::Triangle,
                           WidgetFamily::Fan, WidgetFamily::CliqueMinusEdge,
                           WidgetFamily::CliqueWithHole,
                           WidgetFamily::EmmentalerExtraNode,
                           WidgetFamily::EmmentalerVsFull,
                           WidgetFamily::CliqueVsEmpty})
        if (name == family_name(f)) return f;
    throw parameter_error("unknown widget family: " + name);
}

namespace {

void require(bool ok, const std::string& condition) {
    if (!ok) throw construction_error("widget construction requires " + condition);
}

// Groups of size ell+1 over nodes 0..d-1; group g covers
// [g(ell+1), (g+1)(ell+1)).
void add_multipartite_edges(IsingModel& model, int d, int ell, double lambda) {
    int g = ell + 1;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (i / g != j / g) model.set_edge(i, j, lambda);
}

} // namespace

int widget_nodes(const WidgetSpec& spec) {
    switch (spec.family) {
        case WidgetFamily::SingleEdge: return 2;
        case WidgetFamily::Triangle: return 3;
        case WidgetFamily::Fan: return 2 * spec.blades + 1;
        case WidgetFamily::CliqueMinusEdge: return spec.d + 1;
        case WidgetFamily::CliqueWithHole: return spec.d + 1;
        case WidgetFamily::EmmentalerExtraNode: return spec.d + 1;
        case WidgetFamily::EmmentalerVsFull: return spec.d;
        case WidgetFamily::CliqueVsEmpty: return spec.d;
    }
    return 0;
}

int widget_sigma(const WidgetSpec& spec) {
    switch (spec.family) {
        case WidgetFamily::SingleEdge: return 1;
        case WidgetFamily::Triangle: return 1;
        case WidgetFamily::Fan: return spec.ell;
        case WidgetFamily::CliqueMinusEdge: return 1;
        case WidgetFamily::CliqueWithHole: return spec.ell * (spec.ell - 1) / 2;
        case WidgetFamily::EmmentalerExtraNode: return spec.ell + 1;
        case WidgetFamily::EmmentalerVsFull: return spec.d * spec.ell / 2;
        case WidgetFamily::CliqueVsEmpty: return spec.d * (spec.d - 1) / 2;
    }
    return 0;
}

WidgetPair build_widget(const WidgetSpec& spec) {
    WidgetPair out;
    switch (spec.family) {
        case WidgetFamily::SingleEdge: {
            require(spec.mu != 0.0, "mu != 0");
            out.null_model = IsingModel(2);
            out.null_model.set_edge(0, 1, spec.mu);
            out.alt_model = IsingModel(2);
            break;
        }
        case WidgetFamily::Triangle: {
            require(spec.mu != 0.0, "mu != 0");
            out.null_model = IsingModel(3);
            out.null_model.set_edge(0, 1, spec.lambda);
            out.null_model.set_edge(1, 2, spec.lambda);
            out.alt_model = out.null_model;
            out.alt_model.set_edge(0, 2, spec.mu);
            break;
        }
        case WidgetFamily::Fan: {
            int B = spec.blades;
            require(B >= 1, "blades >= 1");
            require(spec.ell >= 1 && spec.ell <= B, "1 <= ell <= blades");
            require(spec.mu != 0.0, "mu != 0");
            int c = 2 * B; // hub
            IsingModel full(2 * B + 1);
            for (int b = 0; b < B; ++b) {
                int odd = 2 * b, even = 2 * b + 1;
                full.set_edge(odd, even, spec.lambda);
                full.set_edge(even, c, spec.lambda);
                full.set_edge(odd, c, spec.mu);
            }
            out.alt_model = full;
            out.null_model = full;
            for (int b = 0; b < spec.ell; ++b)
                out.null_model.set_edge(2 * b, c, 0.0);
            break;
        }
        case WidgetFamily::CliqueMinusEdge: {
            require(spec.d >= 2, "d >= 2");
            require(spec.mu != 0.0, "mu != 0");
            IsingModel null_model(spec.d + 1);
            for (int i = 0; i <= spec.d; ++i)
                for (int j = i + 1; j <= spec.d; ++j)
                    null_model.set_edge(i, j, spec.lambda);
            null_model.set_edge(0, 1, spec.mu);
            out.alt_model = null_model;
            out.alt_model.set_edge(0, 1, 0.0);
            out.null_model = std::move(null_model);
            break;
        }
        case WidgetFamily::CliqueWithHole: {
            require(spec.d >= 3, "d >= 3");
            require(spec.ell >= 2 && spec.ell <= spec.d - 1, "2 <= ell <= d-1");
            require(spec.mu != 0.0, "mu != 0");
            IsingModel null_model(spec.d + 1);
            for (int i = 0; i <= spec.d; ++i)
                for (int j = i + 1; j <= spec.d; ++j)
                    null_model.set_edge(i, j, spec.lambda);
            for (int i = 0; i < spec.ell; ++i)
                for (int j = i + 1; j < spec.ell; ++j)
                    null_model.set_edge(i, j, spec.mu);
            out.alt_model = null_model;
            for (int i = 0; i < spec.ell; ++i)
                for (int j = i + 1; j < spec.ell; ++j)
                    out.alt_model.set_edge(i, j, 0.0);
            out.null_model = std::move(null_model);
            break;
        }
        case WidgetFamily::EmmentalerExtraNode: {
            int g = spec.ell + 1;
            require(spec.ell >= 1, "ell >= 1");
            require(spec.d >= 2 * g && spec.d % g == 0,
                    "d a multiple of ell+1 with at least two groups");
            require(spec.mu != 0.0, "mu != 0");
            int B = spec.d / g;
            IsingModel null_model(spec.d + 1);
            add_multipartite_edges(null_model, spec.d, spec.ell, spec.lambda);
            int extra = spec.d;
            for (int v = 0; v < (B - 1) * g; ++v)
                null_model.set_edge(v, extra, spec.lambda);
            out.alt_model = null_model;
            for (int v = (B - 1) * g; v < spec.d; ++v)
                out.alt_model.set_edge(v, extra, spec.mu);
            out.null_model = std::move(null_model);
            break;
        }
        case WidgetFamily::EmmentalerVsFull: {
            int g = spec.ell + 1;
            require(spec.ell >= 1, "ell >= 1");
            require(spec.d >= 2 * g && spec.d % g == 0,
                    "d a multiple of ell+1 with at least two groups");
            require(spec.mu != 0.0, "mu != 0");
            IsingModel null_model(spec.d);
            add_multipartite_edges(null_model, spec.d, spec.ell, spec.lambda);
            out.alt_model = null_model;
            for (int i = 0; i < spec.d; ++i)
                for (int j = i + 1; j < spec.d; ++j)
                    if (i / g == j / g) out.alt_model.set_edge(i, j, spec.mu);
            out.null_model = std::move(null_model);
            break;
        }
        case WidgetFamily::CliqueVsEmpty: {
            require(spec.d >= 2, "d >= 2");
            require(spec.mu != 0.0, "mu != 0");
            out.null_model = IsingModel(spec.d);
            for (int i = 0; i < spec.d; ++i)
                for (int j = i + 1; j < spec.d; ++j)
                    out.null_model.set_edge(i, j, spec.mu);
            out.alt_model = IsingModel(spec.d);
            break;
        }
    }
    out.sigma = widget_sigma(spec);
    return out;
}

ChangeEnsemble lift(const WidgetPair& widget, int p, int t) {
    int nu = widget.null_model.p;
    if (widget.alt_model.p != nu)
        throw dimension_error("widget null/alternate node counts differ");
    int m = p / nu;
    if (m < 1)
        throw parameter_error("p too small to hold one block");
    if (t < 1 || t > m)
        throw parameter_error("need 1 <= t <= m switched blocks");

    ChangeEnsemble ens;
    ens.block_null = widget.null_model;
    ens.block_alt = widget.alt_model;
    ens.nu = nu;
    ens.m = m;
    ens.t = t;
    ens.sigma = widget.sigma;
    ens.product_form = true;

    IsingModel base(p);
    for (int b = 0; b < m; ++b)
        for (int i = 0; i < nu; ++i)
            for (int j = i + 1; j < nu; ++j)
                if (double w = widget.null_model.at(i, j); w != 0.0)
                    base.set_edge(b * nu + i, b * nu + j, w);
    ens.base = base;

    IsingModel alt_block = widget.alt_model;
    ens.make_alternate = [base, alt_block, nu](const std::vector<int>& blocks) {
        IsingModel q = base;
        for (int b : blocks) {
            for (int i = 0; i < nu; ++i)
                for (int j = i + 1; j < nu; ++j)
                    q.set_edge(b * nu + i, b * nu + j, alt_block.at(i, j));
        }
        return q;
    };
    return ens;
}

TreeShape tree_shape_from_name(const std::string& name) {
    if (name == "complete-binary") return TreeShape::CompleteBinary;
    if (name == "star") return TreeShape::Star;
    if (name == "path") return TreeShape::Path;
    if (name == "two-layer-star") return TreeShape::TwoLayerStar;
    throw parameter_error("unknown tree family: " + name);
}

const char* tree_shape_name(TreeShape shape) {
    switch (shape) {
        case TreeShape::CompleteBinary: return "complete-binary";
        case TreeShape::Star: return "star";
        case TreeShape::Path: return "path";
        case TreeShape::TwoLayerStar: return "two-layer-star";
    }
    return "?";
}

IsingModel build_uniform_tree(TreeShape shape, int p, double alpha) {
    if (p < 2)
        throw parameter_error("tree needs at least 2 nodes");
    IsingModel model(p);
    switch (shape) {
        case TreeShape::CompleteBinary: {
            // p must be 2^h - 1
            if ((static_cast<unsigned>(p) & static_cast<unsigned>(p + 1)) != 0)
                throw construction_error("complete binary tree needs p = 2^h - 1");
            for (int i = 0; 2 * i + 1 < p; ++i) {
                model.set_edge(i, 2 * i + 1, alpha);
                if (2 * i + 2 < p) model.set_edge(i, 2 * i + 2, alpha);
            }
            break;
        }
        case TreeShape::Star:
            for (int i = 1; i < p; ++i) model.set_edge(0, i, alpha);
            break;
        case TreeShape::Path:
            for (int i = 0; i + 1 < p; ++i) model.set_edge(i, i + 1, alpha);
            break;
        case TreeShape::TwoLayerStar: {
            if (p % 2 == 0 || p < 3)
                throw construction_error("two-layer star needs odd p >= 3");
            int m = (p - 1) / 2, center = p - 1;
            for (int i = 0; i < m; ++i) {
                model.set_edge(center, i, alpha);
                model.set_edge(i, m + i, alpha);
            }
            break;
        }
    }
    return model;
}

ChangeEnsemble two_layer_star_ensemble(int p, double alpha, int t) {
    IsingModel base = build_uniform_tree(TreeShape::TwoLayerStar, p, alpha);
    int m = (p - 1) / 2, center = p - 1;
    if (t < 1 || t > m)
        throw parameter_error("need 1 <= t <= m switched blocks");

    ChangeEnsemble ens;
    ens.base = base;
    ens.nu = 2;
    ens.m = m;
    ens.t = t;
    ens.sigma = 2;
    ens.product_form = false; // blocks share the center node
    ens.make_alternate = [base, m, center, alpha](const std::vector<int>& blocks) {
        IsingModel q = base;
        for (int i : blocks) {
            q.set_edge(center, i, 0.0);
            q.set_edge(center, m + i, alpha);
        }
        return q;
    };
    return ens;
}

IsingModel random_edge_deletion(const IsingModel& model, int s, std::uint64_t seed) {
    GraphStructure g = network_structure(model);
    if (s < 0 || static_cast<std::size_t>(s) > g.edges.size())
        throw parameter_error("cannot delete more edges than the model has");
    SplitMix64 rng(stream_key(seed, 0xDE1E7EULL));
    // Partial Fisher-Yates: the first s slots end up a uniform s-subset.
    std::vector<std::size_t> idx(g.edges.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    IsingModel out = model;
    for (int k = 0; k < s; ++k) {
        std::size_t pick = k + rng.below(idx.size() - k);
        std::swap(idx[k], idx[pick]);
        const auto& [i, j] = g.edges[idx[k]];
        out.set_edge(i, j, 0.0);
    }
    return out;
}

void write_model(const IsingModel& model, std::ostream& out) {
    out << "# ising model: p, then one 'i j theta_ij' line per edge (1-based)\n";
    out << model.p << "\n";
    char buf[64];
    for (int i = 0; i < model.p; ++i)
        for (int j = i + 1; j < model.p; ++j)
            if (model.at(i, j) != 0.0) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g", i + 1, j + 1,
                              model.at(i, j));
                out << buf << "\n";
            }
}

void write_model_file(const IsingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open for writing: " + path);
    write_model(model, out);
}

IsingModel read_model(std::istream& in) {
    std::string line;
    int p = -1;
    IsingModel model;
    std::vector<bool> seen;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (p < 0) {
            if (ls >> p) {
                if (p < 1) throw parameter_error("model file: p must be >= 1");
                model = IsingModel(p);
                seen.assign(static_cast<std::size_t>(p) * p, false);
            } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
                throw parameter_error("model file: first data line must be p");
            }
            continue;
        }
        int i, j;
        double w;
        if (ls >> i >> j >> w) {
            if (i < 1 || j < 1 || i > p || j > p || i == j)
                throw parameter_error("model file: bad edge endpoints");
            if (i > j) std::swap(i, j);
            std::size_t key = static_cast<std::size_t>(i - 1) * p + (j - 1);
            if (seen[key]) throw parameter_error("model file: duplicate edge");
            seen[key] = true;
            model.set_edge(i - 1, j - 1, w);
        } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw parameter_error("model file: malformed edge line: " + line);
        }
    }
    if (p < 0) throw parameter_error("model file: empty");
    return model;
}

IsingModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open model file: " + path);
    return read_model(in);
}

} // namespace ising
