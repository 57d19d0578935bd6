#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ising/common.hpp"

namespace ising {

// Zero-field Ising model on {-1,+1}^p: P(x) proportional to
// exp(sum_{i<j} theta_ij x_i x_j).  theta is stored as a dense symmetric
// p x p matrix with zero diagonal; nodes are 0-based internally (the model
// file format is 1-based).
struct IsingModel {
    int p = 0;
    std::vector<double> theta; // row-major p*p

    IsingModel() = default;
    explicit IsingModel(int nodes);

    double at(int i, int j) const { return theta[static_cast<std::size_t>(i) * p + j]; }
    void set_edge(int i, int j, double w);

    static IsingModel empty(int nodes) { return IsingModel(nodes); }
};

// Edge list of the Markov network G(P): sorted unique pairs (i<j).
struct GraphStructure {
    int p = 0;
    std::vector<std::pair<int, int>> edges;

    std::size_t edge_count() const { return edges.size(); }
    bool has_edge(int i, int j) const;
};

enum class WidgetFamily {
    SingleEdge,
    Triangle,
    Fan,
    CliqueMinusEdge,
    CliqueWithHole,
    EmmentalerExtraNode,
    EmmentalerVsFull,
    CliqueVsEmpty,
};

const char* family_name(WidgetFamily f);
WidgetFamily family_from_name(const std::string& name);

// Parameters of a null/alternate widget pair.  Field meanings per family:
//   SingleEdge          mu: edge weight; 2 nodes.
//   Triangle            lambda: path weights, mu: closing edge; 3 nodes.
//   Fan                 blades: B, ell: blades with axial edge deleted in the
//                       null; lambda: blade + axial-even weights, mu:
//                       axial-odd weights; 2B+1 nodes.
//   CliqueMinusEdge     d: clique degree (d+1 nodes); lambda: common weight,
//                       mu: weight of the special edge present only in null.
//   CliqueWithHole      d, ell: hole size; null carries a mu-weighted clique
//                       on the hole, alternate removes it; d+1 nodes.
//   EmmentalerExtraNode d = B(ell+1) multipartite nodes plus one extra node;
//                       lambda: all cross-group and extra-to-group weights,
//                       mu: extra-to-last-group weight added by the alternate.
//   EmmentalerVsFull    d multipartite nodes; alternate adds within-group
//                       edges at mu.
//   CliqueVsEmpty       d nodes; null is the uniform mu-clique, alternate is
//                       the empty model.
struct WidgetSpec {
    WidgetFamily family = WidgetFamily::SingleEdge;
    double lambda = 0.0;
    double mu = 0.0;
    int d = 0;
    int ell = 0;
    int blades = 0;
};

struct WidgetPair {
    IsingModel null_model;
    IsingModel alt_model;
    int sigma = 0; // |G(null) symmetric-difference G(alt)|
};

int widget_nodes(const WidgetSpec& spec);
int widget_sigma(const WidgetSpec& spec);
WidgetPair build_widget(const WidgetSpec& spec);

// A family {Q_S} of alternates obtained by switching t of m disjoint blocks
// of the base model from the block null to the block alternate.  product_form
// is true when the base is an exact block-diagonal product (the lifted
// widgets), which is what the exact mixture formula requires.
struct ChangeEnsemble {
    IsingModel base;       // the null model P on p nodes
    IsingModel block_null; // P0 (meaningful when product_form)
    IsingModel block_alt;  // Q0
    int nu = 0;            // block size
    int m = 0;             // number of blocks
    int t = 0;             // blocks switched per alternate
    int sigma = 0;         // edge edits per switched block
    bool product_form = false;
    // Builds Q_S from sorted distinct block indices in [0, m), size t.
    std::function<IsingModel(const std::vector<int>&)> make_alternate;
};

// Place m = floor(p/nu) copies of the widget null on p nodes (leftover nodes
// isolated); alternates switch t blocks to the widget alternate.
ChangeEnsemble lift(const WidgetPair& widget, int p, int t);

enum class TreeShape { CompleteBinary, Star, Path, TwoLayerStar };
TreeShape tree_shape_from_name(const std::string& name);
const char* tree_shape_name(TreeShape shape);

// Uniform-weight tree on p nodes.  CompleteBinary requires p = 2^h - 1 (heap
// order: children of i are 2i+1, 2i+2).  TwoLayerStar requires odd p: center
// p-1 joined to mid nodes 0..m-1, mid node i joined to outer node m+i,
// m = (p-1)/2.
IsingModel build_uniform_tree(TreeShape shape, int p, double alpha);

// The two-layer-star change ensemble: block i is the chain
// center - i - (m+i); each switched block detaches the center from i and
// attaches it to m+i instead (2 edge edits).  Not product-form: the blocks
// share the center node.
ChangeEnsemble two_layer_star_ensemble(int p, double alpha, int t);

// Delete s distinct edges of the model, chosen uniformly by the seed.
IsingModel random_edge_deletion(const IsingModel& model, int s,
                                std::uint64_t seed);

GraphStructure network_structure(const IsingModel& model, double zero_tol = 0.0);
GraphStructure symmetric_difference(const GraphStructure& a,
                                    const GraphStructure& b);
int max_degree(const GraphStructure& g);

// Model file format: comment lines start with '#'; first data line is p;
// each further line is "i j theta_ij" with 1-based i < j, weights written
// with 17 significant digits so they round-trip exactly.
void write_model(const IsingModel& model, std::ostream& out);
void write_model_file(const IsingModel& model, const std::string& path);
IsingModel read_model(std::istream& in);
IsingModel read_model_file(const std::string& path);

} // namespace ising
