#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "gmatch/graph.hpp"

namespace gmatch {

enum class AugmentKind { NodeDrop, EdgePerturb, SubgraphRw, AttrMask, Identity };

std::string augment_kind_name(AugmentKind k);
AugmentKind parse_augment_kind(const std::string& name);

struct AugmentSpec {
    AugmentKind kind = AugmentKind::NodeDrop;
    double ratio = 0.2;  // fraction in [0, 1)
};

void validate_spec(const AugmentSpec& spec);

/// The two correlated views of one graph may use different augmentations.
struct ViewPairSpec {
    AugmentSpec view1{AugmentKind::NodeDrop, 0.2};
    AugmentSpec view2{AugmentKind::SubgraphRw, 0.2};
};

/// Drops floor(ratio * n) uniformly chosen nodes (never all) and returns the
/// induced subgraph of the rest. Deterministic per seed.
Graph node_drop(const Graph& g, double ratio, std::uint64_t seed);

struct EdgePerturbStats {
    int removed = 0;
    int added = 0;  // may be < removed when too few absent pairs exist
};

/// Removes floor(ratio * undirected_edge_count) undirected edges and adds the
/// same number of uniformly sampled pairs absent from the input (zero-vector
/// edge attributes). Requires a symmetric input; output is symmetric.
Graph edge_perturb(const Graph& g, double ratio, std::uint64_t seed,
                   EdgePerturbStats* stats = nullptr);

/// Random-walk node collection from a uniform start until
/// ceil((1 - ratio) * n) distinct nodes are visited, restarting on dead ends
/// or stalls, then the induced subgraph.
Graph subgraph_rw(const Graph& g, double ratio, std::uint64_t seed);

/// Zeroes the node-attribute rows of floor(ratio * n) chosen nodes.
Graph attr_mask(const Graph& g, double ratio, std::uint64_t seed);

Graph apply_augment(const Graph& g, const AugmentSpec& spec, std::uint64_t seed);

/// Two independent views with seeds derived from
/// (global seed, graph index, view index).
std::pair<Graph, Graph> make_views(const Graph& g, const ViewPairSpec& spec,
                                   std::uint64_t global_seed,
                                   std::size_t graph_index);

}  // namespace gmatch
