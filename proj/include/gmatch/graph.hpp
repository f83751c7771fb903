#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmatch/common.hpp"

namespace gmatch {

struct Edge {
    int src = 0;
    int dst = 0;
    bool operator==(const Edge&) const = default;
};

/// Attributed graph. Edges are stored directed; undirected inputs are
/// symmetrized on load so that message passing is a single pass over the
/// directed edge list. Immutable after construction by convention.
struct Graph {
    int num_nodes = 0;
    std::size_t d_v = 0;
    std::size_t d_e = 0;
    std::vector<double> node_attrs;  // num_nodes x d_v, row-major
    std::vector<Edge> edges;
    std::vector<double> edge_attrs;  // num_edges x d_e, row-major
    std::optional<std::vector<double>> label;  // length T
    std::optional<std::vector<bool>> label_mask;  // true = observed

    int num_edges() const { return static_cast<int>(edges.size()); }

    std::span<const double> node_attr(int v) const {
        return {node_attrs.data() + static_cast<std::size_t>(v) * d_v, d_v};
    }
    std::span<const double> edge_attr(int e) const {
        return {edge_attrs.data() + static_cast<std::size_t>(e) * d_e, d_e};
    }
};

/// Returns the list of violated invariants; empty when the graph is valid.
std::vector<std::string> validate(const Graph& g);

/// Throws DataError listing every violation when the graph is invalid.
void require_valid(const Graph& g);

/// True when every non-loop edge (u,v) has its reverse present exactly once
/// with identical attributes.
bool is_symmetric(const Graph& g);

/// Ensures every undirected edge appears in both directions exactly once.
/// Preserves the input edge order and appends missing reverse edges, so an
/// already-symmetric graph is returned unchanged and the operation is
/// idempotent. Self-loops are kept but never duplicated.
Graph symmetrize(const Graph& g);

/// Out-edges of v as (neighbor, edge index) pairs in stored order.
std::vector<std::pair<int, int>> neighbors(const Graph& g, int v);

/// Subgraph induced by `keep` (deduplicated, order-normalized ascending).
/// Nodes are reindexed densely; edges survive iff both endpoints are kept.
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep);

enum class Split { Train, Valid, Test };

std::string split_name(Split s);
Split parse_split(const std::string& name);

struct GraphDataset {
    std::vector<Graph> graphs;
    std::vector<Split> splits;  // aligned with graphs
    std::size_t d_v = 0;
    std::size_t d_e = 0;
    std::optional<std::size_t> num_tasks;  // T, when any graph is labeled

    std::size_t size() const { return graphs.size(); }
    std::vector<std::size_t> indices_of(Split s) const;
};

/// Validates per-graph invariants plus shared d_v/d_e/T consistency.
/// Throws DataError on the first offending graph.
GraphDataset make_dataset(std::vector<Graph> graphs, std::vector<Split> splits);

}  // namespace gmatch
