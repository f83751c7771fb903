#include "gmatch/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace gmatch {

std::vector<std::string> validate(const Graph& g) {
    std::vector<std::string> violations;
    if (g.num_nodes < 1) {
        violations.push_back("graph must have at least one node");
    }
    const std::size_t want_nodes =
        static_cast<std::size_t>(g.num_nodes) * g.d_v;
    if (g.node_attrs.size() != want_nodes) {
        std::ostringstream os;
        os << "node attr storage has " << g.node_attrs.size()
           << " values, expected " << want_nodes;
        violations.push_back(os.str());
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        if (e.src < 0 || e.src >= g.num_nodes || e.dst < 0 ||
            e.dst >= g.num_nodes) {
            std::ostringstream os;
            os << "endpoint out of range: edge " << i << " = (" << e.src
               << "," << e.dst << ") with " << g.num_nodes << " nodes";
            violations.push_back(os.str());
        }
    }
    if (g.edge_attrs.size() != g.edges.size() * g.d_e) {
        std::ostringstream os;
        os << "edge attr misalignment: " << g.edge_attrs.size()
           << " values for " << g.edges.size() << " edges of width " << g.d_e;
        violations.push_back(os.str());
    }
    if (g.label && g.label_mask && g.label->size() != g.label_mask->size()) {
        std::ostringstream os;
        os << "label length " << g.label->size() << " != mask length "
           << g.label_mask->size();
        violations.push_back(os.str());
    }
    return violations;
}

void require_valid(const Graph& g) {
    auto violations = validate(g);
    if (violations.empty()) return;
    std::string msg = "invalid graph:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw DataError(msg);
}

namespace {

bool attr_rows_equal(const Graph& g, int a, int b) {
    auto ra = g.edge_attr(a);
    auto rb = g.edge_attr(b);
    return std::equal(ra.begin(), ra.end(), rb.begin(), rb.end());
}

}  // namespace

bool is_symmetric(const Graph& g) {
    std::map<std::pair<int, int>, int> index;
    for (int i = 0; i < g.num_edges(); ++i) {
        auto key = std::make_pair(g.edges[i].src, g.edges[i].dst);
        if (index.count(key)) return false;  // duplicate directed edge
        index[key] = i;
    }
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges[i];
        if (e.src == e.dst) continue;
        auto it = index.find({e.dst, e.src});
        if (it == index.end()) return false;
        if (!attr_rows_equal(g, i, it->second)) return false;
    }
    return true;
}

Graph symmetrize(const Graph& g) {
    require_valid(g);
    std::map<std::pair<int, int>, int> index;
    for (int i = 0; i < g.num_edges(); ++i) {
        auto key = std::make_pair(g.edges[i].src, g.edges[i].dst);
        if (index.count(key)) {
            std::ostringstream os;
            os << "duplicate edge (" << g.edges[i].src << ","
               << g.edges[i].dst << ")";
            throw DataError(os.str());
        }
        index[key] = i;
    }
    Graph out = g;
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges[i];
        if (e.src == e.dst) continue;
        auto it = index.find({e.dst, e.src});
        if (it != index.end()) {
            if (!attr_rows_equal(g, i, it->second)) {
                std::ostringstream os;
                os << "edge (" << e.src << "," << e.dst
                   << ") and its reverse carry different attributes";
                throw DataError(os.str());
            }
            continue;
        }
        out.edges.push_back({e.dst, e.src});
        auto row = g.edge_attr(i);
        out.edge_attrs.insert(out.edge_attrs.end(), row.begin(), row.end());
    }
    return out;
}

std::vector<std::pair<int, int>> neighbors(const Graph& g, int v) {
    if (v < 0 || v >= g.num_nodes) {
        std::ostringstream os;
        os << "node index " << v << " out of range [0," << g.num_nodes << ")";
        throw IndexError(os.str());
    }
    std::vector<std::pair<int, int>> result;
    for (int i = 0; i < g.num_edges(); ++i) {
        if (g.edges[i].src == v) result.emplace_back(g.edges[i].dst, i);
    }
    return result;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
    if (keep.empty()) throw DataError("empty subgraph");
    std::vector<int> nodes = keep;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int v : nodes) {
        if (v < 0 || v >= g.num_nodes) {
            std::ostringstream os;
            os << "keep index " << v << " out of range [0," << g.num_nodes
               << ")";
            throw IndexError(os.str());
        }
    }
    std::vector<int> remap(static_cast<std::size_t>(g.num_nodes), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) remap[nodes[i]] = static_cast<int>(i);

    Graph out;
    out.num_nodes = static_cast<int>(nodes.size());
    out.d_v = g.d_v;
    out.d_e = g.d_e;
    out.node_attrs.reserve(nodes.size() * g.d_v);
    for (int v : nodes) {
        auto row = g.node_attr(v);
        out.node_attrs.insert(out.node_attrs.end(), row.begin(), row.end());
    }
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges[i];
        if (remap[e.src] < 0 || remap[e.dst] < 0) continue;
        out.edges.push_back({remap[e.src], remap[e.dst]});
        auto row = g.edge_attr(i);
        out.edge_attrs.insert(out.edge_attrs.end(), row.begin(), row.end());
    }
    out.label = g.label;
    out.label_mask = g.label_mask;
    return out;
}

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "valid") return Split::Valid;
    if (name == "test") return Split::Test;
    throw DataError("unknown split tag '" + name + "'");
}

std::vector<std::size_t> GraphDataset::indices_of(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (splits[i] == s) out.push_back(i);
    }
    return out;
}

GraphDataset make_dataset(std::vector<Graph> graphs,
                          std::vector<Split> splits) {
    if (graphs.empty()) throw DataError("empty dataset");
    if (splits.size() != graphs.size()) {
        throw DataError("split tags not aligned with graphs");
    }
    GraphDataset ds;
    ds.d_v = graphs.front().d_v;
    ds.d_e = graphs.front().d_e;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        Graph& g = graphs[i];
        auto violations = validate(g);
        if (!violations.empty()) {
            std::ostringstream os;
            os << "graph " << i << " invalid: " << violations.front();
            throw DataError(os.str());
        }
        if (g.d_v != ds.d_v || g.d_e != ds.d_e) {
            std::ostringstream os;
            os << "graph " << i << " dims (d_v=" << g.d_v << ",d_e=" << g.d_e
               << ") differ from dataset (d_v=" << ds.d_v << ",d_e=" << ds.d_e
               << ")";
            throw DataError(os.str());
        }
        if (g.label) {
            if (!g.label_mask) {
                g.label_mask = std::vector<bool>(g.label->size(), true);
            }
            if (!ds.num_tasks) ds.num_tasks = g.label->size();
            if (*ds.num_tasks != g.label->size()) {
                std::ostringstream os;
                os << "graph " << i << " has " << g.label->size()
                   << " tasks, dataset has " << *ds.num_tasks;
                throw DataError(os.str());
            }
        }
    }
    ds.graphs = std::move(graphs);
    ds.splits = std::move(splits);
    return ds;
}

}  // namespace gmatch
