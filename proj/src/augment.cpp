#include "gmatch/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gmatch/rng.hpp"

namespace gmatch {

std::string augment_kind_name(AugmentKind k) {
    switch (k) {
        case AugmentKind::NodeDrop: return "node-drop";
        case AugmentKind::EdgePerturb: return "edge-perturb";
        case AugmentKind::SubgraphRw: return "subgraph-rw";
        case AugmentKind::AttrMask: return "attr-mask";
        case AugmentKind::Identity: return "identity";
    }
    return "identity";
}

AugmentKind parse_augment_kind(const std::string& name) {
    if (name == "node-drop") return AugmentKind::NodeDrop;
    if (name == "edge-perturb") return AugmentKind::EdgePerturb;
    if (name == "subgraph-rw") return AugmentKind::SubgraphRw;
    if (name == "attr-mask") return AugmentKind::AttrMask;
    if (name == "identity") return AugmentKind::Identity;
    throw ConfigError("unknown augmentation kind '" + name + "'");
}

void validate_spec(const AugmentSpec& spec) {
    if (spec.ratio < 0.0 || spec.ratio >= 1.0)
        throw ConfigError("augmentation ratio must be in [0, 1)");
}

namespace {

// First k entries of a seeded permutation of [0, n).
std::vector<int> sample_without_replacement(std::size_t n, std::size_t k,
                                            Rng& rng) {
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.uniform_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

Graph node_drop(const Graph& g, double ratio, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    const std::size_t drop =
        static_cast<std::size_t>(ratio * static_cast<double>(n));
    if (drop == 0) return g;
    Rng rng(seed);
    std::vector<int> dropped = sample_without_replacement(n, drop, rng);
    std::vector<bool> is_dropped(n, false);
    for (int v : dropped) is_dropped[static_cast<std::size_t>(v)] = true;
    std::vector<int> keep;
    keep.reserve(n - drop);
    for (std::size_t v = 0; v < n; ++v)
        if (!is_dropped[v]) keep.push_back(static_cast<int>(v));
    return induced_subgraph(g, keep);
}

Graph edge_perturb(const Graph& g, double ratio, std::uint64_t seed,
                   EdgePerturbStats* stats) {
    if (!is_symmetric(g)) throw DataError("edge_perturb requires a symmetric graph");
    Rng rng(seed);

    // Undirected view: canonical (u <= v) pairs with the attr row of the
    // first direction encountered.
    std::map<std::pair<int, int>, std::vector<double>> undirected;
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges[i];
        auto key = std::minmax(e.src, e.dst);
        if (!undirected.count({key.first, key.second})) {
            auto row = g.edge_attr(i);
            undirected[{key.first, key.second}] =
                std::vector<double>(row.begin(), row.end());
        }
    }
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(undirected.size());
    for (const auto& [key, attr] : undirected) pairs.push_back(key);

    const std::size_t remove_count = static_cast<std::size_t>(
        ratio * static_cast<double>(pairs.size()));
    EdgePerturbStats local;
    if (remove_count > 0) {
        std::vector<int> removed_idx =
            sample_without_replacement(pairs.size(), remove_count, rng);
        std::set<std::size_t> removed(removed_idx.begin(), removed_idx.end());
        // Candidate additions: unordered non-loop pairs absent from the input.
        std::vector<std::pair<int, int>> absent;
        for (int u = 0; u < g.num_nodes; ++u)
            for (int v = u + 1; v < g.num_nodes; ++v)
                if (!undirected.count({u, v})) absent.push_back({u, v});
        const std::size_t add_count = std::min(remove_count, absent.size());
        std::vector<int> added_idx =
            sample_without_replacement(absent.size(), add_count, rng);

        std::map<std::pair<int, int>, std::vector<double>> result;
        std::size_t pos = 0;
        for (const auto& [key, attr] : undirected) {
            if (!removed.count(pos)) result[key] = attr;
            ++pos;
        }
        for (int ai : added_idx)
            result[absent[static_cast<std::size_t>(ai)]] =
                std::vector<double>(g.d_e, 0.0);
        local.removed = static_cast<int>(remove_count);
        local.added = static_cast<int>(add_count);
        undirected = std::move(result);
    }

    Graph out = g;
    out.edges.clear();
    out.edge_attrs.clear();
    for (const auto& [key, attr] : undirected) {
        out.edges.push_back({key.first, key.second});
        out.edge_attrs.insert(out.edge_attrs.end(), attr.begin(), attr.end());
        if (key.first != key.second) {
            out.edges.push_back({key.second, key.first});
            out.edge_attrs.insert(out.edge_attrs.end(), attr.begin(), attr.end());
        }
    }
    if (stats) *stats = local;
    return out;
}

Graph subgraph_rw(const Graph& g, double ratio, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    const std::size_t target = static_cast<std::size_t>(
        std::ceil((1.0 - ratio) * static_cast<double>(n)));
    const std::size_t want = std::max<std::size_t>(1, std::min(target, n));
    Rng rng(seed);

    std::vector<bool> visited(n, false);
    std::size_t visited_count = 0;

    auto visit = [&](int v) {
        if (!visited[static_cast<std::size_t>(v)]) {
            visited[static_cast<std::size_t>(v)] = true;
            ++visited_count;
        }
    };
    auto random_unvisited = [&]() {
        std::vector<int> pool;
        for (std::size_t v = 0; v < n; ++v)
            if (!visited[v]) pool.push_back(static_cast<int>(v));
        return pool[rng.uniform_index(pool.size())];
    };

    int current = static_cast<int>(rng.uniform_index(n));
    visit(current);
    const std::size_t stall_cap = 8 * n + 16;
    std::size_t steps_since_new = 0;
    while (visited_count < want) {
        auto nb = neighbors(g, current);
        if (nb.empty() || steps_since_new > stall_cap) {
            current = random_unvisited();  // restart guarantees progress
            visit(current);
            steps_since_new = 0;
            continue;
        }
        const std::size_t before = visited_count;
        current = nb[rng.uniform_index(nb.size())].first;
        visit(current);
        steps_since_new = visited_count > before ? 0 : steps_since_new + 1;
    }

    std::vector<int> keep;
    for (std::size_t v = 0; v < n; ++v)
        if (visited[v]) keep.push_back(static_cast<int>(v));
    return induced_subgraph(g, keep);
}

Graph attr_mask(const Graph& g, double ratio, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    const std::size_t mask_count =
        static_cast<std::size_t>(ratio * static_cast<double>(n));
    if (mask_count == 0) return g;
    Rng rng(seed);
    std::vector<int> masked = sample_without_replacement(n, mask_count, rng);
    Graph out = g;
    for (int v : masked) {
        for (std::size_t k = 0; k < g.d_v; ++k)
            out.node_attrs[static_cast<std::size_t>(v) * g.d_v + k] = 0.0;
    }
    return out;
}

Graph apply_augment(const Graph& g, const AugmentSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    switch (spec.kind) {
        case AugmentKind::NodeDrop: return node_drop(g, spec.ratio, seed);
        case AugmentKind::EdgePerturb: return edge_perturb(g, spec.ratio, seed);
        case AugmentKind::SubgraphRw: return subgraph_rw(g, spec.ratio, seed);
        case AugmentKind::AttrMask: return attr_mask(g, spec.ratio, seed);
        case AugmentKind::Identity: return g;
    }
    return g;
}

std::pair<Graph, Graph> make_views(const Graph& g, const ViewPairSpec& spec,
                                   std::uint64_t global_seed,
                                   std::size_t graph_index) {
    const std::uint64_t s1 = mix_seed(global_seed, graph_index, 0);
    const std::uint64_t s2 = mix_seed(global_seed, graph_index, 1);
    return {apply_augment(g, spec.view1, s1), apply_augment(g, spec.view2, s2)};
}

}  // namespace gmatch
