#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmatch/graph.hpp"
#include "gmatch/rng.hpp"

using namespace gmatch;

namespace {

Graph make_path3() {
    // 0 - 1 - 2, symmetric, d_v = 2, d_e = 1
    Graph g;
    g.num_nodes = 3;
    g.d_v = 2;
    g.d_e = 1;
    g.node_attrs = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    g.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    g.edge_attrs = {0.5, 0.5, 0.25, 0.25};
    return g;
}

Graph random_graph(Rng& rng, int n, double p, std::size_t d_v, std::size_t d_e) {
    Graph g;
    g.num_nodes = n;
    g.d_v = d_v;
    g.d_e = d_e;
    for (int v = 0; v < n; ++v)
        for (std::size_t k = 0; k < d_v; ++k) g.node_attrs.push_back(rng.uniform());
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.uniform() < p) {
                g.edges.push_back({u, v});
                for (std::size_t k = 0; k < d_e; ++k)
                    g.edge_attrs.push_back(rng.uniform());
            }
        }
    }
    return symmetrize(g);
}

}  // namespace

TEST_CASE("validate accepts 1-node graph with no edges") {
    Graph g;
    g.num_nodes = 1;
    g.d_v = 2;
    g.node_attrs = {0.1, 0.2};
    CHECK(validate(g).empty());
}

TEST_CASE("validate flags endpoint out of range") {
    Graph g;
    g.num_nodes = 3;
    g.d_v = 1;
    g.node_attrs = {0, 0, 0};
    g.d_e = 0;
    g.edges = {{0, 5}};
    auto v = validate(g);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("endpoint out of range") != std::string::npos);
}

TEST_CASE("validate flags edge attr misalignment") {
    Graph g;
    g.num_nodes = 4;
    g.d_v = 1;
    g.node_attrs = {0, 0, 0, 0};
    g.d_e = 1;
    g.edges = {{0, 1}, {1, 2}, {2, 3}};
    g.edge_attrs = {1.0, 2.0};  // 2 rows for 3 edges
    auto v = validate(g);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("edge attr misalignment") != std::string::npos);
}

TEST_CASE("symmetrize adds reverse edges with duplicated attrs") {
    Graph g;
    g.num_nodes = 2;
    g.d_v = 1;
    g.node_attrs = {0, 0};
    g.d_e = 2;
    g.edges = {{0, 1}};
    g.edge_attrs = {3.0, 4.0};
    Graph s = symmetrize(g);
    REQUIRE(s.num_edges() == 2);
    CHECK(s.edges[0] == Edge{0, 1});
    CHECK(s.edges[1] == Edge{1, 0});
    CHECK(s.edge_attrs == std::vector<double>{3.0, 4.0, 3.0, 4.0});
    CHECK(is_symmetric(s));
}

TEST_CASE("symmetrize is identity on already-symmetric input") {
    Graph s = make_path3();
    Graph s2 = symmetrize(s);
    CHECK(s2.edges == s.edges);
    CHECK(s2.edge_attrs == s.edge_attrs);
}

TEST_CASE("symmetrize rejects duplicate directed edges") {
    Graph g;
    g.num_nodes = 2;
    g.d_v = 1;
    g.node_attrs = {0, 0};
    g.d_e = 0;
    g.edges = {{0, 1}, {0, 1}};
    CHECK_THROWS_WITH_AS(symmetrize(g), doctest::Contains("duplicate edge"),
                         DataError);
}

TEST_CASE("symmetrize idempotence on random graphs") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = random_graph(rng, 2 + static_cast<int>(rng.uniform_index(10)),
                               0.4, 2, 1);
        Graph s2 = symmetrize(g);
        CHECK(s2.edges == g.edges);
        CHECK(s2.edge_attrs == g.edge_attrs);
    }
}

TEST_CASE("neighbors of the middle of a path") {
    Graph g = make_path3();
    auto nb = neighbors(g, 1);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0].first == 0);
    CHECK(nb[1].first == 2);
}

TEST_CASE("neighbors of isolated node is empty") {
    Graph g;
    g.num_nodes = 2;
    g.d_v = 1;
    g.node_attrs = {0, 0};
    CHECK(neighbors(g, 0).empty());
    CHECK_THROWS_AS(neighbors(g, 2), IndexError);
}

TEST_CASE("star center has k neighbors") {
    const int k = 6;
    Graph g;
    g.num_nodes = k + 1;
    g.d_v = 1;
    g.node_attrs.assign(static_cast<std::size_t>(k + 1), 0.0);
    g.d_e = 0;
    for (int leaf = 1; leaf <= k; ++leaf) g.edges.push_back({0, leaf});
    Graph s = symmetrize(g);
    CHECK(neighbors(s, 0).size() == static_cast<std::size_t>(k));
}

TEST_CASE("neighbor list lengths sum to directed edge count") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = random_graph(rng, 8, 0.35, 1, 1);
        std::size_t total = 0;
        for (int v = 0; v < g.num_nodes; ++v) total += neighbors(g, v).size();
        CHECK(total == static_cast<std::size_t>(g.num_edges()));
    }
}

TEST_CASE("induced subgraph keeps everything when keep = all") {
    Graph g = make_path3();
    Graph h = induced_subgraph(g, {0, 1, 2});
    CHECK(h.num_nodes == 3);
    CHECK(h.edges == g.edges);
    CHECK(h.node_attrs == g.node_attrs);
}

TEST_CASE("induced subgraph of triangle keeping two nodes") {
    Graph g;
    g.num_nodes = 3;
    g.d_v = 1;
    g.node_attrs = {0, 1, 2};
    g.d_e = 1;
    g.edges = {{0, 1}, {0, 2}, {1, 2}};
    g.edge_attrs = {9, 8, 7};
    Graph s = symmetrize(g);
    Graph h = induced_subgraph(s, {0, 1});
    CHECK(h.num_nodes == 2);
    REQUIRE(h.num_edges() == 2);
    CHECK(h.edges[0] == Edge{0, 1});
    CHECK(h.edges[1] == Edge{1, 0});
    CHECK(h.edge_attrs == std::vector<double>{9, 9});
}

TEST_CASE("induced subgraph rejects empty keep set") {
    Graph g = make_path3();
    CHECK_THROWS_WITH_AS(induced_subgraph(g, {}), "empty subgraph", DataError);
}

TEST_CASE("induced subgraph edge set matches brute-force filter") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = random_graph(rng, 10, 0.3, 2, 2);
        std::vector<int> keep;
        for (int v = 0; v < 10; ++v)
            if (rng.uniform() < 0.5) keep.push_back(v);
        if (keep.empty()) keep.push_back(0);

        Graph h = induced_subgraph(g, keep);
        CHECK(validate(h).empty());

        // Brute-force oracle: filter edges by endpoint membership, reindex.
        std::vector<int> remap(10, -1);
        for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<int>(i);
        std::vector<Edge> expect;
        for (const Edge& e : g.edges) {
            if (remap[e.src] >= 0 && remap[e.dst] >= 0)
                expect.push_back({remap[e.src], remap[e.dst]});
        }
        CHECK(h.edges == expect);
    }
}

TEST_CASE("make_dataset enforces shared dims") {
    Graph a;
    a.num_nodes = 1;
    a.d_v = 2;
    a.node_attrs = {0, 0};
    Graph b = a;
    b.d_v = 3;
    b.node_attrs = {0, 0, 0};
    CHECK_THROWS_AS(make_dataset({a, b}, {Split::Train, Split::Train}), DataError);
    auto ds = make_dataset({a, a}, {Split::Train, Split::Test});
    CHECK(ds.indices_of(Split::Test) == std::vector<std::size_t>{1});
}
