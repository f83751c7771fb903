#include "gmatch/encoder.hpp"

#include <cmath>
#include <sstream>

#include "gmatch/ops.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

std::string encoder_arch_name(EncoderArch a) {
    return a == EncoderArch::Gin ? "gin" : "gcn-mean";
}

EncoderArch parse_encoder_arch(const std::string& name) {
    if (name == "gin") return EncoderArch::Gin;
    if (name == "gcn-mean") return EncoderArch::GcnMean;
    throw ConfigError("unknown encoder arch '" + name + "'");
}

void validate_config(const EncoderConfig& cfg) {
    if (cfg.layers < 1) throw ConfigError("encoder layers must be >= 1");
    if (cfg.hidden < 1) throw ConfigError("encoder hidden width must be >= 1");
    if (cfg.d_v < 1) throw ConfigError("encoder d_v must be >= 1");
}

namespace {

Tensor glorot(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor w = Tensor::zeros({fan_in, fan_out});
    for (double& v : w.values) v = rng.uniform(-a, a);
    return w;
}

std::vector<double> in_degrees(const Graph& g) {
    std::vector<double> deg(static_cast<std::size_t>(g.num_nodes), 0.0);
    for (const Edge& e : g.edges) deg[static_cast<std::size_t>(e.dst)] += 1.0;
    return deg;
}

}  // namespace

ParamStore init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    Rng rng(mix_seed(seed, 0x5ecafe));
    const std::size_t d = cfg.hidden;
    ParamStore ps;
    ps.insert("enc.in.W", glorot(rng, cfg.d_v, d));
    ps.insert("enc.in.b", Tensor::zeros({d}));
    for (int k = 0; k < cfg.layers; ++k) {
        const std::string p = "enc.layer" + std::to_string(k) + ".";
        if (cfg.d_e > 0) ps.insert(p + "edge.W", glorot(rng, cfg.d_e, d));
        ps.insert(p + "mlp.W1", glorot(rng, d, d));
        ps.insert(p + "mlp.b1", Tensor::zeros({d}));
        ps.insert(p + "mlp.W2", glorot(rng, d, d));
        ps.insert(p + "mlp.b2", Tensor::zeros({d}));
    }
    return ps;
}

Tensor adjacency_matrix(const Graph& g, bool degree_normalized) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    Tensor adj = Tensor::zeros({n, n});
    for (const Edge& e : g.edges)
        adj.values[static_cast<std::size_t>(e.dst) * n +
                   static_cast<std::size_t>(e.src)] += 1.0;
    if (degree_normalized) {
        auto deg = in_degrees(g);
        for (std::size_t t = 0; t < n; ++t) {
            if (deg[t] == 0.0) continue;
            for (std::size_t s = 0; s < n; ++s) adj.values[t * n + s] /= deg[t];
        }
    }
    return adj;
}

Tensor dst_incidence_matrix(const Graph& g, bool degree_normalized) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    const std::size_t m = static_cast<std::size_t>(g.num_edges());
    Tensor inc = Tensor::zeros({n, m});
    for (std::size_t i = 0; i < m; ++i)
        inc.values[static_cast<std::size_t>(g.edges[i].dst) * m + i] = 1.0;
    if (degree_normalized) {
        auto deg = in_degrees(g);
        for (std::size_t t = 0; t < n; ++t) {
            if (deg[t] == 0.0) continue;
            for (std::size_t i = 0; i < m; ++i) inc.values[t * m + i] /= deg[t];
        }
    }
    return inc;
}

Tensor edge_attr_matrix(const Graph& g) {
    return Tensor::matrix(static_cast<std::size_t>(g.num_edges()), g.d_e,
                          g.edge_attrs);
}

Tensor encode_nodes(const Graph& g, const ParamStore& params,
                    const EncoderConfig& cfg) {
    validate_config(cfg);
    if (g.d_v != cfg.d_v || g.d_e != cfg.d_e) {
        std::ostringstream os;
        os << "graph dims (d_v=" << g.d_v << ",d_e=" << g.d_e
           << ") do not match encoder config (d_v=" << cfg.d_v
           << ",d_e=" << cfg.d_e << ")";
        throw ShapeError(os.str());
    }
    const std::size_t n = static_cast<std::size_t>(g.num_nodes);
    const bool norm = cfg.arch == EncoderArch::GcnMean;

    Tensor X = Tensor::matrix(n, g.d_v, g.node_attrs);
    Tensor H = add(matmul(X, params.at("enc.in.W")), params.at("enc.in.b"));

    Tensor adj = adjacency_matrix(g, norm);
    const bool has_edges = g.num_edges() > 0;
    Tensor inc, eattr;
    if (has_edges) {
        inc = dst_incidence_matrix(g, norm);
        eattr = edge_attr_matrix(g);
    }

    for (int k = 0; k < cfg.layers; ++k) {
        const std::string p = "enc.layer" + std::to_string(k) + ".";
        Tensor agg = matmul(adj, H);
        if (has_edges && cfg.d_e > 0) {
            agg = add(agg, matmul(inc, matmul(eattr, params.at(p + "edge.W"))));
        }
        Tensor s = add(H, agg);
        Tensor h1 = relu(add(matmul(s, params.at(p + "mlp.W1")),
                             params.at(p + "mlp.b1")));
        H = add(matmul(h1, params.at(p + "mlp.W2")), params.at(p + "mlp.b2"));
        if (k + 1 < cfg.layers) H = relu(H);
    }
    return H;
}

Tensor readout_mean(const Tensor& H) {
    if (H.rank() != 2 || H.rows() == 0)
        throw ShapeError("readout_mean requires a non-empty matrix, got " +
                         H.shape_str());
    return mean_rows(H);
}

}  // namespace gmatch
