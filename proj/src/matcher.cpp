#include "gmatch/matcher.hpp"

#include <cmath>

#include "gmatch/ops.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

std::string similarity_name(SimilarityKind k) {
    return k == SimilarityKind::Dot ? "dot" : "cosine";
}

SimilarityKind parse_similarity(const std::string& name) {
    if (name == "dot") return SimilarityKind::Dot;
    if (name == "cosine") return SimilarityKind::Cosine;
    throw ConfigError("unknown similarity kind '" + name + "'");
}

namespace {

Tensor glorot(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor w = Tensor::zeros({fan_in, fan_out});
    for (double& v : w.values) v = rng.uniform(-a, a);
    return w;
}

}  // namespace

ParamStore init_matcher_params(const MatcherConfig& cfg, std::uint64_t seed) {
    if (cfg.hidden < 1) throw ConfigError("matcher hidden width must be >= 1");
    Rng rng(mix_seed(seed, 0x3a7c4e));
    const std::size_t d = cfg.hidden;
    ParamStore ps;
    if (cfg.d_e > 0) ps.insert("match.edge.W", glorot(rng, cfg.d_e, d));
    ps.insert("match.update.W1", glorot(rng, 3 * d, d));
    ps.insert("match.update.b1", Tensor::zeros({d}));
    ps.insert("match.update.W2", glorot(rng, d, d));
    ps.insert("match.update.b2", Tensor::zeros({d}));
    return ps;
}

Tensor inter_attention(const Tensor& H_src, const Tensor& H_tgt,
                       SimilarityKind sim, WorkCounters* counters) {
    if (H_src.rank() != 2 || H_tgt.rank() != 2 || H_src.cols() != H_tgt.cols())
        throw ShapeError("inter_attention: incompatible " + H_src.shape_str() +
                         " and " + H_tgt.shape_str());
    if (H_src.rows() == 0 || H_tgt.rows() == 0)
        throw ShapeError("inter_attention: empty node set");
    Tensor scores;
    if (sim == SimilarityKind::Dot) {
        scores = matmul_nt(H_src, H_tgt);
    } else {
        scores = matmul_nt(l2_normalize_rows(H_src), l2_normalize_rows(H_tgt));
    }
    if (counters)
        counters->on_similarity_block(static_cast<std::uint64_t>(H_src.rows()) *
                                      H_tgt.rows());
    return row_softmax(scores);
}

Tensor inter_messages(const Tensor& H_src, const Tensor& A,
                      bool normalize_targets) {
    if (A.rank() != 2 || H_src.rank() != 2 || A.rows() != H_src.rows())
        throw ShapeError("inter_messages: incompatible " + A.shape_str() +
                         " and " + H_src.shape_str());
    if (normalize_targets) return matmul_tn(normalize_cols(A), H_src);
    return matmul_tn(A, H_src);
}

Tensor intra_messages(const Graph& g, const Tensor& H, const ParamStore& params) {
    if (H.rank() != 2 || H.rows() != static_cast<std::size_t>(g.num_nodes))
        throw ShapeError("intra_messages: H " + H.shape_str() +
                         " not aligned with graph");
    Tensor msg = matmul(adjacency_matrix(g, false), H);
    if (g.num_edges() > 0 && g.d_e > 0) {
        msg = add(msg, matmul(dst_incidence_matrix(g, false),
                              matmul(edge_attr_matrix(g), params.at("match.edge.W"))));
    }
    return msg;
}

Tensor update_nodes(const Tensor& H, const Tensor& M_intra,
                    const Tensor& M_inter, const ParamStore& params) {
    if (H.shape != M_intra.shape || H.shape != M_inter.shape)
        throw ShapeError("update_nodes: mismatched inputs " + H.shape_str() +
                         ", " + M_intra.shape_str() + ", " + M_inter.shape_str());
    Tensor x = concat_cols({H, M_intra, M_inter});
    Tensor h1 = relu(add(matmul(x, params.at("match.update.W1")),
                         params.at("match.update.b1")));
    return add(matmul(h1, params.at("match.update.W2")),
               params.at("match.update.b2"));
}

Tensor representation_similarity(const Tensor& z1, const Tensor& z2,
                                 SimilarityKind sim) {
    if (sim == SimilarityKind::Dot) return dot(z1, z2);
    return cosine_similarity(z1, z2);
}

MatchedPair match_pair_encoded(const Graph& g1, const Graph& g2,
                               const Tensor& H1, const Tensor& H2,
                               const ParamStore& params,
                               const MatcherConfig& cfg,
                               WorkCounters* counters) {
    MatchedPair mp;
    mp.A12 = inter_attention(H1, H2, cfg.similarity, counters);
    mp.A21 = inter_attention(H2, H1, cfg.similarity, counters);
    mp.sim_op_count = 2ull * static_cast<std::uint64_t>(H1.rows()) * H2.rows();

    Tensor intra1 = intra_messages(g1, H1, params);
    Tensor intra2 = intra_messages(g2, H2, params);
    // Messages into g1's nodes come from g2 (attention with sources in g2).
    Tensor inter1 = inter_messages(H2, mp.A21, cfg.normalize_targets);
    Tensor inter2 = inter_messages(H1, mp.A12, cfg.normalize_targets);

    mp.Z1 = update_nodes(H1, intra1, inter1, params);
    mp.Z2 = update_nodes(H2, intra2, inter2, params);
    mp.zG1 = readout_mean(mp.Z1);
    mp.zG2 = readout_mean(mp.Z2);
    return mp;
}

MatchedPair match_pair(const Graph& g1, const Graph& g2,
                       const ParamStore& params, const EncoderConfig& enc_cfg,
                       const MatcherConfig& cfg, WorkCounters* counters) {
    Tensor H1 = encode_nodes(g1, params, enc_cfg);
    Tensor H2 = encode_nodes(g2, params, enc_cfg);
    return match_pair_encoded(g1, g2, H1, H2, params, cfg, counters);
}

}  // namespace gmatch
