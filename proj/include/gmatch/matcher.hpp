#pragma once

#include <cstdint>
#include <string>

#include "gmatch/encoder.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/tensor.hpp"

namespace gmatch {

enum class SimilarityKind { Dot, Cosine };

std::string similarity_name(SimilarityKind k);
SimilarityKind parse_similarity(const std::string& name);

struct MatcherConfig {
    SimilarityKind similarity = SimilarityKind::Dot;
    /// Optional normalization of attention weights pointing at the same
    /// target node, applied during message aggregation. Off by default.
    bool normalize_targets = false;
    std::size_t hidden = 64;  // d, must match the encoder
    std::size_t d_e = 0;
};

/// Matching-head parameters under the "match." prefix, distinct from the
/// encoder layers:
///   match.edge.W [d_e x d]
///   match.update.W1 [3d x d], .b1 [d], .W2 [d x d], .b2 [d]
ParamStore init_matcher_params(const MatcherConfig& cfg, std::uint64_t seed);

/// Work instrumentation. sim_ops counts node-pair similarity evaluations;
/// live_entries tracks attention-matrix entries alive inside the current
/// scope (one scope per loss term held on a tape before its backward).
struct WorkCounters {
    std::uint64_t sim_ops = 0;
    std::uint64_t live_entries = 0;
    std::uint64_t peak_live_entries = 0;

    void begin_live_scope() { live_entries = 0; }
    void end_live_scope() { live_entries = 0; }
    void on_similarity_block(std::uint64_t count) {
        sim_ops += count;
        live_entries += count;
        if (live_entries > peak_live_entries) peak_live_entries = live_entries;
    }
};

/// Cross-graph attention: A[s,t] = softmax_t sim(H_src[s], H_tgt[t]).
/// Every row sums to 1 (normalization over messages from one source node).
Tensor inter_attention(const Tensor& H_src, const Tensor& H_tgt,
                       SimilarityKind sim, WorkCounters* counters = nullptr);

/// Aggregated inter-graph messages per target node: M[t] = sum_s A[s,t] H_src[s].
/// With normalize_targets the weights into each target are rescaled to sum 1.
Tensor inter_messages(const Tensor& H_src, const Tensor& A,
                      bool normalize_targets = false);

/// Aggregated intra-graph messages: M[t] = sum_{(s,t) in E} (H[s] + e_st . We).
Tensor intra_messages(const Graph& g, const Tensor& H, const ParamStore& params);

/// Z[t] = MLP(concat[H[t]; M_intra[t]; M_inter[t]]).
Tensor update_nodes(const Tensor& H, const Tensor& M_intra,
                    const Tensor& M_inter, const ParamStore& params);

/// Similarity of two graph-level representations under the configured kind.
Tensor representation_similarity(const Tensor& z1, const Tensor& z2,
                                 SimilarityKind sim);

struct MatchedPair {
    Tensor Z1, Z2;    // contextual node features
    Tensor zG1, zG2;  // adaptive graph representations
    Tensor A12, A21;  // attention, rows = source nodes
    std::uint64_t sim_op_count = 0;
};

/// One matching round after the full encoder: encodes both graphs, exchanges
/// attention messages in both directions, updates nodes and pools.
MatchedPair match_pair(const Graph& g1, const Graph& g2,
                       const ParamStore& params, const EncoderConfig& enc_cfg,
                       const MatcherConfig& cfg,
                       WorkCounters* counters = nullptr);

/// Same, reusing already-encoded node representations (H1, H2 may be shared
/// across many pairings on one tape).
MatchedPair match_pair_encoded(const Graph& g1, const Graph& g2,
                               const Tensor& H1, const Tensor& H2,
                               const ParamStore& params,
                               const MatcherConfig& cfg,
                               WorkCounters* counters = nullptr);

}  // namespace gmatch
