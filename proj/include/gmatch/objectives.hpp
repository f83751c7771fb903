#pragma once

#include <cstdint>
#include <vector>

#include "gmatch/matcher.hpp"

namespace gmatch {

/// A batch of 2n augmented views ordered so that views 2i and 2i+1 are the
/// two views of graph i; the positive partner of view v is v XOR 1.
struct ContrastiveBatch {
    std::vector<Graph> views;
    double tau = 0.07;

    std::size_t two_n() const { return views.size(); }
    static std::size_t partner(std::size_t view_index) { return view_index ^ 1; }
    void validate() const;
};

/// s_{i,j}: similarity of the two adaptive representations produced by
/// matching the pair (not the static encoder readouts).
Tensor pair_similarity(const Graph& gi, const Graph& gj,
                       const ParamStore& params, const EncoderConfig& enc_cfg,
                       const MatcherConfig& cfg,
                       WorkCounters* counters = nullptr);

/// NT-Xent term for one anchor given its similarities to all other views
/// (ordered by view index, anchor excluded):
///   l = -log( exp(s_partner / tau) / sum_k exp(s_k / tau) )
/// computed via log-sum-exp with max subtraction.
Tensor anchor_loss_from_sims(const std::vector<Tensor>& sims,
                             std::size_t partner_pos, double tau);

/// Loss of one sampled anchor: 1 x (2n-1) comparisons against every other
/// view. Only this anchor's similarity row is alive at once.
Tensor anchor_contrastive_loss(const ContrastiveBatch& batch, std::size_t anchor,
                               const ParamStore& params,
                               const EncoderConfig& enc_cfg,
                               const MatcherConfig& cfg,
                               WorkCounters* counters = nullptr);

/// Exact 2n x 2n regime: mean of the anchor losses over all 2n anchors with
/// the symmetric similarity cache (each unordered pair matched once).
Tensor full_contrastive_loss(const ContrastiveBatch& batch,
                             const ParamStore& params,
                             const EncoderConfig& enc_cfg,
                             const MatcherConfig& cfg,
                             WorkCounters* counters = nullptr);

/// q distinct anchor indices, uniform without replacement, per-seed
/// deterministic.
std::vector<std::size_t> sample_anchors(std::size_t two_n, std::size_t q,
                                        std::uint64_t seed);

/// Convenience for tests: the per-anchor losses of the approximate regime,
/// each computed independently (forward values).
std::vector<Tensor> approximate_contrastive_losses(
    const ContrastiveBatch& batch, const std::vector<std::size_t>& anchors,
    const ParamStore& params, const EncoderConfig& enc_cfg,
    const MatcherConfig& cfg, WorkCounters* counters = nullptr);

/// GMPT-Sup: MSE between the cosine similarity of the two labels and the
/// cosine similarity of the two adaptive representations. Requires complete
/// labels on both graphs.
Tensor sup_continuous_loss(const Graph& g1, const Graph& g2,
                           const ParamStore& params,
                           const EncoderConfig& enc_cfg,
                           const MatcherConfig& cfg);

/// GMPT-Sup++: masked mean BCE-with-logits of per-graph label predictions
/// from linear heads on the adaptive representations, summed over the pair.
/// Heads live in the store as suphead.1.W [T x d], suphead.1.b [T] and
/// suphead.2.* for the second pair position.
Tensor sup_discrete_loss(const Graph& g1, const Graph& g2,
                         const ParamStore& params, const EncoderConfig& enc_cfg,
                         const MatcherConfig& cfg);

/// Fresh supervised heads for T tasks of width d.
ParamStore init_sup_heads(std::size_t num_tasks, std::size_t hidden,
                          std::uint64_t seed);

}  // namespace gmatch
