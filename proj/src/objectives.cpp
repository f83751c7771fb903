#include "gmatch/objectives.hpp"

#include <cmath>

#include "gmatch/ops.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

void ContrastiveBatch::validate() const {
    if (views.size() < 2 || views.size() % 2 != 0)
        throw ConfigError("contrastive batch needs an even number >= 2 of views");
    if (tau <= 0.0) throw ConfigError("temperature must be positive");
}

Tensor pair_similarity(const Graph& gi, const Graph& gj,
                       const ParamStore& params, const EncoderConfig& enc_cfg,
                       const MatcherConfig& cfg, WorkCounters* counters) {
    MatchedPair mp = match_pair(gi, gj, params, enc_cfg, cfg, counters);
    return representation_similarity(mp.zG1, mp.zG2, cfg.similarity);
}

Tensor anchor_loss_from_sims(const std::vector<Tensor>& sims,
                             std::size_t partner_pos, double tau) {
    if (tau <= 0.0) throw ConfigError("temperature must be positive");
    if (sims.empty()) throw ConfigError("anchor loss needs at least one similarity");
    if (partner_pos >= sims.size())
        throw ConfigError("partner position out of range");
    Tensor scaled = scalar_scale(stack_scalars(sims), 1.0 / tau);
    Tensor lse = logsumexp(scaled);
    return add(lse, scalar_scale(sims[partner_pos], -1.0 / tau));
}

namespace {

// Encodes every view once; matching reuses the shared representations so the
// encoder runs 2n times per anchor rather than 2(2n-1).
std::vector<Tensor> encode_views(const ContrastiveBatch& batch,
                                 const ParamStore& params,
                                 const EncoderConfig& enc_cfg) {
    std::vector<Tensor> hs;
    hs.reserve(batch.views.size());
    for (const Graph& v : batch.views)
        hs.push_back(encode_nodes(v, params, enc_cfg));
    return hs;
}

}  // namespace

Tensor anchor_contrastive_loss(const ContrastiveBatch& batch, std::size_t anchor,
                               const ParamStore& params,
                               const EncoderConfig& enc_cfg,
                               const MatcherConfig& cfg, WorkCounters* counters) {
    batch.validate();
    const std::size_t two_n = batch.two_n();
    if (anchor >= two_n) throw ConfigError("anchor index out of range");
    std::vector<Tensor> hs = encode_views(batch, params, enc_cfg);
    std::vector<Tensor> sims;
    sims.reserve(two_n - 1);
    std::size_t partner_pos = 0;
    const std::size_t partner = ContrastiveBatch::partner(anchor);
    for (std::size_t k = 0; k < two_n; ++k) {
        if (k == anchor) continue;
        if (k == partner) partner_pos = sims.size();
        MatchedPair mp =
            match_pair_encoded(batch.views[anchor], batch.views[k], hs[anchor],
                               hs[k], params, cfg, counters);
        sims.push_back(representation_similarity(mp.zG1, mp.zG2, cfg.similarity));
    }
    return anchor_loss_from_sims(sims, partner_pos, batch.tau);
}

Tensor full_contrastive_loss(const ContrastiveBatch& batch,
                             const ParamStore& params,
                             const EncoderConfig& enc_cfg,
                             const MatcherConfig& cfg, WorkCounters* counters) {
    batch.validate();
    const std::size_t two_n = batch.two_n();
    std::vector<Tensor> hs = encode_views(batch, params, enc_cfg);

    // Symmetric cache: each unordered pair is matched once and its similarity
    // shared by both anchors.
    std::vector<std::vector<Tensor>> sim(two_n, std::vector<Tensor>(two_n));
    for (std::size_t i = 0; i < two_n; ++i) {
        for (std::size_t k = i + 1; k < two_n; ++k) {
            MatchedPair mp = match_pair_encoded(batch.views[i], batch.views[k],
                                                hs[i], hs[k], params, cfg,
                                                counters);
            Tensor s = representation_similarity(mp.zG1, mp.zG2, cfg.similarity);
            sim[i][k] = s;
            sim[k][i] = s;
        }
    }
    std::vector<Tensor> losses;
    losses.reserve(two_n);
    for (std::size_t i = 0; i < two_n; ++i) {
        std::vector<Tensor> sims;
        sims.reserve(two_n - 1);
        std::size_t partner_pos = 0;
        const std::size_t partner = ContrastiveBatch::partner(i);
        for (std::size_t k = 0; k < two_n; ++k) {
            if (k == i) continue;
            if (k == partner) partner_pos = sims.size();
            sims.push_back(sim[i][k]);
        }
        losses.push_back(anchor_loss_from_sims(sims, partner_pos, batch.tau));
    }
    return mean_all(stack_scalars(losses));
}

std::vector<std::size_t> sample_anchors(std::size_t two_n, std::size_t q,
                                        std::uint64_t seed) {
    if (q < 1 || q > two_n)
        throw ConfigError("anchor count q must satisfy 1 <= q <= 2n");
    Rng rng(seed);
    std::vector<std::size_t> idx(two_n);
    for (std::size_t i = 0; i < two_n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < q; ++i) {
        std::size_t j = i + rng.uniform_index(two_n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(q);
    return idx;
}

std::vector<Tensor> approximate_contrastive_losses(
    const ContrastiveBatch& batch, const std::vector<std::size_t>& anchors,
    const ParamStore& params, const EncoderConfig& enc_cfg,
    const MatcherConfig& cfg, WorkCounters* counters) {
    std::vector<Tensor> losses;
    losses.reserve(anchors.size());
    for (std::size_t a : anchors) {
        if (counters) counters->begin_live_scope();
        losses.push_back(
            anchor_contrastive_loss(batch, a, params, enc_cfg, cfg, counters));
        if (counters) counters->end_live_scope();
    }
    return losses;
}

namespace {

double label_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double aa = 0.0, bb = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa += a[i] * a[i];
        bb += b[i] * b[i];
        ab += a[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw ValueError("degenerate cosine input");
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

void require_complete_labels(const Graph& g) {
    if (!g.label) throw DataError("Sup requires complete labels");
    if (g.label_mask) {
        for (bool observed : *g.label_mask) {
            if (!observed) throw DataError("Sup requires complete labels");
        }
    }
}

}  // namespace

Tensor sup_continuous_loss(const Graph& g1, const Graph& g2,
                           const ParamStore& params,
                           const EncoderConfig& enc_cfg,
                           const MatcherConfig& cfg) {
    require_complete_labels(g1);
    require_complete_labels(g2);
    if (g1.label->size() != g2.label->size())
        throw DataError("label length mismatch in supervised pair");
    const double sp = label_cosine(*g1.label, *g2.label);
    MatchedPair mp = match_pair(g1, g2, params, enc_cfg, cfg);
    Tensor sg = cosine_similarity(mp.zG1, mp.zG2);
    return mse(sg, Tensor::scalar(sp));
}

Tensor sup_discrete_loss(const Graph& g1, const Graph& g2,
                         const ParamStore& params, const EncoderConfig& enc_cfg,
                         const MatcherConfig& cfg) {
    if (!g1.label || !g2.label) throw DataError("supervised loss requires labels");
    MatchedPair mp = match_pair(g1, g2, params, enc_cfg, cfg);
    const Graph* graphs[2] = {&g1, &g2};
    const Tensor* zs[2] = {&mp.zG1, &mp.zG2};
    Tensor total = Tensor::scalar(0.0);
    for (int k = 0; k < 2; ++k) {
        const std::string p = "suphead." + std::to_string(k + 1) + ".";
        Tensor logits = add(matvec(params.at(p + "W"), *zs[k]), params.at(p + "b"));
        const Graph& g = *graphs[k];
        Tensor targets = Tensor::vector(*g.label);
        std::vector<double> weights(g.label->size(), 1.0);
        if (g.label_mask) {
            for (std::size_t t = 0; t < weights.size(); ++t)
                weights[t] = (*g.label_mask)[t] ? 1.0 : 0.0;
        }
        total = add(total, bce_with_logits_masked(logits, targets, weights));
    }
    return total;
}

ParamStore init_sup_heads(std::size_t num_tasks, std::size_t hidden,
                          std::uint64_t seed) {
    if (num_tasks < 1) throw ConfigError("supervised heads need >= 1 task");
    Rng rng(mix_seed(seed, 0x5f00d5));
    const double a = std::sqrt(6.0 / static_cast<double>(num_tasks + hidden));
    ParamStore ps;
    for (int k = 1; k <= 2; ++k) {
        Tensor w = Tensor::zeros({num_tasks, hidden});
        for (double& v : w.values) v = rng.uniform(-a, a);
        const std::string p = "suphead." + std::to_string(k) + ".";
        ps.insert(p + "W", std::move(w));
        ps.insert(p + "b", Tensor::zeros({num_tasks}));
    }
    return ps;
}

}  // namespace gmatch
