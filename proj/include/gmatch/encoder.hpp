#pragma once

#include <cstdint>
#include <string>

#include "gmatch/graph.hpp"
#include "gmatch/tensor.hpp"

namespace gmatch {

enum class EncoderArch { Gin, GcnMean };

std::string encoder_arch_name(EncoderArch a);
EncoderArch parse_encoder_arch(const std::string& name);

struct EncoderConfig {
    EncoderArch arch = EncoderArch::Gin;
    int layers = 3;          // K
    std::size_t hidden = 64;  // d
    std::size_t d_v = 0;
    std::size_t d_e = 0;
};

void validate_config(const EncoderConfig& cfg);

/// Fresh encoder parameters (Glorot-uniform weights, zero biases) under the
/// "enc." prefix:
///   enc.in.W [d_v x d], enc.in.b [d]
///   enc.layer<k>.edge.W [d_e x d]
///   enc.layer<k>.mlp.W1 [d x d], .b1 [d], .W2 [d x d], .b2 [d]
ParamStore init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed);

/// K rounds of GIN-style aggregation over the stored directed edges:
///   h_t <- MLP_k( h_t + sum_{(s,t) in E} (h_s + e_st . We_k) )
/// with relu between rounds and none after the last. gcn-mean replaces the
/// inner sum by an in-degree-normalized mean. h^0 is the linear input
/// projection of the node attributes. Returns H [num_nodes x d].
Tensor encode_nodes(const Graph& g, const ParamStore& params,
                    const EncoderConfig& cfg);

/// Column-wise mean of node representations: the static graph representation.
Tensor readout_mean(const Tensor& H);

// Structural constants shared with the matching head.
Tensor adjacency_matrix(const Graph& g, bool degree_normalized);
Tensor dst_incidence_matrix(const Graph& g, bool degree_normalized);
Tensor edge_attr_matrix(const Graph& g);

}  // namespace gmatch
