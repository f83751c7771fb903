#pragma once

#include <vector>

#include "gmatch/tensor.hpp"

namespace gmatch {

// Differentiable primitives. Each computes its forward value and, when any
// input is tracked on the active tape, records a node whose backward pass
// accumulates into the parents' gradient buffers. Shape violations throw
// ShapeError naming both shapes.

/// C = A . B for A [m x k], B [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// C = A . B^T for A [m x k], B [n x k].
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// C = A^T . B for A [k x m], B [k x n].
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// y = A . x for A [m x n], x [n].
Tensor matvec(const Tensor& a, const Tensor& x);

/// Elementwise sum; also accepts a rank-1 b broadcast across the rows of a
/// rank-2 a (bias addition).
Tensor add(const Tensor& a, const Tensor& b);
Tensor elem_mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor elem_log(const Tensor& a);
Tensor elem_exp(const Tensor& a);
/// Per-row softmax of a matrix, max-subtracted for stability.
Tensor row_softmax(const Tensor& a);

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
/// Column-wise mean of a matrix: [m x n] -> [n].
Tensor mean_rows(const Tensor& a);
/// Concatenation along the last axis of rank-2 tensors with equal row count.
Tensor concat_cols(const std::vector<Tensor>& parts);

Tensor dot(const Tensor& u, const Tensor& v);
/// Cosine similarity of two vectors; zero-norm input throws ValueError
/// "degenerate cosine input".
Tensor cosine_similarity(const Tensor& u, const Tensor& v);
/// Rows scaled to unit L2 norm; zero rows throw like cosine_similarity.
Tensor l2_normalize_rows(const Tensor& a);
/// Columns scaled to sum 1 (used for optional target-side attention
/// normalization); requires strictly positive column sums.
Tensor normalize_cols(const Tensor& a);

Tensor mse(const Tensor& a, const Tensor& b);
/// Mean binary cross-entropy on logits, fused via the log-sum-exp form.
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);
/// Weighted-mean variant: sum(w * bce) / sum(w). Weights are constants;
/// all-zero weights throw ValueError "no observed tasks".
Tensor bce_with_logits_masked(const Tensor& logits, const Tensor& targets,
                              const std::vector<double>& weights);
Tensor scalar_scale(const Tensor& a, double c);

/// Packs scalar tensors into a rank-1 tensor, preserving gradient routes.
Tensor stack_scalars(const std::vector<Tensor>& scalars);
/// log(sum(exp(v))) of a rank-1 tensor, max-subtracted.
Tensor logsumexp(const Tensor& v);

}  // namespace gmatch
