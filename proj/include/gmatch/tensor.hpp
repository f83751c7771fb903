#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gmatch/common.hpp"

namespace gmatch {

/// Dense row-major tensor of 64-bit reals. A tensor participates in reverse-
/// mode differentiation when it carries a node id into the active Tape;
/// everything else is a plain constant. Copying a Tensor copies its values.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    bool requires_grad = false;
    int node = -1;                  // id into the tape identified by tape_serial
    std::uint64_t tape_serial = 0;  // 0 = not on any tape

    Tensor() = default;
    Tensor(std::vector<std::size_t> shp, std::vector<double> vals);

    static Tensor zeros(std::vector<std::size_t> shp);
    static Tensor filled(std::vector<std::size_t> shp, double v);
    static Tensor scalar(double v);
    /// 1-D tensor from a value list.
    static Tensor vector(std::vector<double> vals);
    /// 2-D tensor from rows*cols row-major values.
    static Tensor matrix(std::size_t rows, std::size_t cols,
                         std::vector<double> vals);

    std::size_t size() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }
    bool is_scalar() const { return values.size() == 1 && shape.size() <= 1; }
    std::size_t rows() const;
    std::size_t cols() const;
    double at2(std::size_t i, std::size_t j) const;

    std::string shape_str() const;
};

/// Single active recording tape for reverse-mode differentiation. Operations
/// append nodes in execution order; backward() walks them in exact reverse
/// order, which makes gradients bitwise deterministic. One tape may be alive
/// at a time and is consumed by backward(); nested differentiation is
/// unsupported.
class Tape {
public:
    using BackFn = std::function<void(const std::vector<double>& out_grad, Tape&)>;

    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* active();

    /// Registers t as a differentiation leaf on this tape.
    void watch(Tensor& t);

    bool tracked(const Tensor& t) const {
        return t.tape_serial == serial_ && t.node >= 0;
    }

    /// Records an operation node; `back` receives the node's output gradient
    /// and accumulates into parent buffers via grad_buf(). Returns node id.
    int record(std::size_t out_size, BackFn back);

    /// Computes gradients of a scalar loss w.r.t. every watched tensor and
    /// consumes the tape (no further recording).
    void backward(const Tensor& loss);

    bool consumed() const { return consumed_; }
    std::uint64_t serial() const { return serial_; }

    std::vector<double>& grad_buf(int node);

    /// Gradient of the last backward() w.r.t. a watched tensor. Zero-filled
    /// for watched tensors the loss never touched.
    const std::vector<double>& grad(const Tensor& t);

private:
    struct Node {
        std::size_t size;
        BackFn back;
    };
    std::vector<Node> nodes_;
    std::vector<std::vector<double>> grads_;
    std::uint64_t serial_;
    bool consumed_ = false;

    static Tape* active_;
    static std::uint64_t next_serial_;
};

/// Named learnable parameters. std::map keeps iteration order deterministic.
struct ParamStore {
    std::map<std::string, Tensor> params;

    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const {
        return params.count(name) > 0;
    }
    void insert(const std::string& name, Tensor t);
    /// Copies every entry whose name starts with `prefix` from `other`.
    void adopt_prefix(const ParamStore& other, const std::string& prefix);
};

void watch_all(Tape& tape, ParamStore& store);

using GradMap = std::map<std::string, std::vector<double>>;

/// Gradients of all watched store entries after tape.backward().
GradMap collect_grads(Tape& tape, const ParamStore& store);
void accumulate_grads(GradMap& into, const GradMap& add);
void scale_grads(GradMap& grads, double factor);

/// Adam with bias correction. Moment buffers are created on first use and
/// keyed by parameter name.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
        moments;  // name -> (m, v)
};

/// One optimizer step over every parameter present in `grads`.
void adam_step(ParamStore& params, const GradMap& grads, AdamState& state);

/// Max over components of |analytic - central difference| / max(1, |analytic|)
/// for a scalar function of one tensor.
double grad_check(const std::function<Tensor(const Tensor&)>& f,
                  const Tensor& x, double eps);

/// Same check for a scalar function of a whole parameter store; every
/// component of every parameter is perturbed.
double grad_check_params(const std::function<Tensor(const ParamStore&)>& f,
                         const ParamStore& params, double eps);

}  // namespace gmatch
