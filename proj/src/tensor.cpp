#include "gmatch/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gmatch {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shp) {
    std::size_t n = 1;
    for (std::size_t e : shp) n *= e;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shp, std::vector<double> vals)
    : shape(std::move(shp)), values(std::move(vals)) {
    if (shape_product(shape) != values.size()) {
        std::ostringstream os;
        os << "tensor storage of " << values.size()
           << " values does not match shape " << shape_str();
        throw ShapeError(os.str());
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shp) {
    std::size_t n = shape_product(shp);
    return Tensor(std::move(shp), std::vector<double>(n, 0.0));
}

Tensor Tensor::filled(std::vector<std::size_t> shp, double v) {
    std::size_t n = shape_product(shp);
    return Tensor(std::move(shp), std::vector<double>(n, v));
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::vector(std::vector<double> vals) {
    std::size_t n = vals.size();
    return Tensor({n}, std::move(vals));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> vals) {
    return Tensor({rows, cols}, std::move(vals));
}

std::size_t Tensor::rows() const {
    if (shape.size() != 2) throw ShapeError("rows() on non-matrix " + shape_str());
    return shape[0];
}

std::size_t Tensor::cols() const {
    if (shape.size() != 2) throw ShapeError("cols() on non-matrix " + shape_str());
    return shape[1];
}

double Tensor::at2(std::size_t i, std::size_t j) const {
    return values[i * cols() + j];
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tape* Tape::active_ = nullptr;
std::uint64_t Tape::next_serial_ = 1;

Tape::Tape() : serial_(next_serial_++) {
    if (active_ != nullptr) {
        throw ConfigError("a tape is already active; nested tapes unsupported");
    }
    active_ = this;
}

Tape::~Tape() {
    if (active_ == this) active_ = nullptr;
}

Tape* Tape::active() { return active_; }

void Tape::watch(Tensor& t) {
    if (consumed_) throw ConfigError("tape consumed; cannot watch");
    t.requires_grad = true;
    t.tape_serial = serial_;
    t.node = record(t.size(), nullptr);
}

int Tape::record(std::size_t out_size, BackFn back) {
    if (consumed_) throw ConfigError("tape consumed; cannot record");
    nodes_.push_back({out_size, std::move(back)});
    grads_.emplace_back();
    return static_cast<int>(nodes_.size()) - 1;
}

std::vector<double>& Tape::grad_buf(int node) {
    auto& buf = grads_[static_cast<std::size_t>(node)];
    if (buf.empty()) buf.assign(nodes_[static_cast<std::size_t>(node)].size, 0.0);
    return buf;
}

void Tape::backward(const Tensor& loss) {
    if (consumed_) throw ConfigError("tape already consumed");
    if (!loss.is_scalar()) {
        throw ShapeError("backward requires a scalar loss, got " +
                         loss.shape_str());
    }
    if (!tracked(loss)) {
        throw ConfigError("loss is not tracked on the active tape");
    }
    grad_buf(loss.node)[0] = 1.0;
    for (int id = loss.node; id >= 0; --id) {
        auto& node = nodes_[static_cast<std::size_t>(id)];
        if (!node.back) continue;  // leaf
        auto& g = grads_[static_cast<std::size_t>(id)];
        if (g.empty()) continue;  // never touched; zero gradient
        node.back(g, *this);
    }
    consumed_ = true;
    if (active_ == this) active_ = nullptr;
}

const std::vector<double>& Tape::grad(const Tensor& t) {
    if (!consumed_) throw ConfigError("gradients available only after backward");
    if (t.tape_serial != serial_ || t.node < 0) {
        throw ConfigError("tensor is not tracked on this tape");
    }
    return grad_buf(t.node);
}

Tensor& ParamStore::at(const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

void ParamStore::insert(const std::string& name, Tensor t) {
    if (params.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
    params.emplace(name, std::move(t));
}

void ParamStore::adopt_prefix(const ParamStore& other, const std::string& prefix) {
    for (const auto& [name, tensor] : other.params) {
        if (name.rfind(prefix, 0) == 0) {
            params.insert_or_assign(name, tensor);
        }
    }
}

void watch_all(Tape& tape, ParamStore& store) {
    for (auto& [name, tensor] : store.params) tape.watch(tensor);
}

GradMap collect_grads(Tape& tape, const ParamStore& store) {
    GradMap out;
    for (const auto& [name, tensor] : store.params) {
        out[name] = tape.grad(tensor);
    }
    return out;
}

void accumulate_grads(GradMap& into, const GradMap& add) {
    for (const auto& [name, g] : add) {
        auto it = into.find(name);
        if (it == into.end()) {
            into[name] = g;
            continue;
        }
        if (it->second.size() != g.size()) {
            throw ShapeError("gradient size mismatch for '" + name + "'");
        }
        for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += g[i];
    }
}

void scale_grads(GradMap& grads, double factor) {
    for (auto& [name, g] : grads) {
        for (double& v : g) v *= factor;
    }
}

void adam_step(ParamStore& params, const GradMap& grads, AdamState& state) {
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (const auto& [name, g] : grads) {
        Tensor& p = params.at(name);
        if (p.size() != g.size()) {
            std::ostringstream os;
            os << "gradient for '" << name << "' has " << g.size()
               << " values, parameter has " << p.size();
            throw ShapeError(os.str());
        }
        auto& [m, v] = state.moments[name];
        if (m.empty()) {
            m.assign(g.size(), 0.0);
            v.assign(g.size(), 0.0);
        }
        for (std::size_t i = 0; i < g.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.values[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

namespace {

double max_rel_error(const std::vector<double>& analytic,
                     const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        double denom = std::max(1.0, std::abs(analytic[i]));
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f,
                  const Tensor& x, double eps) {
    if (eps <= 0.0) throw ConfigError("grad_check eps must be positive");
    std::vector<double> analytic;
    {
        Tape tape;
        Tensor tx = x;
        tape.watch(tx);
        Tensor loss = f(tx);
        tape.backward(loss);
        analytic = tape.grad(tx);
    }
    std::vector<double> numeric(x.size(), 0.0);
    Tensor probe = x;
    probe.node = -1;
    probe.tape_serial = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe.values[i];
        probe.values[i] = orig + eps;
        const double plus = f(probe).values[0];
        probe.values[i] = orig - eps;
        const double minus = f(probe).values[0];
        probe.values[i] = orig;
        numeric[i] = (plus - minus) / (2.0 * eps);
    }
    return max_rel_error(analytic, numeric);
}

double grad_check_params(const std::function<Tensor(const ParamStore&)>& f,
                         const ParamStore& params, double eps) {
    if (eps <= 0.0) throw ConfigError("grad_check eps must be positive");
    GradMap analytic;
    {
        Tape tape;
        ParamStore tracked = params;
        watch_all(tape, tracked);
        Tensor loss = f(tracked);
        tape.backward(loss);
        analytic = collect_grads(tape, tracked);
    }
    double worst = 0.0;
    ParamStore probe = params;
    for (auto& [name, tensor] : probe.params) {
        tensor.node = -1;
        tensor.tape_serial = 0;
    }
    for (auto& [name, tensor] : probe.params) {
        const auto& ga = analytic.at(name);
        for (std::size_t i = 0; i < tensor.size(); ++i) {
            const double orig = tensor.values[i];
            tensor.values[i] = orig + eps;
            const double plus = f(probe).values[0];
            tensor.values[i] = orig - eps;
            const double minus = f(probe).values[0];
            tensor.values[i] = orig;
            const double numeric = (plus - minus) / (2.0 * eps);
            const double denom = std::max(1.0, std::abs(ga[i]));
            worst = std::max(worst, std::abs(ga[i] - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace gmatch
