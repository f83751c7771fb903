#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "gmatch/ops.hpp"
#include "gmatch/rng.hpp"
#include "gmatch/tensor.hpp"

using namespace gmatch;

namespace {

Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.values) v = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("forward values of simple primitives") {
    CHECK(relu(Tensor::vector({-1.0, 2.0})).values == std::vector<double>{0.0, 2.0});

    Tensor sm = row_softmax(Tensor::matrix(1, 2, {0.0, 0.0}));
    CHECK(sm.values[0] == doctest::Approx(0.5));
    CHECK(sm.values[1] == doctest::Approx(0.5));

    Tensor bce = bce_with_logits(Tensor::scalar(0.0), Tensor::scalar(1.0));
    CHECK(bce.values[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK(mse(Tensor::scalar(1.0), Tensor::scalar(0.5)).values[0] ==
          doctest::Approx(0.25));

    Tensor v = Tensor::vector({0.3, -0.7, 2.0});
    CHECK(cosine_similarity(v, v).values[0] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(matmul(Tensor::matrix(2, 2, {1, 2, 3, 4}),
                 Tensor::matrix(2, 1, {1, 1}))
              .values == std::vector<double>{3, 7});
}

TEST_CASE("shape errors name both shapes") {
    CHECK_THROWS_WITH_AS(
        matmul(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}), Tensor::matrix(2, 2, {1, 2, 3, 4})),
        doctest::Contains("[2x3]"), ShapeError);
    CHECK_THROWS_AS(add(Tensor::vector({1.0}), Tensor::vector({1.0, 2.0})), ShapeError);
}

TEST_CASE("backward of x.x at x=3 gives 6") {
    Tape tape;
    Tensor x = Tensor::vector({3.0});
    tape.watch(x);
    Tensor loss = dot(x, x);
    tape.backward(loss);
    CHECK(tape.grad(x)[0] == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("backward of sum is all-ones") {
    Tape tape;
    Tensor x = Tensor::vector({1.0, -2.0, 5.0});
    tape.watch(x);
    Tensor loss = sum_all(x);
    tape.backward(loss);
    CHECK(tape.grad(x) == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("gradient of bce(logit=0, target=1) is -0.5") {
    // Analytic oracle: d/dx bce(x, t) = sigmoid(x) - t = 0.5 - 1.
    Tape tape;
    Tensor x = Tensor::scalar(0.0);
    tape.watch(x);
    Tensor loss = bce_with_logits(x, Tensor::scalar(1.0));
    tape.backward(loss);
    CHECK(tape.grad(x)[0] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("non-scalar loss is rejected") {
    Tape tape;
    Tensor x = Tensor::vector({1.0, 2.0});
    tape.watch(x);
    Tensor y = relu(x);
    CHECK_THROWS_AS(tape.backward(y), ShapeError);
}

TEST_CASE("grad_check on sum of squares") {
    Rng rng(1);
    Tensor x = random_tensor(rng, {6});
    double err = grad_check([](const Tensor& t) { return dot(t, t); }, x, 1e-3);
    CHECK(err < 1e-6);
}

TEST_CASE("grad_check on row-softmax then sum of squares") {
    Rng rng(2);
    Tensor x = random_tensor(rng, {3, 4});
    auto f = [](const Tensor& t) {
        Tensor y = row_softmax(t);
        return sum_all(elem_mul(y, y));
    };
    CHECK(grad_check(f, x, 1e-3) < 1e-4);
}

TEST_CASE("grad_check of constant function is zero") {
    Tensor x = Tensor::vector({1.0, 2.0});
    auto f = [](const Tensor& t) {
        (void)t;
        return sum_all(scalar_scale(t, 0.0));
    };
    CHECK(grad_check(f, x, 1e-3) == 0.0);
}

TEST_CASE("every primitive passes grad_check at 10 random points") {
    Rng rng(42);
    const double eps = 1e-3;
    const double tol = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
        Tensor m34 = random_tensor(rng, {3, 4});
        Tensor m43 = random_tensor(rng, {4, 3});
        Tensor m34b = random_tensor(rng, {3, 4});
        Tensor v4 = random_tensor(rng, {4});
        Tensor v4b = random_tensor(rng, {4});

        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul(t, m43)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul(m34, t)); }, m43, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul_nt(t, m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul_nt(m34, t)); }, m34b, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul_tn(t, m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matmul_tn(m34, t)); }, m34b, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matvec(t, v4)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(matvec(m34, t)); }, v4, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(add(t, m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(add(m34, t)); }, v4, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_mul(t, m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_mul(elem_mul(t, t), t)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(relu(t)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_log(add(elem_mul(t, t), Tensor::filled(t.shape, 1.0)))); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_exp(t)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_mul(row_softmax(t), m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return mean_all(t); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return dot(mean_rows(t), v4); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_mul(concat_cols({t, m34b}), concat_cols({m34b, t}))); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return dot(t, v4b); }, v4, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return cosine_similarity(t, v4b); }, v4, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return cosine_similarity(v4, t); }, v4b, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return sum_all(elem_mul(l2_normalize_rows(t), m34b)); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) {
            Tensor pos = add(elem_mul(t, t), Tensor::filled(t.shape, 0.1));
            return sum_all(elem_mul(normalize_cols(pos), m34b));
        }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return mse(t, m34b); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return mse(m34, t); }, m34b, eps) < tol);
        Tensor targets = Tensor::matrix(3, 4, {1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0});
        CHECK(grad_check([&](const Tensor& t) { return bce_with_logits(t, targets); }, m34, eps) < tol);
        std::vector<double> w = {1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0};
        CHECK(grad_check([&](const Tensor& t) { return bce_with_logits_masked(t, targets, w); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return scalar_scale(sum_all(t), -2.5); }, m34, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) { return logsumexp(t); }, v4, eps) < tol);
        CHECK(grad_check([&](const Tensor& t) {
            std::vector<Tensor> parts;
            for (std::size_t i = 0; i < 3; ++i)
                parts.push_back(dot(t, i == 0 ? v4b : t));
            return logsumexp(stack_scalars(parts));
        }, v4, eps) < tol);
    }
}

TEST_CASE("row softmax rows sum to one and shift invariance") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor x = random_tensor(rng, {4, 6});
        Tensor y = row_softmax(x);
        for (std::size_t i = 0; i < 4; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 6; ++j) s += y.at2(i, j);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
        }
        Tensor shifted = x;
        const double c = rng.uniform(-10.0, 10.0);
        for (std::size_t j = 0; j < 6; ++j) shifted.values[2 * 6 + j] += c;
        Tensor y2 = row_softmax(shifted);
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(y2.values[i] == doctest::Approx(y.values[i]).epsilon(1e-6));
    }
}

TEST_CASE("backward is bitwise deterministic") {
    Rng rng(8);
    Tensor x0 = random_tensor(rng, {4, 4});
    Tensor w0 = random_tensor(rng, {4, 4});
    auto run = [&](std::vector<double>& gx, std::vector<double>& gw) {
        Tape tape;
        Tensor x = x0, w = w0;
        tape.watch(x);
        tape.watch(w);
        Tensor h = relu(matmul(x, w));
        Tensor loss = mse(row_softmax(h), Tensor::filled({4, 4}, 0.25));
        tape.backward(loss);
        gx = tape.grad(x);
        gw = tape.grad(w);
    };
    std::vector<double> gx1, gw1, gx2, gw2;
    run(gx1, gw1);
    run(gx2, gw2);
    CHECK(std::memcmp(gx1.data(), gx2.data(), gx1.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(gw1.data(), gw2.data(), gw1.size() * sizeof(double)) == 0);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    ParamStore p;
    p.insert("w", Tensor::vector({1.0, -2.0}));
    AdamState state;
    GradMap g;
    g["w"] = {0.0, 0.0};
    adam_step(p, g, state);
    CHECK(p.at("w").values == std::vector<double>{1.0, -2.0});
}

TEST_CASE("adam: first step matches hand computation") {
    // Hand oracle: m=0.1, v=0.001, mhat=1, vhat=1 => step = lr/(1+eps).
    ParamStore p;
    p.insert("w", Tensor::scalar(0.7));
    AdamState state;
    state.lr = 0.1;
    GradMap g;
    g["w"] = {1.0};
    adam_step(p, g, state);
    const double expect = 0.7 - 0.1 * (1.0 / (1.0 + 1e-8));
    CHECK(p.at("w").values[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("adam: identical inputs give identical updates") {
    ParamStore p;
    p.insert("a", Tensor::vector({0.4, 0.5}));
    p.insert("b", Tensor::vector({0.4, 0.5}));
    AdamState state;
    GradMap g;
    g["a"] = {0.3, -0.2};
    g["b"] = {0.3, -0.2};
    for (int i = 0; i < 5; ++i) adam_step(p, g, state);
    CHECK(p.at("a").values == p.at("b").values);
}

TEST_CASE("nested tapes are rejected") {
    Tape t1;
    CHECK_THROWS_AS(Tape{}, ConfigError);
}

TEST_CASE("tape consumed after backward") {
    Tape tape;
    Tensor x = Tensor::scalar(2.0);
    tape.watch(x);
    Tensor loss = elem_mul(x, x);
    tape.backward(loss);
    CHECK(tape.consumed());
    CHECK(Tape::active() == nullptr);
    CHECK_THROWS_AS(tape.watch(x), ConfigError);
}
