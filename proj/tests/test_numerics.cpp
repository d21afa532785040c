#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mglra/gradcheck.hpp"
#include "mglra/tensor.hpp"

using namespace mglra;

namespace {

// Independent triple-loop product, the matmul oracle.
std::vector<double> naive_matmul(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t m, std::size_t k, std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t kk = 0; kk < k; ++kk) acc += a[i * k + kk] * b[kk * n + j];
            c[i * n + j] = acc;
        }
    return c;
}

Tensor random_tensor(RngStream& rng, std::size_t r, std::size_t c, bool grad = false) {
    std::vector<double> data(r * c);
    for (double& v : data) v = rng.uniform_range(-2.0, 2.0);
    return Tensor::from_data(r, c, std::move(data), grad);
}

} // namespace

TEST_CASE("rng stream is a pure function of seed and counter") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream c(42, 50);
    RngStream d(42);
    for (int i = 0; i < 50; ++i) d.next_u64();
    CHECK(c.next_u64() == d.next_u64());
    CHECK(RngStream(1).next_u64() != RngStream(2).next_u64());
    CHECK(RngStream(7).substream("init").seed != RngStream(7).substream("mask").seed);
}

TEST_CASE("matmul identity cases") {
    RngStream rng(1);
    Tensor x = random_tensor(rng, 3, 4);
    Tensor ix = matmul(Tensor::identity(3), x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(ix.values()[i] == x.values()[i]);

    Tensor a = Tensor::from_data(2, 2, {1, 2, 3, 4});
    Tensor r = matmul(a, Tensor::identity(2));
    CHECK(r.values() == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("matmul matches triple-loop oracle on random 4x5 by 5x3") {
    RngStream rng(2);
    Tensor a = random_tensor(rng, 4, 5);
    Tensor b = random_tensor(rng, 5, 3);
    auto expected = naive_matmul(a.values(), b.values(), 4, 5, 3);
    Tensor c = matmul(a, b);
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(std::fabs(c.values()[i] - expected[i]) <= 1e-12);
}

TEST_CASE("matmul matches oracle over 100 random shape triples") {
    RngStream rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.next_below(16);
        const std::size_t k = 1 + rng.next_below(16);
        const std::size_t n = 1 + rng.next_below(16);
        Tensor a = random_tensor(rng, m, k);
        Tensor b = random_tensor(rng, k, n);
        auto expected = naive_matmul(a.values(), b.values(), m, k, n);
        Tensor c = matmul(a, b);
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(std::fabs(c.values()[i] - expected[i]) <= 1e-12);
    }
}

TEST_CASE("matmul rejects mismatched inner dimensions naming both shapes") {
    Tensor a = Tensor::zeros(2, 3), b = Tensor::zeros(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), ShapeError);
    try {
        matmul(a, b);
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("4x2") != std::string::npos);
    }
}

TEST_CASE("softmax rows: symmetry, dominance, direct oracle") {
    Tensor z = softmax_rows(Tensor::from_data(1, 3, {0, 0, 0}));
    for (double v : z.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    Tensor dom = softmax_rows(Tensor::from_data(1, 2, {1000, 0}));
    CHECK(std::fabs(dom.values()[0] - 1.0) <= 1e-9);
    CHECK(std::fabs(dom.values()[1] - 0.0) <= 1e-9);

    Tensor s = softmax_rows(Tensor::from_data(1, 3, {1, 2, 3}));
    const double denom = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(s.values()[i] - std::exp(1.0 + i) / denom) <= 1e-12);
}

TEST_CASE("softmax rows sum to one and stay in [0,1] on 1000 random inputs") {
    RngStream rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.next_below(8);
        std::vector<double> data(n);
        for (double& v : data) v = rng.uniform_range(-50.0, 50.0);
        Tensor s = softmax_rows(Tensor::from_data(1, n, std::move(data)));
        double sum = 0.0;
        for (double v : s.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            sum += v;
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("elementwise basics") {
    CHECK(relu(Tensor::scalar(-1.0)).item() == 0.0);
    CHECK(relu(Tensor::scalar(2.5)).item() == 2.5);
    CHECK(tanh_op(Tensor::scalar(0.0)).item() == 0.0);
    CHECK(sigmoid(Tensor::scalar(0.0)).item() == 0.5);

    Tensor a = Tensor::zeros(2, 3), b = Tensor::zeros(2, 5);
    Tensor c = concat_cols({a, b});
    CHECK(c.rows() == 2);
    CHECK(c.cols() == 8);

    CHECK_THROWS_AS(add(Tensor::zeros(2, 3), Tensor::zeros(3, 2)), ShapeError);
    CHECK_THROWS_AS(concat_cols({Tensor::zeros(2, 3), Tensor::zeros(3, 3)}), ShapeError);
}

TEST_CASE("broadcast add and mul") {
    Tensor m = Tensor::from_data(2, 2, {1, 2, 3, 4});
    Tensor row = Tensor::from_data(1, 2, {10, 20});
    Tensor col = Tensor::from_data(2, 1, {100, 200});
    CHECK(add(m, row).values() == std::vector<double>{11, 22, 13, 24});
    CHECK(add(row, m).values() == std::vector<double>{11, 22, 13, 24});
    CHECK(add(m, col).values() == std::vector<double>{101, 102, 203, 204});
    CHECK(mul(m, Tensor::scalar(2.0)).values() == std::vector<double>{2, 4, 6, 8});
    CHECK(mul(m, col).values() == std::vector<double>{100, 200, 600, 800});
}

TEST_CASE("non-finite outputs are hard errors") {
    Tensor huge = Tensor::constant(1, 1, 1e308);
    CHECK_THROWS_AS(mul(huge, huge), NumericError);
    CHECK_THROWS_AS(Tensor::from_data(1, 1, {std::nan("")}), NumericError);
}

TEST_CASE("backward: sum gives ones, quadratic gives 2x") {
    Tape tape;
    {
        TapeScope scope(tape);
        Tensor x = Tensor::from_data(2, 2, {1, 2, 3, 4}, true);
        backward(sum_all(x));
        for (double g : x.grad()) CHECK(g == 1.0);
        CHECK(tape.size() == 0); // cleared
    }
    {
        TapeScope scope(tape);
        Tensor x = Tensor::from_data(1, 1, {3.0}, true);
        backward(sum_all(mul(x, x)));
        CHECK(x.grad()[0] == doctest::Approx(6.0).epsilon(1e-15));
    }
}

TEST_CASE("backward rejects non-scalar loss") {
    Tape tape;
    TapeScope scope(tape);
    Tensor x = Tensor::zeros(2, 2, true);
    CHECK_THROWS_AS(backward(add(x, x)), ContractError);
}

TEST_CASE("grad accumulates across reuse of a tensor") {
    Tape tape;
    TapeScope scope(tape);
    Tensor x = Tensor::from_data(1, 1, {2.0}, true);
    // f = x*x + 3x -> f' = 2x + 3 = 7
    Tensor f = add(mul(x, x), affine(x, 3.0, 0.0));
    backward(sum_all(f));
    CHECK(x.grad()[0] == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("grad_check: exact for a quadratic") {
    Tensor x = Tensor::from_data(1, 1, {1.5}, true);
    auto f = [&]() { return sum_all(mul(x, x)); };
    auto reports = grad_check(f, {{"x", x}});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].pass);
    CHECK(reports[0].max_relative_error < 1e-8);
}

TEST_CASE("grad_check: softmax cross-entropy toy passes at 1e-4") {
    RngStream rng(5);
    Tensor logits_w = random_tensor(rng, 3, 4, true);
    Tensor x = random_tensor(rng, 2, 3);
    const std::vector<std::size_t> labels = {1, 3};
    auto f = [&]() {
        Tensor probs = softmax_rows(matmul(x, logits_w));
        Tensor picked = gather_per_row(probs, labels);
        return affine(sum_all(neg_log_clamped(picked)), 0.5, 0.0);
    };
    auto reports = grad_check(f, {{"w", logits_w}});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].pass);
}

TEST_CASE("grad_check: corrupted gradient rule is detected") {
    Tensor x = Tensor::from_data(1, 1, {0.7}, true);
    // y = x^2 with a deliberately wrong backward (uses 3x instead of 2x).
    auto bad_square = [&]() {
        auto out_t = Tensor::from_data(1, 1, {x.item() * x.item()});
        auto xi = x.impl();
        auto oi = out_t.impl();
        detail::record_op({xi}, oi, [xi, oi]() {
            if (oi->grad.empty()) return;
            detail::ensure_grad(*xi);
            xi->grad[0] += oi->grad[0] * 3.0 * xi->data[0];
        });
        return sum_all(out_t);
    };
    auto reports = grad_check(bad_square, {{"x", x}});
    REQUIRE(reports.size() == 1);
    CHECK_FALSE(reports[0].pass);
}

TEST_CASE("composed op soup matches central differences") {
    RngStream rng(6);
    Tensor w1 = random_tensor(rng, 4, 5, true);
    Tensor w2 = random_tensor(rng, 5, 3, true);
    Tensor bias = random_tensor(rng, 1, 5, true);
    Tensor x = random_tensor(rng, 3, 4);
    auto f = [&]() {
        Tensor h = tanh_op(add(matmul(x, w1), bias));
        Tensor s = sigmoid(mul(h, h));
        Tensor joined = concat_cols({s, relu(h)});
        Tensor sliced = slice_rows(joined, 0, 2);
        Tensor picked = select_rows(sliced, {1, 0, 1});
        Tensor z = matmul(picked, concat_rows({slice_rows(w2, 0, 5), slice_rows(w2, 0, 5)}));
        Tensor sm = softmax_rows(z);
        Tensor g = gather_per_row(sm, {0, 2, 1});
        Tensor norm = safe_rsqrt(row_sums(mul(sliced, sliced)));
        Tensor ang = angular_similarity(affine(sigmoid(transpose(norm)), 1.8, -0.9));
        return add(sum_all(neg_log_clamped(g)), sum_all(ang));
    };
    auto reports = grad_check(f, {{"w1", w1}, {"w2", w2}, {"bias", bias}});
    for (const auto& r : reports) {
        INFO(r.parameter_name, " err=", r.max_relative_error);
        CHECK(r.pass);
    }
}

TEST_CASE("seeded_uniform_init: determinism, range, moments") {
    RngStream a(9), b(9);
    Tensor t1 = seeded_uniform_init(a, 7, 11, 0.1);
    Tensor t2 = seeded_uniform_init(b, 7, 11, 0.1);
    CHECK(t1.values() == t2.values()); // bit-identical
    for (double v : t1.values()) CHECK(std::fabs(v) <= 0.1);

    RngStream c(10);
    const std::size_t n = 100000;
    Tensor big = seeded_uniform_init(c, 1, n, 0.1, false);
    double mean = 0.0;
    for (double v : big.values()) mean += v;
    mean /= static_cast<double>(n);
    // std of the mean is scale/sqrt(3n)
    CHECK(std::fabs(mean) < 3.0 * 0.1 / std::sqrt(3.0 * n));
}

TEST_CASE("tensor invariants") {
    Tensor t = Tensor::from_data(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(t.shape() == std::vector<std::size_t>{2, 3});
    CHECK(t.size() == 6);
    CHECK_THROWS_AS(Tensor::from_data(2, 3, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros(0, 3), ShapeError);
}

TEST_CASE("no tape active means no recording") {
    Tensor x = Tensor::from_data(1, 1, {2.0}, true);
    Tensor y = mul(x, x);
    CHECK_FALSE(y.impl()->on_tape);
    Tape tape;
    TapeScope scope(tape);
    Tensor z = mul(x, x);
    CHECK(z.impl()->on_tape);
    CHECK(tape.size() == 1);
    backward(sum_all(z));
}
