#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mglra/crossmodal.hpp"

using namespace mglra;

namespace {

Tensor random_tensor(RngStream& rng, std::size_t r, std::size_t c, double lo = -1.0,
                     double hi = 1.0) {
    std::vector<double> data(r * c);
    for (double& v : data) v = rng.uniform_range(lo, hi);
    return Tensor::from_data(r, c, std::move(data));
}

// Plain-double attention oracle for one head.
std::vector<double> attention_oracle(const MhaParams& p, const Tensor& q_src, const Tensor& kv_src,
                                     std::size_t head) {
    const std::size_t tq = q_src.rows(), tk = kv_src.rows(), d = p.head_dim;
    auto project = [&](const Tensor& src, const Tensor& w) {
        std::vector<double> out(src.rows() * d, 0.0);
        for (std::size_t i = 0; i < src.rows(); ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < src.cols(); ++k)
                    out[i * d + j] += src.at(i, k) * w.at(k, j);
        return out;
    };
    auto q = project(q_src, p.w_query[head]);
    auto k = project(kv_src, p.w_key[head]);
    auto v = project(kv_src, p.w_value[head]);
    std::vector<double> out(tq * d, 0.0);
    for (std::size_t i = 0; i < tq; ++i) {
        std::vector<double> scores(tk, 0.0);
        for (std::size_t j = 0; j < tk; ++j)
            for (std::size_t c = 0; c < d; ++c) scores[j] += q[i * d + c] * k[j * d + c];
        if (p.scaled)
            for (double& s : scores) s /= std::sqrt(static_cast<double>(d));
        double mx = scores[0];
        for (double s : scores) mx = std::max(mx, s);
        double denom = 0.0;
        for (double& s : scores) {
            s = std::exp(s - mx);
            denom += s;
        }
        for (std::size_t j = 0; j < tk; ++j)
            for (std::size_t c = 0; c < d; ++c) out[i * d + c] += scores[j] / denom * v[j * d + c];
    }
    return out;
}

} // namespace

TEST_CASE("single key/value position: output equals the projected value row") {
    RngStream rng(41);
    MhaParams p = MhaParams::init(2, 4, 3, false, rng);
    Tensor q = random_tensor(rng, 2, 4);
    Tensor kv = random_tensor(rng, 1, 4);
    Tensor out = head_attention(p, q, kv, 0);
    Tensor v = matmul(kv, p.w_value[0]);
    REQUIRE(out.rows() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(out.at(i, j) == doctest::Approx(v.at(0, j)).epsilon(1e-12));
}

TEST_CASE("two identical keys: output is the mean of the two value rows") {
    RngStream rng(42);
    MhaParams p = MhaParams::init(1, 3, 2, false, rng);
    Tensor q = random_tensor(rng, 1, 3);
    std::vector<double> row = {0.5, -0.25, 1.0};
    std::vector<double> kv_data;
    kv_data.insert(kv_data.end(), row.begin(), row.end());
    kv_data.insert(kv_data.end(), row.begin(), row.end());
    Tensor kv = Tensor::from_data(2, 3, kv_data);
    Tensor out = head_attention(p, q, kv, 0);
    Tensor v = matmul(kv, p.w_value[0]);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(out.at(0, j) == doctest::Approx(0.5 * (v.at(0, j) + v.at(1, j))).epsilon(1e-12));
}

TEST_CASE("head attention matches the explicit oracle on T_Q=2, T_K=3, d=2") {
    RngStream rng(43);
    for (bool scaled : {false, true}) {
        MhaParams p = MhaParams::init(2, 3, 2, scaled, rng);
        Tensor q = random_tensor(rng, 2, 3);
        Tensor kv = random_tensor(rng, 3, 3);
        for (std::size_t head = 0; head < 2; ++head) {
            Tensor out = head_attention(p, q, kv, head);
            auto expect = attention_oracle(p, q, kv, head);
            for (std::size_t i = 0; i < out.size(); ++i)
                CHECK(std::fabs(out.values()[i] - expect[i]) <= 1e-12);
        }
    }
}

TEST_CASE("multi_head concatenates per-head outputs") {
    RngStream rng(44);
    MhaParams p1 = MhaParams::init(1, 3, 2, false, rng);
    Tensor q = random_tensor(rng, 2, 3), kv = random_tensor(rng, 2, 3);
    Tensor single = multi_head(p1, q, kv);
    Tensor head0 = head_attention(p1, q, kv, 0);
    CHECK(single.cols() == 2);
    for (std::size_t i = 0; i < single.size(); ++i)
        CHECK(single.values()[i] == head0.values()[i]);

    MhaParams p2 = MhaParams::init(2, 3, 2, false, rng);
    Tensor out = multi_head(p2, q, kv);
    CHECK(out.cols() == 4); // n * d_m
    Tensor h0 = head_attention(p2, q, kv, 0);
    Tensor h1 = head_attention(p2, q, kv, 1);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(out.at(r, j) == h0.at(r, j));
            CHECK(out.at(r, 2 + j) == h1.at(r, j));
        }
}

TEST_CASE("attention output rows stay in the convex hull of projected values") {
    RngStream rng(45);
    MhaParams p = MhaParams::init(1, 4, 3, false, rng);
    Tensor q = random_tensor(rng, 3, 4, -2.0, 2.0);
    Tensor kv = random_tensor(rng, 5, 4, -2.0, 2.0);
    Tensor out = head_attention(p, q, kv, 0);
    Tensor v = matmul(kv, p.w_value[0]);
    for (std::size_t j = 0; j < 3; ++j) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t r = 0; r < 5; ++r) {
            lo = std::min(lo, v.at(r, j));
            hi = std::max(hi, v.at(r, j));
        }
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(out.at(r, j) >= lo - 1e-9);
            CHECK(out.at(r, j) <= hi + 1e-9);
        }
    }
}

TEST_CASE("jointly permuting key/value rows leaves the output unchanged") {
    RngStream rng(46);
    MhaParams p = MhaParams::init(2, 3, 2, false, rng);
    Tensor q = random_tensor(rng, 2, 3);
    Tensor kv = random_tensor(rng, 4, 3);
    Tensor base = multi_head(p, q, kv);
    Tensor permuted_kv = select_rows(kv, {2, 0, 3, 1});
    Tensor permuted = multi_head(p, q, permuted_kv);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base.values()[i] == doctest::Approx(permuted.values()[i]).epsilon(1e-12));
}

TEST_CASE("gru gate saturation: closed keeps prior, open takes candidate") {
    RngStream rng(47);
    GruParams p = GruParams::init(3, 2, rng);
    Tensor prior = random_tensor(rng, 4, 2);
    Tensor input = random_tensor(rng, 4, 3);

    p.b_update = Tensor::from_data(1, 2, {-1000.0, -1000.0}, true);
    Tensor keep = gru_update(p, prior, input);
    for (std::size_t i = 0; i < keep.size(); ++i) CHECK(keep.values()[i] == prior.values()[i]);

    p.b_update = Tensor::from_data(1, 2, {1000.0, 1000.0}, true);
    Tensor take = gru_update(p, prior, input);
    // with z = 1 the output is exactly the candidate state
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<double> rgate(2, 0.0);
            for (std::size_t jj = 0; jj < 2; ++jj) {
                double acc = p.b_reset.at(0, jj);
                for (std::size_t k = 0; k < 3; ++k) acc += input.at(r, k) * p.w_reset.at(k, jj);
                for (std::size_t k = 0; k < 2; ++k) acc += prior.at(r, k) * p.u_reset.at(k, jj);
                rgate[jj] = 1.0 / (1.0 + std::exp(-acc));
            }
            double cand = p.b_cand.at(0, j);
            for (std::size_t k = 0; k < 3; ++k) cand += input.at(r, k) * p.w_cand.at(k, j);
            for (std::size_t k = 0; k < 2; ++k)
                cand += rgate[k] * prior.at(r, k) * p.u_cand.at(k, j);
            CHECK(take.at(r, j) == doctest::Approx(std::tanh(cand)).epsilon(1e-12));
        }
}

TEST_CASE("gru matches a hand-rolled cell oracle on a random tiny case") {
    RngStream rng(48);
    GruParams p = GruParams::init(2, 3, rng);
    Tensor prior = random_tensor(rng, 2, 3);
    Tensor input = random_tensor(rng, 2, 2);
    Tensor out = gru_update(p, prior, input);
    for (std::size_t r = 0; r < 2; ++r) {
        auto gate = [&](const Tensor& w, const Tensor& u, const Tensor& b, std::size_t j,
                        const std::vector<double>& h_for_u) {
            double acc = b.at(0, j);
            for (std::size_t k = 0; k < 2; ++k) acc += input.at(r, k) * w.at(k, j);
            for (std::size_t k = 0; k < 3; ++k) acc += h_for_u[k] * u.at(k, j);
            return acc;
        };
        std::vector<double> h(3);
        for (std::size_t k = 0; k < 3; ++k) h[k] = prior.at(r, k);
        for (std::size_t j = 0; j < 3; ++j) {
            const double z = 1.0 / (1.0 + std::exp(-gate(p.w_update, p.u_update, p.b_update, j, h)));
            std::vector<double> rh(3);
            for (std::size_t k = 0; k < 3; ++k) {
                const double rk =
                    1.0 / (1.0 + std::exp(-gate(p.w_reset, p.u_reset, p.b_reset, k, h)));
                rh[k] = rk * h[k];
            }
            const double cand = std::tanh(gate(p.w_cand, p.u_cand, p.b_cand, j, rh));
            const double expect = (1.0 - z) * h[j] + z * cand;
            CHECK(out.at(r, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("broadcast single-row input applies to every position") {
    RngStream rng(49);
    GruParams p = GruParams::init(2, 3, rng);
    Tensor prior = random_tensor(rng, 3, 3);
    Tensor input = random_tensor(rng, 1, 2);
    Tensor broadcast = gru_update(p, prior, input);
    std::vector<double> tall_data;
    for (int r = 0; r < 3; ++r)
        tall_data.insert(tall_data.end(), input.values().begin(), input.values().end());
    Tensor tall = gru_update(p, prior, Tensor::from_data(3, 2, tall_data));
    for (std::size_t i = 0; i < broadcast.size(); ++i)
        CHECK(broadcast.values()[i] == tall.values()[i]);
}

TEST_CASE("gradient check through attention and gru") {
    RngStream rng(50);
    MhaParams mha = MhaParams::init(2, 3, 2, false, rng);
    GruParams gru = GruParams::init(4, 3, rng);
    Tensor q = random_tensor(rng, 2, 3), kv = random_tensor(rng, 3, 3);
    Tensor prior = random_tensor(rng, 2, 3);
    Tensor w = random_tensor(rng, 3, 1);
    auto f = [&]() {
        Tensor attended = multi_head(mha, q, kv);
        Tensor refined = gru_update(gru, prior, attended);
        return sum_all(matmul(refined, w));
    };
    std::vector<NamedTensor> params;
    mha.collect("mha", params);
    gru.collect("gru", params);
    for (const auto& r : grad_check(f, params)) {
        INFO(r.parameter_name, " err=", r.max_relative_error);
        CHECK(r.pass);
    }
}
