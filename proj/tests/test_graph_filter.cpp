#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mglra/graph_filter.hpp"

using namespace mglra;

namespace {

FilterParams zero_params(std::size_t hidden, std::size_t value, std::size_t relation) {
    FilterParams p;
    p.hidden_dim = hidden;
    p.value_dim = value;
    p.relation_dim = relation;
    p.relation_embeddings = Tensor::zeros(3, relation, true);
    p.proj_center = Tensor::zeros(3 * hidden, value, true);
    for (int m = 0; m < 3; ++m) p.proj_modality[m] = Tensor::zeros(hidden, value, true);
    p.pair_transform = Tensor::zeros(2 * value + relation, value, true);
    for (int k = 0; k < 3; ++k) p.score_vector[k] = Tensor::zeros(value, 1, true);
    return p;
}

Tensor random_tensor(RngStream& rng, std::size_t r, std::size_t c, double lo = -1.0,
                     double hi = 1.0) {
    std::vector<double> data(r * c);
    for (double& v : data) v = rng.uniform_range(lo, hi);
    return Tensor::from_data(r, c, std::move(data));
}

} // namespace

TEST_CASE("zero inputs and zero projections give all-zero node values") {
    FilterParams p = zero_params(3, 4, 2);
    Tensor v = build_filter_values(p, Tensor::zeros(1, 3), Tensor::zeros(1, 3), Tensor::zeros(1, 3));
    CHECK(v.rows() == 4);
    CHECK(v.cols() == 4);
    for (double x : v.values()) CHECK(x == 0.0);
}

TEST_CASE("node value matrix is 4 x P and the center row equals the concat projection oracle") {
    RngStream rng(31);
    FilterParams p = FilterParams::init(3, 5, 2, rng);
    Tensor xt = random_tensor(rng, 1, 3), xa = random_tensor(rng, 1, 3),
           xv = random_tensor(rng, 1, 3);
    Tensor v = build_filter_values(p, xt, xa, xv);
    CHECK(v.rows() == 4);
    CHECK(v.cols() == 5);

    // oracle: explicit concatenation times the projection, plain loops
    std::vector<double> cat;
    for (const Tensor* x : {&xt, &xa, &xv})
        cat.insert(cat.end(), x->values().begin(), x->values().end());
    for (std::size_t j = 0; j < 5; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 9; ++k) acc += cat[k] * p.proj_center.at(k, j);
        CHECK(std::fabs(v.at(0, j) - acc) <= 1e-12);
    }
    // unimodal rows: per-modality projections
    for (std::size_t j = 0; j < 5; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < 3; ++k) acc += xa.at(0, k) * p.proj_modality[1].at(k, j);
        CHECK(std::fabs(v.at(2, j) - acc) <= 1e-12);
    }
}

TEST_CASE("relation vector: zero inputs, selector transform, random oracle") {
    FilterParams zp = zero_params(2, 3, 2);
    Tensor zv = Tensor::zeros(4, 3);
    Tensor c0 = relation_vector(zp, zv, 1, 0, 0);
    for (double x : c0.values()) CHECK(x == 0.0);

    // selector: W picks the V_i block
    FilterParams sel = zero_params(2, 3, 2);
    std::vector<double> w((2 * 3 + 2) * 3, 0.0);
    for (int i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
    sel.pair_transform = Tensor::from_data(2 * 3 + 2, 3, std::move(w), true);
    RngStream rng(32);
    Tensor v = random_tensor(rng, 4, 3);
    Tensor c = relation_vector(sel, v, 2, 0, 1);
    for (std::size_t j = 0; j < 3; ++j) CHECK(c.at(0, j) == v.at(2, j));

    // random small dims: concatenate-then-multiply oracle
    FilterParams p = FilterParams::init(2, 3, 2, rng);
    Tensor values = random_tensor(rng, 4, 3);
    Tensor out = relation_vector(p, values, 1, 0, 2);
    std::vector<double> cat;
    for (std::size_t j = 0; j < 3; ++j) cat.push_back(values.at(1, j));
    for (std::size_t j = 0; j < 3; ++j) cat.push_back(values.at(0, j));
    for (std::size_t j = 0; j < 2; ++j) cat.push_back(p.relation_embeddings.at(2, j));
    for (std::size_t j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < cat.size(); ++k) acc += cat[k] * p.pair_transform.at(k, j);
        CHECK(std::fabs(out.at(0, j) - acc) <= 1e-12);
    }

    CHECK_THROWS_AS(relation_vector(p, values, 5, 0, 0), ContractError);
    CHECK_THROWS_AS(relation_vector(p, values, 0, 0, 3), ContractError);
}

TEST_CASE("filter attention: singleton, symmetry, softmax oracle") {
    RngStream rng(33);
    FilterParams p = FilterParams::init(2, 3, 2, rng);
    Tensor values = random_tensor(rng, 4, 3);

    Tensor single = filter_attention(p, values, 1, filter_neighborhood(1));
    REQUIRE(single.size() == 1);
    CHECK(single.item() == doctest::Approx(1.0).epsilon(1e-15));

    // equal scores over the center's three pairs: zero scorers
    FilterParams eq = FilterParams::init(2, 3, 2, rng);
    for (int k = 0; k < 3; ++k) eq.score_vector[k] = Tensor::zeros(3, 1, true);
    Tensor alphas = filter_attention(eq, values, kFilterCenter, filter_neighborhood(kFilterCenter));
    REQUIRE(alphas.size() == 3);
    for (double a : alphas.values()) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // arbitrary scores against a direct exp/sum oracle
    auto pairs = filter_neighborhood(kFilterCenter);
    Tensor got = filter_attention(p, values, kFilterCenter, pairs);
    std::vector<double> scores;
    for (const auto& pr : pairs) {
        Tensor c = relation_vector(p, values, kFilterCenter, pr.neighbor, pr.relation);
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += c.at(0, j) * p.score_vector[pr.relation].at(j, 0);
        scores.push_back(s);
    }
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s);
    for (std::size_t i = 0; i < scores.size(); ++i)
        CHECK(std::fabs(got.values()[i] - std::exp(scores[i]) / denom) <= 1e-12);

    CHECK_THROWS_AS(filter_attention(p, values, 0, {}), ContractError);
}

TEST_CASE("filtered feature: singleton copy, uniform mean, hand-computed tiny instance") {
    RngStream rng(34);
    FilterParams p = FilterParams::init(2, 3, 2, rng);
    Tensor values = random_tensor(rng, 4, 3);

    // single pair: h equals that c vector
    Tensor h1 = filtered_feature(p, values, 1, filter_neighborhood(1));
    Tensor c1 = relation_vector(p, values, 1, kFilterCenter, 0);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(h1.at(0, j) == doctest::Approx(c1.at(0, j)).epsilon(1e-12));

    // uniform alphas: mean of the c vectors
    FilterParams eq = FilterParams::init(2, 3, 2, rng);
    for (int k = 0; k < 3; ++k) eq.score_vector[k] = Tensor::zeros(3, 1, true);
    auto pairs = filter_neighborhood(kFilterCenter);
    Tensor hc = filtered_feature(eq, values, kFilterCenter, pairs);
    std::vector<double> mean(3, 0.0);
    for (const auto& pr : pairs) {
        Tensor c = relation_vector(eq, values, kFilterCenter, pr.neighbor, pr.relation);
        for (std::size_t j = 0; j < 3; ++j) mean[j] += c.at(0, j) / 3.0;
    }
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(hc.at(0, j) - mean[j]) <= 1e-12);

    // tiny brute-force: P=2, two pairs, every number written out by hand
    FilterParams tiny = zero_params(1, 2, 1);
    // V rows: center (1,2), text (3,4), audio (5,6), vision (0,0)
    Tensor tv = Tensor::from_data(4, 2, {1, 2, 3, 4, 5, 6, 0, 0});
    // W maps [vi0 vi1 vj0 vj1 ck] -> (vi0 + vj1, ck)
    tiny.pair_transform = Tensor::from_data(5, 2, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1}, true);
    tiny.relation_embeddings = Tensor::from_data(3, 1, {10, 20, 30}, true);
    tiny.score_vector[0] = Tensor::from_data(2, 1, {0.1, 0.0}, true);
    tiny.score_vector[1] = Tensor::from_data(2, 1, {0.1, 0.0}, true);
    tiny.score_vector[2] = Tensor::from_data(2, 1, {0.1, 0.0}, true);
    std::vector<FilterPair> two = {FilterPair{1, 0}, FilterPair{2, 1}};
    // c(center,text,rel0)  = (v_c0 + v_t1, C_0) = (1 + 4, 10) = (5, 10)
    // c(center,audio,rel1) = (1 + 6, 20) = (7, 20)
    // scores: 0.5 and 0.7 -> alpha = softmax = (e^.5, e^.7)/sum
    const double a0 = std::exp(0.5) / (std::exp(0.5) + std::exp(0.7));
    const double a1 = std::exp(0.7) / (std::exp(0.5) + std::exp(0.7));
    Tensor h = filtered_feature(tiny, tv, kFilterCenter, two);
    CHECK(std::fabs(h.at(0, 0) - (a0 * 5 + a1 * 7)) <= 1e-12);
    CHECK(std::fabs(h.at(0, 1) - (a0 * 10 + a1 * 20)) <= 1e-12);
}

TEST_CASE("attention weights sum to one over 1000 random parameterizations") {
    RngStream rng(35);
    for (int trial = 0; trial < 1000; ++trial) {
        FilterParams p = FilterParams::init(2, 3, 2, rng);
        Tensor values = random_tensor(rng, 4, 3, -3.0, 3.0);
        const std::size_t node = trial % 4;
        Tensor alphas = filter_attention(p, values, node, filter_neighborhood(node));
        double sum = 0.0;
        for (double a : alphas.values()) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
            sum += a;
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("filtered feature lies in the convex hull of its relation vectors") {
    RngStream rng(36);
    for (int trial = 0; trial < 50; ++trial) {
        FilterParams p = FilterParams::init(2, 4, 3, rng);
        Tensor values = random_tensor(rng, 4, 4, -2.0, 2.0);
        auto pairs = filter_neighborhood(kFilterCenter);
        Tensor h = filtered_feature(p, values, kFilterCenter, pairs);
        for (std::size_t j = 0; j < 4; ++j) {
            double lo = 1e300, hi = -1e300;
            for (const auto& pr : pairs) {
                Tensor c = relation_vector(p, values, kFilterCenter, pr.neighbor, pr.relation);
                lo = std::min(lo, c.at(0, j));
                hi = std::max(hi, c.at(0, j));
            }
            CHECK(h.at(0, j) >= lo - 1e-9);
            CHECK(h.at(0, j) <= hi + 1e-9);
        }
    }
}

TEST_CASE("sequence filtering preserves length and has width P") {
    RngStream rng(37);
    FilterParams p = FilterParams::init(3, 5, 2, rng);
    auto out = filter_sequences(p, random_tensor(rng, 6, 3), random_tensor(rng, 6, 3),
                                random_tensor(rng, 6, 3));
    for (const auto& x : out) {
        CHECK(x.rows() == 6);
        CHECK(x.cols() == 5);
    }
}

TEST_CASE("gradient check through the filtering stage") {
    RngStream rng(38);
    FilterParams p = FilterParams::init(2, 3, 2, rng);
    Tensor seq_t = random_tensor(rng, 2, 2), seq_a = random_tensor(rng, 2, 2),
           seq_v = random_tensor(rng, 2, 2);
    Tensor w = random_tensor(rng, 3, 1);
    auto f = [&]() {
        auto out = filter_sequences(p, seq_t, seq_a, seq_v);
        return sum_all(matmul(concat_rows({out[0], out[1], out[2]}), w));
    };
    std::vector<NamedTensor> params;
    p.collect("filter", params);
    for (const auto& r : grad_check(f, params)) {
        INFO(r.parameter_name, " err=", r.max_relative_error);
        CHECK(r.pass);
    }
}
