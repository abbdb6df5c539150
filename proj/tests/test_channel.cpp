// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include <doctest.h>

#include <cmath>

#include "mcadet/channel.hpp"

using namespace mcadet;

namespace {

CMat random_cmat(RngStream& stream, int rows, int cols, double sigma) {
    CMat m(rows, cols);
    for (auto& v : m.data) v = cplx{stream.gaussian(0.0, sigma), stream.gaussian(0.0, sigma)};
    return m;
}

}  // namespace

TEST_CASE("draw_ssfc dimensions and realified shape") {
    ScenarioParams p;
    RngStream stream(1, 0);
    CMat g = draw_ssfc(p, stream);
    CHECK(g.rows == 64);
    CHECK(g.cols == 4);
    Mat gr = realify(g);
    CHECK(gr.rows == 128);
    CHECK(gr.cols == 8);
}

TEST_CASE("draw_ssfc rejects non-positive sigma_g") {
    ScenarioParams p;
    p.sigma_g = 0.0;
    RngStream stream(1, 0);
    CHECK_THROWS_AS(draw_ssfc(p, stream), ConfigError);
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("ssfc per-dimension sample variance") {
    ScenarioParams p;
    p.rx_antennas = 50;
    p.users = 20;  // 1000 complex entries per draw
    RngStream stream(5, 0);
    double sum2 = 0.0;
    long long n = 0;
    for (int trial = 0; trial < 100; ++trial) {
        CMat g = draw_ssfc(p, stream);
        for (const cplx& v : g.data) {
            sum2 += v.real() * v.real() + v.imag() * v.imag();
            n += 2;
        }
    }
    const double var = sum2 / static_cast<double>(n);
    CHECK(std::abs(var - 0.5) < 0.02 * 0.5);
}

TEST_CASE("path loss formula and equal-distance symmetry") {
    ScenarioParams p;
    // d = 100 m, exponent 3.76, 38.46 dB at 1 m -> 38.46 + 37.6 * 2
    CHECK(pathloss_db(p, 100.0) == doctest::Approx(113.66));
    CHECK(lambda_from_distance(p, 100.0) ==
          doctest::Approx(std::pow(10.0, -11.366)).epsilon(1e-12));
    // minimum distance of 1 m is enforced
    CHECK(pathloss_db(p, 0.01) == doctest::Approx(p.pathloss_ref_db));

    // equal distances give equal lambda
    CHECK(lambda_from_distance(p, 42.0) == lambda_from_distance(p, 42.0));
}

TEST_CASE("place_uts stays within the cell and reproduces deterministically") {
    ScenarioParams p;
    RngStream s1(9, 4);
    RngStream s2(9, 4);
    auto a = place_uts(p, s1);
    auto b = place_uts(p, s2);
    CHECK(a == b);
    const double lambda_edge = lambda_from_distance(p, p.cell_radius_m);
    const double lambda_near = lambda_from_distance(p, 1.0);
    for (double l : a) {
        CHECK(l >= lambda_edge);
        CHECK(l <= lambda_near);
    }
}

TEST_CASE("realify trivial block structures") {
    CMat real_only(2, 2);
    real_only(0, 0) = 1.0;
    real_only(1, 1) = 2.0;
    Mat r = realify(real_only);
    CHECK(r(0, 0) == 1.0);
    CHECK(r(2, 2) == 1.0);
    CHECK(r(0, 2) == 0.0);
    CHECK(r(2, 0) == 0.0);

    CMat imag_id(2, 2);
    imag_id(0, 0) = cplx{0.0, 1.0};
    imag_id(1, 1) = cplx{0.0, 1.0};
    Mat ri = realify(imag_id);
    // [[0, -I], [I, 0]]
    CHECK(ri(0, 0) == 0.0);
    CHECK(ri(0, 2) == -1.0);
    CHECK(ri(2, 0) == 1.0);
    CHECK(ri(2, 2) == 0.0);
}

TEST_CASE("realify respects complex multiplication") {
    RngStream stream(17, 0);
    CMat a = random_cmat(stream, 5, 3, 1.0);
    std::vector<cplx> v(3);
    for (auto& x : v) x = cplx{stream.gaussian(0.0, 1.0), stream.gaussian(0.0, 1.0)};

    Vec lhs = mat_vec(realify(a), stack_complex(v));
    Vec rhs = stack_complex(cmat_vec(a, v));
    for (size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("realify is a ring homomorphism on product and sum") {
    RngStream stream(19, 2);
    CMat a = random_cmat(stream, 4, 4, 1.0);
    CMat b = random_cmat(stream, 4, 4, 1.0);

    Mat prod_real = realify(a * b);
    Mat prod_mapped = realify(a) * realify(b);
    for (size_t i = 0; i < prod_real.data.size(); ++i)
        CHECK(prod_real.data[i] == doctest::Approx(prod_mapped.data[i]).epsilon(1e-12));

    CMat sum(4, 4);
    for (size_t i = 0; i < sum.data.size(); ++i) sum.data[i] = a.data[i] + b.data[i];
    Mat sum_real = realify(sum);
    Mat sum_mapped = realify(a) + realify(b);
    for (size_t i = 0; i < sum_real.data.size(); ++i)
        CHECK(sum_real.data[i] == doctest::Approx(sum_mapped.data[i]).epsilon(1e-14));
}

TEST_CASE("build_gram single-antenna single-user case") {
    ScenarioParams p;
    p.rx_antennas = 1;
    p.users = 1;
    CMat g(1, 1);
    g(0, 0) = cplx{1.0, 0.0};
    ChannelRealization c = make_realization(p, g, {1.0}, 0.0);
    // W = I2, X = (1 - 2*0.5) I2 = 0
    CHECK(c.w(0, 0) == doctest::Approx(1.0));
    CHECK(c.w(1, 1) == doctest::Approx(1.0));
    CHECK(c.w(0, 1) == doctest::Approx(0.0));
    CHECK(c.x(0, 0) == doctest::Approx(0.0));
    CHECK(c.x(1, 1) == doctest::Approx(0.0));
    CHECK(c.q_zf[0] == doctest::Approx(1.0));
}

TEST_CASE("build_gram rejects non-positive lambda") {
    ScenarioParams p;
    p.rx_antennas = 2;
    p.users = 2;
    RngStream stream(3, 0);
    Mat g = realify(draw_ssfc(p, stream));
    CHECK_THROWS_AS(build_gram(g, p, 0.1, {1.0, 0.0}), NonPositiveLambda);
}

TEST_CASE("gram block structure matches the brute-force product") {
    ScenarioParams p;
    RngStream stream(31, 0);
    ChannelRealization c = make_realization(p, draw_ssfc(p, stream), {1.0, 1.0, 1.0, 1.0}, 0.05);
    const int k2 = 8;
    const int k = k2 / 2;

    Mat brute = transpose(c.g) * c.g;
    const double scale = norm_inf(brute);
    for (size_t i = 0; i < brute.data.size(); ++i)
        CHECK(std::abs(c.w.data[i] - brute.data[i]) <= 1e-12 * scale);

    // Block structure: top-left = bottom-right and top-right = -(bottom-left),
    // i.e. W = [[Re(W~), -Im(W~)], [Im(W~), Re(W~)]].
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            CHECK(std::abs(c.w(i, j) - c.w(k + i, k + j)) <= 1e-12 * scale);
            CHECK(std::abs(c.w(i, k + j) + c.w(k + i, j)) <= 1e-12 * scale);
        }

    // Symmetry and X = W - 2R sigma_g^2 I exactly by construction.
    for (int i = 0; i < k2; ++i)
        for (int j = 0; j < k2; ++j) {
            CHECK(std::abs(c.w(i, j) - c.w(j, i)) <= 1e-12 * scale);
            const double expect = c.w(i, j) - (i == j ? c.gram_shift : 0.0);
            CHECK(c.x(i, j) == expect);
        }

    for (int i = 0; i < k2; ++i) {
        CHECK(c.q_zf[i] == c.gram_shift);
        CHECK(c.q_mmse[i] == c.q_zf[i] + c.p[i]);
        CHECK(c.p[i] == doctest::Approx(0.05));
    }
}

TEST_CASE("H = G Lambda and H^T H = Lambda G^T G Lambda") {
    ScenarioParams p;
    p.rx_antennas = 16;
    p.users = 3;
    RngStream lstream(7, 1);
    RngStream gstream(7, 2);
    auto lambda = place_uts(p, lstream);
    ChannelRealization c = make_realization(p, draw_ssfc(p, gstream), lambda, 1e-3);

    Mat gl = c.g * Mat::diag(c.sqrt_lambda);
    const double hscale = std::max(norm_inf(c.h), 1e-300);
    for (size_t i = 0; i < gl.data.size(); ++i)
        CHECK(std::abs(c.h.data[i] - gl.data[i]) <= 1e-12 * hscale);

    Mat hth = transpose(c.h) * c.h;
    Mat lam = Mat::diag(c.sqrt_lambda);
    Mat rhs = lam * (transpose(c.g) * c.g) * lam;
    const double scale = norm_inf(hth);
    for (size_t i = 0; i < hth.data.size(); ++i)
        CHECK(std::abs(hth.data[i] - rhs.data[i]) <= 1e-10 * scale);
}

TEST_CASE("diagonal of Im(W~) vanishes and the chi-square mean appears on the diagonal") {
    ScenarioParams p;
    RngStream stream(101, 0);
    const int draws = 400;
    double diag_sum = 0.0;
    long long diag_n = 0;
    for (int t = 0; t < draws; ++t) {
        CMat g = draw_ssfc(p, stream);
        CMat w = hermitian_gram(g);
        for (int i = 0; i < w.rows; ++i) {
            CHECK(std::abs(w(i, i).imag()) <= 1e-10 * std::abs(w(i, i).real()));
            diag_sum += w(i, i).real();
            ++diag_n;
        }
    }
    const double expect = 2.0 * p.rx_antennas * p.sigma_g2();
    CHECK(std::abs(diag_sum / diag_n - expect) < 0.02 * expect);
}

TEST_CASE("thermal noise power follows the bandwidth and noise figure") {
    ScenarioParams p;
    const double dbm = 10.0 * std::log10(thermal_noise_mw(p));
    CHECK(dbm == doctest::Approx(-174.0 + 10.0 * std::log10(25e6) + 7.0).epsilon(1e-12));
}
