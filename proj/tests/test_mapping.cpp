// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include <doctest.h>

#include <cmath>

#include "mcadet/mapping.hpp"

using namespace mcadet;

namespace {

Mat gaussian_matrix(RngStream& stream, int rows, int cols, double sigma) {
    Mat m(rows, cols);
    for (double& v : m.data) v = stream.gaussian(0.0, sigma);
    return m;
}

double population_std(const Mat& u) {
    double mean = 0.0;
    for (double v : u.data) mean += v;
    mean /= static_cast<double>(u.data.size());
    double var = 0.0;
    for (double v : u.data) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(u.data.size()));
}

}  // namespace

TEST_CASE("mapping factors are forced by the scheme definitions") {
    DeviceRange range;  // omega = 29.9 uS
    Mat u(2, 2);
    u(0, 0) = 2.0;
    u(0, 1) = -1.0;
    u(1, 0) = 0.5;
    u(1, 1) = -2.0;
    CHECK(compute_alpha(u, {MappingKind::Amf, 0.0}, range) ==
          doctest::Approx(29.9e-6 / 2.0).epsilon(1e-12));

    Mat unit(2, 2);  // population std exactly 1
    unit(0, 0) = 1.0;
    unit(0, 1) = -1.0;
    unit(1, 0) = 1.0;
    unit(1, 1) = -1.0;
    CHECK(compute_alpha(unit, {MappingKind::Fmf, 3.0}, range) ==
          doctest::Approx(29.9e-6 / 3.0).epsilon(1e-12));
}

TEST_CASE("compute_alpha rejects degenerate matrices") {
    DeviceRange range;
    Mat zero(3, 3);
    CHECK_THROWS_AS(compute_alpha(zero, {MappingKind::Amf, 0.0}, range), ZeroMatrix);
    Mat constant(2, 2);
    for (double& v : constant.data) v = 5.0;
    CHECK_THROWS_AS(compute_alpha(constant, {MappingKind::Fmf, 2.0}, range), ZeroMatrix);
}

TEST_CASE("AMF never truncates") {
    DeviceRange range;
    RngStream stream(3, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Mat u = gaussian_matrix(stream, 8, 16, 2.0);
        const double alpha = compute_alpha(u, {MappingKind::Amf, 0.0}, range);
        ConductancePair pair = map_matrix(u, alpha, range);
        CHECK(pair.truncated == 0);
        // exact reconstruction, relative to the matrix scale
        const double scale = max_abs(u);
        for (int i = 0; i < u.rows; ++i)
            for (int j = 0; j < u.cols; ++j) {
                const double back = (pair.a(i, j) - pair.b(i, j)) / alpha;
                CHECK(std::abs(back - u(i, j)) <= 1e-12 * scale);
            }
    }
}

TEST_CASE("map_matrix sign rule and exactness inside the window") {
    DeviceRange range;
    Mat u(1, 3);
    u(0, 0) = 0.0;
    u(0, 1) = 2.0;
    u(0, 2) = -1.5;
    const double alpha = 1e-6;  // alpha*|u| well inside omega
    ConductancePair p = map_matrix(u, alpha, range);

    // u = 0: both devices parked at omega_min, zero net contribution
    CHECK(p.a(0, 0) == range.omega_min);
    CHECK(p.b(0, 0) == range.omega_min);

    // u > 0: a at omega_max, difference exact
    CHECK(p.a(0, 1) == range.omega_max);
    CHECK(p.a(0, 1) - p.b(0, 1) == doctest::Approx(alpha * 2.0).epsilon(1e-12));

    // u < 0: a at omega_min
    CHECK(p.a(0, 2) == range.omega_min);
    CHECK(p.a(0, 2) - p.b(0, 2) == doctest::Approx(-alpha * 1.5).epsilon(1e-12));
    CHECK(p.truncated == 0);
}

TEST_CASE("FMF beta = 1 clips at one sigma and truncates about a third of the entries") {
    DeviceRange range;
    RngStream stream(11, 0);
    Mat u = gaussian_matrix(stream, 100, 100, 1.7);
    const MappingScheme scheme{MappingKind::Fmf, 1.0};
    const double sigma_u = population_std(u);
    const double alpha = compute_alpha(u, scheme, range);
    CHECK(alpha == doctest::Approx(range.omega() / sigma_u).epsilon(1e-12));

    ConductancePair p = map_matrix(u, alpha, range);
    const double frac = static_cast<double>(p.truncated) / static_cast<double>(u.data.size());
    CHECK(frac == doctest::Approx(0.3173).epsilon(0.05));  // P(|N| > sigma)

    // reconstructed matrix equals clip(U, +-sigma_u)
    const double clip_at = range.omega() / alpha;
    for (int i = 0; i < u.rows; ++i)
        for (int j = 0; j < u.cols; ++j) {
            const double expect = std::clamp(u(i, j), -clip_at, clip_at);
            const double back = (p.a(i, j) - p.b(i, j)) / alpha;
            CHECK(std::abs(back - expect) <= 1e-12 * sigma_u);
        }
}

TEST_CASE("FMF truncation count is non-increasing in beta") {
    DeviceRange range;
    RngStream stream(13, 0);
    Mat u = gaussian_matrix(stream, 64, 64, 1.0);
    long long prev = static_cast<long long>(u.data.size()) + 1;
    for (double beta : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        const double alpha = compute_alpha(u, {MappingKind::Fmf, beta}, range);
        ConductancePair p = map_matrix(u, alpha, range);
        CHECK(p.truncated <= prev);
        prev = p.truncated;
    }
}

TEST_CASE("diagonal mapping feasibility") {
    DeviceRange range;
    Vec q(8, 64.0);
    const double alpha_ok = 20e-6 / 64.0;
    DiagonalMap ok = map_q_onto_c(q, alpha_ok, range, true);
    CHECK(ok.feasible);
    for (double c : ok.c) CHECK(c == doctest::Approx(20e-6).epsilon(1e-12));

    const double alpha_bad = 40e-6 / 64.0;  // 40 uS target > omega_max
    CHECK_THROWS_AS(map_q_onto_c(q, alpha_bad, range, true), InfeasibleMapping);
    DiagonalMap flagged = map_q_onto_c(q, alpha_bad, range, false);
    CHECK_FALSE(flagged.feasible);
    CHECK(flagged.truncated == 8);
    for (double c : flagged.c) CHECK(c == range.omega_max);
}

TEST_CASE("feedback stage reconstructs alpha * (X + Q) when nothing truncates") {
    DeviceRange range;
    RngStream stream(17, 0);
    Mat x = gaussian_matrix(stream, 8, 8, 5.0);
    Vec q(8);
    for (auto& v : q) v = 60.0 + stream.uniform() * 10.0;

    double qmax = 0.0, xmax = 0.0;
    for (double v : q) qmax = std::max(qmax, v);
    xmax = max_abs(x);
    const double alpha = std::min(range.omega() / xmax, range.omega_max / qmax);

    ConductancePair de = map_matrix(x, alpha, range);
    DiagonalMap c = map_q_onto_c(q, alpha, range, true);
    CHECK(de.truncated == 0);

    // C + D - E entrywise equals alpha (X + Q) to 1e-12 relative scale.
    const double scale = alpha * (qmax + xmax);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const double got = (i == j ? c.c[i] : 0.0) + de.a(i, j) - de.b(i, j);
            const double expect = alpha * (x(i, j) + (i == j ? q[i] : 0.0));
            CHECK(std::abs(got - expect) <= 1e-12 * scale);
        }
}

TEST_CASE("equal large-scale coefficients give a unity amplifier stage") {
    DeviceRange range;
    ThetaMap t = map_lambda_onto_theta({0.3, 0.3, 0.3, 0.3}, range);
    CHECK(t.theta.size() == 8);
    CHECK(t.theta0 == doctest::Approx(std::sqrt(range.omega_min * range.omega_max)).epsilon(1e-12));
    for (double th : t.theta) CHECK(th == doctest::Approx(t.theta0).epsilon(1e-12));
    CHECK(t.lambda_norm == doctest::Approx(std::sqrt(0.3)).epsilon(1e-12));
}

TEST_CASE("40 dB lambda spread re-centers theta0") {
    DeviceRange range;
    // sqrt(lbar_min) = 0.01 < omega_min / theta0_geo: re-center to 10 uS.
    ThetaMap t = map_lambda_onto_theta({1.0, 1e-4}, range);
    CHECK(t.theta0 == doctest::Approx(range.omega_min / 0.01).epsilon(1e-9));
    CHECK(t.theta[1] == doctest::Approx(range.omega_min).epsilon(1e-9));
    CHECK(t.theta[0] == doctest::Approx(t.theta0).epsilon(1e-12));
}

TEST_CASE("lambda spread beyond the device window is rejected") {
    DeviceRange range;  // (omega_max/omega_min)^2 = 9e4, just under 50 dB
    CHECK_THROWS_AS(map_lambda_onto_theta({1.0, 1e-6}, range), DynamicRangeExceeded);
    CHECK_THROWS_AS(map_lambda_onto_theta({1.0, 0.0}, range), NonPositiveLambda);
}

TEST_CASE("deviation statistics and range safety") {
    DeviceRange range;
    RngStream s0(23, 0);
    Mat m(10, 10);
    for (double& v : m.data) v = 15e-6;
    Mat copy = m;
    deviate_matrix(copy, 0.0, range, s0);
    CHECK(copy.data == m.data);

    // 1% omega deviation: sample std about 0.299 uS, measured at
    // mid-window targets where clamping never engages.
    const double sigma_m = 0.01 * range.omega();
    CHECK(sigma_m == doctest::Approx(0.299e-6).epsilon(1e-12));
    RngStream s1(23, 1);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = deviate_device(15e-6, sigma_m, range, s1) - 15e-6;
        sum += d;
        sum2 += d * d;
    }
    const double mean = sum / n;
    const double std_dev = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(std_dev - sigma_m) < 0.02 * sigma_m);

    // 0.5% omega configuration accepted, everything stays in range even
    // for targets at the window edges.
    RngStream s2(23, 2);
    Vec edges(1000);
    for (size_t i = 0; i < edges.size(); ++i)
        edges[i] = i % 2 == 0 ? range.omega_min : range.omega_max;
    deviate_vector(edges, 0.005 * range.omega(), range, s2);
    for (double g : edges) {
        CHECK(g >= range.omega_min);
        CHECK(g <= range.omega_max);
    }
}

TEST_CASE("scale ledger composes the out gain") {
    ScaleLedger ledger;
    ledger.alpha_in = 10e-6;
    ledger.alpha_fb = 0.5e-6;
    ledger.lambda_norm = 2.0;
    ledger.v_scale = 0.25;
    ledger.sign = 1.0;
    CHECK(ledger.out_gain() == doctest::Approx(0.5e-6 / (10e-6 * 2.0 * 0.25)).epsilon(1e-12));
    ledger.sign = -1.0;
    CHECK(ledger.out_gain() < 0.0);
}
