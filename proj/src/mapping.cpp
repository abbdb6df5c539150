// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/mapping.hpp"

#include <algorithm>
#include <cmath>

namespace mcadet {

void DeviceRange::validate() const {
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw ConfigError("device range: need 0 < omega_min < omega_max");
}

double compute_alpha(const Mat& u, MappingScheme scheme, DeviceRange range) {
    if (scheme.kind == MappingKind::Amf) {
        const double m = max_abs(u);
        if (m == 0.0) throw ZeroMatrix("compute_alpha: all-zero matrix");
        return range.omega() / m;
    }
    if (scheme.beta <= 0.0) throw ConfigError("compute_alpha: FMF beta must be > 0");
    double mean = 0.0;
    for (double v : u.data) mean += v;
    mean /= static_cast<double>(u.data.size());
    double var = 0.0;
    for (double v : u.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(u.data.size());
    const double sigma_u = std::sqrt(var);
    if (sigma_u == 0.0) throw ZeroMatrix("compute_alpha: zero-spread matrix under FMF");
    return range.omega() / (scheme.beta * sigma_u);
}

ConductancePair map_matrix(const Mat& u, double alpha, DeviceRange range) {
    if (alpha <= 0.0) throw SimError("map_matrix: alpha must be > 0");
    // Clamping by less than rounding noise (an entry landing exactly on a
    // window edge) does not count as truncation.
    const double fuzz = 1e-12 * range.omega();
    ConductancePair p;
    p.alpha = alpha;
    p.a = Mat(u.rows, u.cols);
    p.b = Mat(u.rows, u.cols);
    for (int i = 0; i < u.rows; ++i)
        for (int j = 0; j < u.cols; ++j) {
            const double v = u(i, j);
            const double a = v > 0.0 ? range.omega_max : range.omega_min;
            const double b = a - alpha * v;
            const double bc = range.clamp(b);
            p.a(i, j) = a;
            p.b(i, j) = bc;
            if (std::abs(bc - b) > fuzz) ++p.truncated;
        }
    return p;
}

DiagonalMap map_q_onto_c(const Vec& q, double alpha_fb, DeviceRange range, bool strict) {
    DiagonalMap m;
    m.c.resize(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) throw StabilityViolation("map_q_onto_c: Q diagonal must be positive");
        const double target = alpha_fb * q[i];
        const double clamped = range.clamp(target);
        if (clamped != target) {
            if (strict) throw InfeasibleMapping("map_q_onto_c: diagonal target out of range");
            m.feasible = false;
            ++m.truncated;
        }
        m.c[i] = clamped;
    }
    return m;
}

ThetaMap map_lambda_onto_theta(const std::vector<double>& lambda, DeviceRange range) {
    for (double l : lambda)
        if (l <= 0.0) throw NonPositiveLambda("map_lambda_onto_theta: lambda must be > 0");
    const double lmax = *std::max_element(lambda.begin(), lambda.end());
    const double lmin = *std::min_element(lambda.begin(), lambda.end());
    const double root_lbar_min = std::sqrt(lmin / lmax);

    double theta0 = std::sqrt(range.omega_min * range.omega_max);
    if (root_lbar_min * theta0 < range.omega_min)
        theta0 = std::min(range.omega_max, range.omega_min / root_lbar_min);
    if (root_lbar_min * theta0 < range.omega_min * (1.0 - 1e-12))
        throw DynamicRangeExceeded("map_lambda_onto_theta: weakest terminal unrepresentable");

    ThetaMap t;
    t.theta0 = theta0;
    t.lambda_norm = std::sqrt(lmax);
    const size_t k = lambda.size();
    t.theta.resize(2 * k);
    for (size_t i = 0; i < k; ++i) {
        const double dev = range.clamp(std::sqrt(lambda[i] / lmax) * theta0);
        t.theta[i] = dev;
        t.theta[k + i] = dev;
    }
    return t;
}

double deviate_device(double target, double sigma_m, DeviceRange range, RngStream& stream) {
    return range.clamp(target + stream.gaussian(0.0, sigma_m));
}

void deviate_matrix(Mat& g, double sigma_m, DeviceRange range, RngStream& stream) {
    if (sigma_m == 0.0) return;
    for (double& v : g.data) v = range.clamp(v + stream.gaussian(0.0, sigma_m));
}

void deviate_vector(Vec& g, double sigma_m, DeviceRange range, RngStream& stream) {
    if (sigma_m == 0.0) return;
    for (double& v : g) v = range.clamp(v + stream.gaussian(0.0, sigma_m));
}

}  // namespace mcadet
