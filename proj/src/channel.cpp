// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/channel.hpp"

#include <algorithm>
#include <cmath>

namespace mcadet {

void ScenarioParams::validate() const {
    if (rx_antennas < 1 || users < 1 || rx_antennas < users)
        throw ConfigError("scenario: need rx_antennas >= users >= 1");
    if (cell_radius_m <= 0.0) throw ConfigError("scenario: cell_radius_m must be > 0");
    if (sigma_g <= 0.0) throw ConfigError("scenario: sigma_g must be > 0");
    if (bandwidth_hz <= 0.0) throw ConfigError("scenario: bandwidth_hz must be > 0");
}

CMat draw_ssfc(const ScenarioParams& params, RngStream& stream) {
    if (params.sigma_g <= 0.0) throw ConfigError("draw_ssfc: sigma_g must be > 0");
    CMat g(params.rx_antennas, params.users);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            const double re = stream.gaussian(0.0, params.sigma_g);
            const double im = stream.gaussian(0.0, params.sigma_g);
            g(i, j) = cplx{re, im};
        }
    return g;
}

double pathloss_db(const ScenarioParams& params, double distance_m) {
    const double d = std::max(distance_m, 1.0);
    return params.pathloss_ref_db + 10.0 * params.pathloss_exponent * std::log10(d);
}

double lambda_from_distance(const ScenarioParams& params, double distance_m) {
    return std::pow(10.0, -pathloss_db(params, distance_m) / 10.0);
}

std::vector<double> place_uts(const ScenarioParams& params, RngStream& stream) {
    if (params.cell_radius_m <= 0.0) throw ConfigError("place_uts: cell_radius_m must be > 0");
    std::vector<double> lambda(params.users);
    for (int k = 0; k < params.users; ++k) {
        const double d = params.cell_radius_m * std::sqrt(stream.uniform());
        lambda[k] = lambda_from_distance(params, d);
    }
    return lambda;
}

Mat realify(const CMat& a) {
    Mat r(2 * a.rows, 2 * a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            const double re = a(i, j).real();
            const double im = a(i, j).imag();
            r(i, j) = re;
            r(i, a.cols + j) = -im;
            r(a.rows + i, j) = im;
            r(a.rows + i, a.cols + j) = re;
        }
    return r;
}

Vec stack_complex(const std::vector<cplx>& v) {
    Vec r(2 * v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        r[i] = v[i].real();
        r[v.size() + i] = v[i].imag();
    }
    return r;
}

GramDecomposition build_gram(const Mat& g, const ScenarioParams& params, double rho,
                             const std::vector<double>& lambda) {
    for (double l : lambda)
        if (l <= 0.0) throw NonPositiveLambda("build_gram: lambda entries must be > 0");
    const int n = g.cols;  // 2K
    const int k_users = n / 2;
    const double shift = 2.0 * params.rx_antennas * params.sigma_g2();

    GramDecomposition d;
    d.w = transpose(g) * g;
    d.x = d.w;
    for (int i = 0; i < n; ++i) d.x(i, i) -= shift;
    d.q_zf.assign(n, shift);
    d.p.resize(n);
    for (int i = 0; i < n; ++i) d.p[i] = rho / lambda[i % k_users];
    d.q_mmse.resize(n);
    for (int i = 0; i < n; ++i) d.q_mmse[i] = d.q_zf[i] + d.p[i];
    return d;
}

ChannelRealization make_realization(const ScenarioParams& params, CMat g_c,
                                    std::vector<double> lambda, double rho) {
    ChannelRealization c;
    c.g_c = std::move(g_c);
    c.lambda = std::move(lambda);
    c.rho = rho;
    c.gram_shift = 2.0 * params.rx_antennas * params.sigma_g2();

    const int k_users = c.g_c.cols;
    c.h_c = c.g_c;
    for (int j = 0; j < k_users; ++j) {
        const double s = std::sqrt(c.lambda[j]);
        for (int i = 0; i < c.h_c.rows; ++i) c.h_c(i, j) *= s;
    }
    c.g = realify(c.g_c);
    c.h = realify(c.h_c);
    c.sqrt_lambda.resize(2 * k_users);
    for (int j = 0; j < k_users; ++j) {
        const double s = std::sqrt(c.lambda[j]);
        c.sqrt_lambda[j] = s;
        c.sqrt_lambda[k_users + j] = s;
    }

    GramDecomposition d = build_gram(c.g, params, rho, c.lambda);
    c.w = std::move(d.w);
    c.x = std::move(d.x);
    c.q_zf = std::move(d.q_zf);
    c.q_mmse = std::move(d.q_mmse);
    c.p = std::move(d.p);
    return c;
}

double thermal_noise_mw(const ScenarioParams& params) {
    const double dbm = -174.0 + 10.0 * std::log10(params.bandwidth_hz) + params.noise_figure_db;
    return std::pow(10.0, dbm / 10.0);
}

}  // namespace mcadet
