// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <vector>

#include "mcadet/linalg.hpp"

namespace mcadet {

// Uplink scenario: a base station with rx_antennas antennas serving
// `users` single-antenna terminals. sigma_g is the per-dimension standard
// deviation of the small-scale fading coefficients. The path loss model
// (log-distance, 38.46 dB reference loss at 1 m, exponent 3.76) and the
// noise figure are configurable assumptions; see configs/defaults.toml.
struct ScenarioParams {
    int rx_antennas = 64;  // R
    int users = 4;         // K
    double cell_radius_m = 150.0;
    double tx_power_dbm = 20.0;
    double carrier_freq_hz = 2.0e9;
    double bandwidth_hz = 25.0e6;
    double noise_figure_db = 7.0;
    double sigma_g = 0.7071067811865476;  // sqrt(0.5): unit total variance per entry
    double pathloss_exponent = 3.76;
    double pathloss_ref_db = 38.46;  // at 1 m

    double sigma_g2() const { return sigma_g * sigma_g; }
    void validate() const;  // throws ConfigError
};

// One channel draw plus every derived quantity the detectors and the
// crossbar builder need. Real-valued matrices use the stacked
// [[Re, -Im], [Im, Re]] convention, so H, G are 2R x 2K and the Gram
// quantities are 2K x 2K. Diagonal matrices are stored as vectors.
struct ChannelRealization {
    CMat g_c;                 // small-scale fading, R x K
    std::vector<double> lambda;  // large-scale fading powers, K
    CMat h_c;                 // g_c * diag(sqrt(lambda))
    Mat g;                    // 2R x 2K
    Mat h;                    // 2R x 2K
    Vec sqrt_lambda;          // diag of real Lambda, length 2K
    Mat w;                    // G^T G
    Mat x;                    // W - 2R sigma_g^2 I
    Vec q_zf;                 // diag, 2K
    Vec q_mmse;               // diag, 2K
    Vec p;                    // diag, 2K (rho / lambda_k, repeated)
    double rho = 0.0;
    double gram_shift = 0.0;  // 2R sigma_g^2
};

// Small-scale fading draw: entries are CN(0, 2 sigma_g^2), i.e. real and
// imaginary parts i.i.d. N(0, sigma_g^2).
CMat draw_ssfc(const ScenarioParams& params, RngStream& stream);

// Large-scale fading for K terminals placed area-uniformly in the cell
// disc, with a 1 m minimum distance.
std::vector<double> place_uts(const ScenarioParams& params, RngStream& stream);

// Path loss (dB) and fading power at distance d.
double pathloss_db(const ScenarioParams& params, double distance_m);
double lambda_from_distance(const ScenarioParams& params, double distance_m);

// Complex m x n -> real 2m x 2n stacked form.
Mat realify(const CMat& a);

// Stack a complex vector as [Re; Im].
Vec stack_complex(const std::vector<cplx>& v);

struct GramDecomposition {
    Mat w;
    Mat x;
    Vec q_zf;
    Vec q_mmse;
    Vec p;
};

// W = G^T G, X = W - 2R sigma_g^2 I, Q_zf = 2R sigma_g^2 I,
// Q_mmse = Q_zf + P with P = diag(rho / lambda_k) repeated over both
// halves. Throws NonPositiveLambda.
GramDecomposition build_gram(const Mat& g, const ScenarioParams& params, double rho,
                             const std::vector<double>& lambda);

// Full realization from a fading draw and known large-scale coefficients.
ChannelRealization make_realization(const ScenarioParams& params, CMat g_c,
                                    std::vector<double> lambda, double rho);

// Thermal noise power (variance of the complex AWGN per receive antenna)
// in the same milliwatt units as the transmit symbol energy.
double thermal_noise_mw(const ScenarioParams& params);

}  // namespace mcadet
