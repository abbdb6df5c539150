// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <vector>

#include "mcadet/linalg.hpp"

namespace mcadet {

// Programmable conductance window of the memristive devices.
struct DeviceRange {
    double omega_min = 0.1e-6;  // siemens
    double omega_max = 30e-6;

    double omega() const { return omega_max - omega_min; }
    double clamp(double g) const {
        return g < omega_min ? omega_min : (g > omega_max ? omega_max : g);
    }
    void validate() const;  // throws ConfigError
};

enum class MappingKind { Fmf, Amf };

// FMF: alpha = omega / (beta * sigma_u), values outside +-beta*sigma_u
// get truncated. AMF: alpha = omega / max|u|, truncation-free.
struct MappingScheme {
    MappingKind kind = MappingKind::Amf;
    double beta = 3.0;  // FMF only
};

// Mapping factor (siemens per matrix unit) for matrix u under the given
// scheme. sigma_u is the population standard deviation of the entries of
// this specific instance. Throws ZeroMatrix for an all-zero matrix (or
// zero-spread matrix under FMF).
double compute_alpha(const Mat& u, MappingScheme scheme, DeviceRange range);

// A signed matrix mapped onto the difference of two conductance
// matrices: a = omega_max where u > 0 else omega_min, b = a - alpha*u,
// both clamped into the device window. truncated counts the entries
// whose pair got clamped, i.e. (a-b)/alpha = clip(u, +-omega/alpha).
struct ConductancePair {
    Mat a;
    Mat b;
    double alpha = 0.0;
    long long truncated = 0;
};

ConductancePair map_matrix(const Mat& u, double alpha, DeviceRange range);

// Positive diagonal mapped onto single devices: c_ii = alpha_fb * q_ii.
// Off-diagonal devices are absent (modeled as 0). The same alpha_fb used
// for X must be used here so that C + D - E = alpha_fb * (Q + X).
struct DiagonalMap {
    Vec c;
    bool feasible = true;
    long long truncated = 0;
};

// strict: throw InfeasibleMapping when a diagonal target falls outside
// the window; otherwise clamp and flag.
DiagonalMap map_q_onto_c(const Vec& q, double alpha_fb, DeviceRange range, bool strict);

// Large-scale fading onto the amplifier stage. With lbar_k =
// lambda_k / max(lambda), the feedback devices are theta_k =
// sqrt(lbar_k) * theta_0 and Theta = diag(theta_k / theta_0) realizes the
// normalized Lambda; lambda_norm = sqrt(max lambda) is the scalar removed
// by normalization. theta_0 starts at the geometric middle of the window
// and is re-centered upward when a weak terminal would fall below
// omega_min; if even theta_0 = omega_max cannot represent it, throws
// DynamicRangeExceeded. Returns 2K feedback values (K pattern repeated
// for the real and imaginary halves).
struct ThetaMap {
    double theta0 = 0.0;
    Vec theta;  // 2K
    double lambda_norm = 1.0;
};

ThetaMap map_lambda_onto_theta(const std::vector<double>& lambda, DeviceRange range);

// Additive N(0, sigma_m^2) programming error on one device, clamped to
// the physical window.
double deviate_device(double target, double sigma_m, DeviceRange range, RngStream& stream);
void deviate_matrix(Mat& g, double sigma_m, DeviceRange range, RngStream& stream);
void deviate_vector(Vec& g, double sigma_m, DeviceRange range, RngStream& stream);

// Every scalar factor introduced between the digital matrices and the
// circuit, composed into the single multiplier that recovers the
// estimate from the measured output voltages:
//   s_hat = out_gain() * v_out,
//   out_gain = sign * alpha_fb / (alpha_in * lambda_norm * v_scale).
// sign is -1 for the conventional topology, whose output is taken at the
// inverting OA stage.
struct ScaleLedger {
    double alpha_in = 1.0;     // input stage, maps G^T (or H^T)
    double alpha_fb = 1.0;     // feedback stage, maps X and Q jointly
    double lambda_norm = 1.0;  // sqrt(max lambda)
    double v_scale = 1.0;      // input voltage scaling, max|v_in| = 1 V
    double sign = 1.0;

    double out_gain() const { return sign * alpha_fb / (alpha_in * lambda_norm * v_scale); }
};

}  // namespace mcadet
