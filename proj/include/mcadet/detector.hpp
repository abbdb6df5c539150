// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include "mcadet/linalg.hpp"

namespace mcadet {

enum class DetectorVariant { Zf, Mmse };

struct DetectorKind {
    DetectorVariant variant = DetectorVariant::Mmse;
    double rho = 0.0;  // sigma_n^2 / p_s; ignored for ZF

    static DetectorKind zf() { return {DetectorVariant::Zf, 0.0}; }
    static DetectorKind mmse(double rho) { return {DetectorVariant::Mmse, rho}; }
};

// s_hat = (H^T H)^-1 H^T y. Throws SingularGram.
Vec detect_zf(const Mat& h, const Vec& y);

// s_hat = (H^T H + rho I)^-1 H^T y.
Vec detect_mmse(const Mat& h, const Vec& y, double rho);

// Decomposed form: s_hat = Lambda^-1 (X + Q)^-1 G^T y, with Q supplied as
// a diagonal (Q_zf or Q_mmse). Algebraically identical to the direct
// detectors when the inputs come from the same realization.
Vec detect_decomposed(const Mat& g, const Vec& sqrt_lambda, const Mat& x, const Vec& q,
                      const Vec& y);

// Equivalent-FLOP count for evaluating the detector densely with n = 2K,
// m = 2R, one real multiply or add = 1 FLOP:
//   gram    n(n+1)(2m-1)/2        symmetric half, mirrored
//   reg     n                     MMSE only
//   solve   (2/3)n^3 + 2n^2       dense LU plus both substitutions
//   matvec  n(2m-1)               H^T y
struct FlopReport {
    double gram = 0.0;
    double regularize = 0.0;
    double solve = 0.0;
    double matvec = 0.0;

    double total() const { return gram + regularize + solve + matvec; }
};

FlopReport count_flops(int rx_antennas, int users, DetectorKind kind);

}  // namespace mcadet
