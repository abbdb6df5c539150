// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/detector.hpp"

#include <cmath>

namespace mcadet {

Vec detect_zf(const Mat& h, const Vec& y) { return detect_mmse(h, y, 0.0); }

Vec detect_mmse(const Mat& h, const Vec& y, double rho) {
    if (rho < 0.0) throw SimError("detect_mmse: rho must be >= 0");
    Mat gram = transpose(h) * h;
    for (int i = 0; i < gram.rows; ++i) gram(i, i) += rho;
    const Vec hty = mat_vec(transpose(h), y);
    try {
        return solve_dense(gram, hty);
    } catch (const SingularMatrix& e) {
        throw SingularGram(e.what());
    }
}

Vec detect_decomposed(const Mat& g, const Vec& sqrt_lambda, const Mat& x, const Vec& q,
                      const Vec& y) {
    for (double s : sqrt_lambda)
        if (s <= 0.0) throw NonPositiveLambda("detect_decomposed: Lambda must be positive");
    Mat sys = x;
    for (int i = 0; i < sys.rows; ++i) sys(i, i) += q[i];
    const Vec gty = mat_vec(transpose(g), y);
    Vec z;
    try {
        z = solve_dense(sys, gty);
    } catch (const SingularMatrix& e) {
        throw SingularGram(e.what());
    }
    for (size_t i = 0; i < z.size(); ++i) z[i] /= sqrt_lambda[i];
    return z;
}

FlopReport count_flops(int rx_antennas, int users, DetectorKind kind) {
    const double n = 2.0 * users;
    const double m = 2.0 * rx_antennas;
    FlopReport r;
    r.gram = n * (n + 1.0) * (2.0 * m - 1.0) / 2.0;
    r.regularize = kind.variant == DetectorVariant::Mmse ? n : 0.0;
    r.solve = (2.0 / 3.0) * n * n * n + 2.0 * n * n;
    r.matvec = n * (2.0 * m - 1.0);
    return r;
}

}  // namespace mcadet
