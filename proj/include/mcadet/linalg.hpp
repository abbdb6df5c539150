// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "mcadet/errors.hpp"

namespace mcadet {

using Vec = std::vector<double>;
using cplx = std::complex<double>;

// Dense row-major real matrix. Everything in this simulator is small
// (a few hundred rows at most), so plain loops over contiguous storage
// are all we need.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    static Mat identity(int n);
    static Mat diag(const Vec& d);

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat transpose(const Mat& a);

Vec mat_vec(const Mat& a, const Vec& x);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);

double norm_inf(const Mat& a);  // max absolute row sum
double norm_inf(const Vec& v);
double max_abs(const Mat& a);

// LU factorization with partial pivoting. The one dense solver in the
// project; all matrices here are small and well conditioned after
// regularization. A pivot below 1e-13 * max|M| is treated as singular.
struct LuFactors {
    Mat lu;                  // packed L (unit diagonal) and U
    std::vector<int> perm;   // row permutation

    Vec solve(const Vec& rhs) const;
    Mat solve(const Mat& rhs) const;
};

LuFactors lu_factor(const Mat& m);          // throws SingularMatrix
Vec solve_dense(const Mat& m, const Vec& rhs);
Mat solve_dense(const Mat& m, const Mat& rhs);

// Matrix exponential expm(a) by scaling-and-squaring with a Pade
// approximant. Used by the transient circuit solver to propagate the
// linear OA dynamics exactly between output samples.
Mat expm(const Mat& a);

// Deterministic seeded random stream. Identical (seed, stream_id) pairs
// reproduce identical draw sequences; distinct stream ids give
// independent sequences. Each Monte Carlo trial owns its own stream.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    // N(mean, sigma^2); sigma == 0 returns mean without consuming state.
    double gaussian(double mean, double sigma);
    double uniform();  // [0, 1)
    std::uint64_t raw();

  private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// n i.i.d. normal draws. sigma must be >= 0.
Vec draw_gaussian(RngStream& stream, std::size_t n, double mean, double sigma);

// Minimal complex matrix, used for the complex-valued channel quantities
// and as the independent route in algebraic oracles.
struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

    cplx& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    cplx operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
};

CMat operator*(const CMat& a, const CMat& b);
CMat hermitian_gram(const CMat& g);  // G^H G
std::vector<cplx> cmat_vec(const CMat& a, const std::vector<cplx>& x);

}  // namespace mcadet
