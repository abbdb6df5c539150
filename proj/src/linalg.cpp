// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>

namespace mcadet {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    assert(a.same_shape(b));
    Mat r = a;
    for (size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
    return r;
}

Mat operator-(const Mat& a, const Mat& b) {
    assert(a.same_shape(b));
    Mat r = a;
    for (size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
    return r;
}

Mat operator*(const Mat& a, const Mat& b) {
    assert(a.cols == b.rows);
    Mat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

Mat operator*(double s, const Mat& a) {
    Mat r = a;
    for (double& v : r.data) v *= s;
    return r;
}

Mat transpose(const Mat& a) {
    Mat r(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
    return r;
}

Vec mat_vec(const Mat& a, const Vec& x) {
    assert(static_cast<size_t>(a.cols) == x.size());
    Vec y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* row = &a.data[static_cast<size_t>(i) * a.cols];
        for (int j = 0; j < a.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Vec operator+(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r = a;
    for (double& v : r) v *= s;
    return r;
}

double norm_inf(const Mat& a) {
    double best = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(const Vec& v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

double max_abs(const Mat& a) {
    double best = 0.0;
    for (double x : a.data) best = std::max(best, std::abs(x));
    return best;
}

LuFactors lu_factor(const Mat& m) {
    if (m.rows != m.cols) throw SingularMatrix("lu_factor: matrix not square");
    const int n = m.rows;
    LuFactors f;
    f.lu = m;
    f.perm.resize(n);
    for (int i = 0; i < n; ++i) f.perm[i] = i;

    const double tol = 1e-13 * std::max(max_abs(m), 1e-300);
    Mat& a = f.lu;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < tol) throw SingularMatrix("lu_factor: pivot below tolerance");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        const double akk = a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double l = a(i, k) / akk;
            a(i, k) = l;
            if (l == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return f;
}

Vec LuFactors::solve(const Vec& rhs) const {
    const int n = lu.rows;
    assert(static_cast<int>(rhs.size()) == n);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[perm[i]];
    for (int i = 1; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

Mat LuFactors::solve(const Mat& rhs) const {
    Mat x(rhs.rows, rhs.cols);
    Vec col(rhs.rows);
    for (int j = 0; j < rhs.cols; ++j) {
        for (int i = 0; i < rhs.rows; ++i) col[i] = rhs(i, j);
        Vec sol = solve(col);
        for (int i = 0; i < rhs.rows; ++i) x(i, j) = sol[i];
    }
    return x;
}

Vec solve_dense(const Mat& m, const Vec& rhs) { return lu_factor(m).solve(rhs); }

Mat solve_dense(const Mat& m, const Mat& rhs) {
    if (m.rows != rhs.rows) throw SingularMatrix("solve_dense: shape mismatch");
    return lu_factor(m).solve(rhs);
}

Mat expm(const Mat& a) {
    assert(a.rows == a.cols);
    const int n = a.rows;

    // Scale so that |A/2^s| is small, apply a (6,6) Pade approximant,
    // square back up.
    const double nrm = norm_inf(a);
    int s = 0;
    if (nrm > 0.5) s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / 0.5))));
    const double scale = std::ldexp(1.0, -s);
    Mat x = scale * a;

    static const double c[7] = {1.0,         0.5,           5.0 / 44.0,   1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    Mat x2 = x * x;
    Mat even = c[0] * Mat::identity(n) + c[2] * x2;  // I*c0 + c2*X^2 + c4*X^4 + c6*X^6
    Mat oddc = c[1] * Mat::identity(n) + c[3] * x2;  // (c1 + c3*X^2 + c5*X^4) later * X
    Mat x4 = x2 * x2;
    even = even + c[4] * x4;
    oddc = oddc + c[5] * x4;
    Mat x6 = x4 * x2;
    even = even + c[6] * x6;
    Mat odd = x * oddc;

    Mat num = even + odd;
    Mat den = even - odd;
    Mat r = solve_dense(den, num);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= stream_id * 0xD1B54A32D192ED03ull;
    std::uint64_t b = splitmix64(state);
    gen_.seed(a ^ (b << 1) ^ (b >> 63));
}

double RngStream::gaussian(double mean, double sigma) {
    if (sigma < 0.0) throw SimError("gaussian: sigma must be >= 0");
    if (sigma == 0.0) return mean;
    return mean + sigma * normal_(gen_);
}

double RngStream::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::raw() { return gen_(); }

Vec draw_gaussian(RngStream& stream, std::size_t n, double mean, double sigma) {
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = stream.gaussian(mean, sigma);
    return out;
}

CMat operator*(const CMat& a, const CMat& b) {
    assert(a.cols == b.rows);
    CMat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const cplx aik = a(i, k);
            for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

CMat hermitian_gram(const CMat& g) {
    CMat w(g.cols, g.cols);
    for (int i = 0; i < g.cols; ++i)
        for (int j = 0; j < g.cols; ++j) {
            cplx s = 0.0;
            for (int r = 0; r < g.rows; ++r) s += std::conj(g(r, i)) * g(r, j);
            w(i, j) = s;
        }
    return w;
}

std::vector<cplx> cmat_vec(const CMat& a, const std::vector<cplx>& x) {
    assert(static_cast<size_t>(a.cols) == x.size());
    std::vector<cplx> y(a.rows, cplx{0.0, 0.0});
    for (int i = 0; i < a.rows; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

}  // namespace mcadet
