// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <cstdint>
#include <vector>

#include "mcadet/linalg.hpp"

namespace mcadet {

// Square QAM constellation with per-axis Gray labeling, normalized so the
// average symbol energy equals symbol_energy. The first half of a
// symbol's bits selects the I level, the second half the Q level.
struct Constellation {
    int order = 64;
    int bits_per_symbol = 6;
    double symbol_energy = 1.0;  // p_s
    std::vector<cplx> points;    // indexed by bit pattern
    std::vector<double> levels;  // per-axis amplitudes, ascending
    std::vector<int> level_bits; // Gray label of levels[i]

    // order must be one of {4, 16, 64}.
    static Constellation square_qam(int order, double symbol_energy);
};

// Gray-mapped QAM symbols; bits.size() must be a multiple of
// bits_per_symbol (throws BadLength).
std::vector<cplx> modulate(const Constellation& c, const std::vector<std::uint8_t>& bits);

// Hard nearest-point decision for one complex observation; returns the
// bit pattern of the decided point.
int demap_hard(const Constellation& c, cplx observation);

// y = y_clean + n with n i.i.d. N(0, sigma_n^2 / 2) per real dimension
// (sigma_n^2 is the complex-noise variance).
Vec apply_awgn(const Vec& y_clean, double sigma_n, RngStream& stream);

// One channel use: transmitted bits, complex symbols, stacked real
// signal, and the noisy observation.
struct Frame {
    std::vector<std::uint8_t> bits;
    std::vector<cplx> s_c;  // K symbols
    Vec s;                  // 2K stacked
    Vec y;                  // 2R observation
    double sigma_n = 0.0;   // complex-noise std
};

Frame make_frame(const Constellation& c, const Mat& h, double sigma_n, RngStream& bit_stream,
                 RngStream& noise_stream);

struct BitErrorCount {
    long long errors = 0;
    long long total = 0;
};

// Per-user hard decisions on (s_hat[k], s_hat[K+k]) pairs, compared
// against the transmitted bits.
BitErrorCount demap_and_count(const Constellation& c, const Vec& s_hat, const Frame& frame);

}  // namespace mcadet
