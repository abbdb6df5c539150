// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/modem.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "mcadet/channel.hpp"

namespace mcadet {

namespace {

int gray_encode(int v) { return v ^ (v >> 1); }

}  // namespace

Constellation Constellation::square_qam(int order, double symbol_energy) {
    if (order != 4 && order != 16 && order != 64)
        throw ConfigError("square_qam: order must be 4, 16 or 64");
    Constellation c;
    c.order = order;
    c.bits_per_symbol = order == 4 ? 2 : order == 16 ? 4 : 6;
    c.symbol_energy = symbol_energy;

    const int l = 1 << (c.bits_per_symbol / 2);  // levels per axis
    // Mean of (2i - (l-1))^2 over the grid is (l^2 - 1)/3 per axis.
    const double scale = std::sqrt(symbol_energy * 3.0 / (2.0 * (l * l - 1)));

    c.levels.resize(l);
    c.level_bits.resize(l);
    for (int i = 0; i < l; ++i) {
        c.levels[i] = scale * (2 * i - (l - 1));
        c.level_bits[i] = gray_encode(i);
    }

    c.points.resize(order);
    const int half_bits = c.bits_per_symbol / 2;
    std::vector<int> bits_to_level(l);
    for (int i = 0; i < l; ++i) bits_to_level[c.level_bits[i]] = i;
    for (int pat = 0; pat < order; ++pat) {
        const int i_bits = pat >> half_bits;
        const int q_bits = pat & (l - 1);
        c.points[pat] = cplx{c.levels[bits_to_level[i_bits]], c.levels[bits_to_level[q_bits]]};
    }
    return c;
}

std::vector<cplx> modulate(const Constellation& c, const std::vector<std::uint8_t>& bits) {
    if (bits.size() % c.bits_per_symbol != 0)
        throw BadLength("modulate: bit count not a multiple of bits per symbol");
    const size_t n = bits.size() / c.bits_per_symbol;
    std::vector<cplx> out(n);
    for (size_t s = 0; s < n; ++s) {
        int pat = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b)
            pat = (pat << 1) | (bits[s * c.bits_per_symbol + b] & 1);
        out[s] = c.points[pat];
    }
    return out;
}

namespace {

int nearest_level(const Constellation& c, double v) {
    // Levels are uniformly spaced; decide by index rather than scanning.
    const double step = c.levels[1] - c.levels[0];
    const double idx = (v - c.levels[0]) / step;
    int i = static_cast<int>(std::lround(idx));
    i = std::clamp(i, 0, static_cast<int>(c.levels.size()) - 1);
    return i;
}

}  // namespace

int demap_hard(const Constellation& c, cplx observation) {
    const int half_bits = c.bits_per_symbol / 2;
    const int i_lvl = nearest_level(c, observation.real());
    const int q_lvl = nearest_level(c, observation.imag());
    return (c.level_bits[i_lvl] << half_bits) | c.level_bits[q_lvl];
}

Vec apply_awgn(const Vec& y_clean, double sigma_n, RngStream& stream) {
    if (sigma_n < 0.0) throw SimError("apply_awgn: sigma_n must be >= 0");
    const double per_dim = sigma_n / std::sqrt(2.0);
    Vec y = y_clean;
    for (double& v : y) v += stream.gaussian(0.0, per_dim);
    return y;
}

Frame make_frame(const Constellation& c, const Mat& h, double sigma_n, RngStream& bit_stream,
                 RngStream& noise_stream) {
    const int k_users = h.cols / 2;
    Frame f;
    f.sigma_n = sigma_n;
    f.bits.resize(static_cast<size_t>(k_users) * c.bits_per_symbol);
    for (auto& b : f.bits) b = static_cast<std::uint8_t>(bit_stream.raw() & 1);
    f.s_c = modulate(c, f.bits);
    f.s = stack_complex(f.s_c);
    f.y = apply_awgn(mat_vec(h, f.s), sigma_n, noise_stream);
    return f;
}

BitErrorCount demap_and_count(const Constellation& c, const Vec& s_hat, const Frame& frame) {
    const size_t k_users = frame.s_c.size();
    assert(s_hat.size() == 2 * k_users);
    BitErrorCount count;
    for (size_t k = 0; k < k_users; ++k) {
        const int pat = demap_hard(c, cplx{s_hat[k], s_hat[k_users + k]});
        for (int b = 0; b < c.bits_per_symbol; ++b) {
            const int tx = frame.bits[k * c.bits_per_symbol + b] & 1;
            const int rx = (pat >> (c.bits_per_symbol - 1 - b)) & 1;
            count.errors += (tx != rx);
        }
    }
    count.total = static_cast<long long>(k_users) * c.bits_per_symbol;
    return count;
}

}  // namespace mcadet
