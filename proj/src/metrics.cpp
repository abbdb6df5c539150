// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/metrics.hpp"

#include <cassert>
#include <cmath>

namespace mcadet {

void NmseAccumulator::add(const Vec& s_hat, const Vec& s) {
    assert(s_hat.size() == s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        const double d = s_hat[i] - s[i];
        error_ += d * d;
        signal_ += s[i] * s[i];
    }
}

double NmseAccumulator::value() const {
    if (signal_ == 0.0) throw ZeroSignal("nmse: zero signal energy");
    return error_ / signal_;
}

double nmse(const std::vector<Vec>& s_hat_batch, const std::vector<Vec>& s_batch) {
    if (s_hat_batch.size() != s_batch.size()) throw ZeroSignal("nmse: batch shape mismatch");
    NmseAccumulator acc;
    for (size_t i = 0; i < s_batch.size(); ++i) acc.add(s_hat_batch[i], s_batch[i]);
    return acc.value();
}

namespace {

double array_power(const Mat& g, const Vec& drive, const Vec& node) {
    // Devices connect drive line i to node j.
    double p = 0.0;
    for (int j = 0; j < g.rows; ++j)
        for (int i = 0; i < g.cols; ++i) {
            const double dv = drive[i] - node[j];
            p += g(j, i) * dv * dv;
        }
    return p;
}

}  // namespace

PowerBreakdown estimate_power(const ConductanceProgram& prog, const CircuitSolution& sol,
                              const Vec& v_in, const PowerParams& params) {
    const int n = prog.ports_out();   // 2K
    const int m = prog.ports_in();    // 2R
    const bool amp = prog.topology == Topology::Proposed;

    PowerBreakdown p;
    p.oa = 3.0 * n * params.p_oa_w;  // inversion + feedback inverters + followers
    p.dac = m * params.p_dac_w;
    p.adc = n * params.p_adc_w;
    if (amp) p.amp_stage = n * params.p_oa_w;

    if (params.include_array_static) {
        const Vec& u = sol.u;
        Vec neg_v_in(v_in.size());
        for (size_t i = 0; i < v_in.size(); ++i) neg_v_in[i] = -v_in[i];
        Vec neg_v1(sol.v1.size());
        for (size_t i = 0; i < sol.v1.size(); ++i) neg_v1[i] = -sol.v1[i];

        double arr = 0.0;
        arr += array_power(prog.a, v_in, u);
        arr += array_power(prog.b, neg_v_in, u);
        for (int j = 0; j < n; ++j) {
            const double dv = sol.v1[j] - u[j];
            arr += prog.c[j] * dv * dv;
        }
        arr += array_power(prog.d, sol.v1, u);
        arr += array_power(prog.e, neg_v1, u);
        p.array_static = arr;

        if (amp) {
            const Vec& w = sol.w;
            double amp_arr = 0.0;
            for (int j = 0; j < n; ++j) {
                const double d0 = sol.v1[j] - w[j];
                const double dk = sol.v_out[j] - w[j];
                amp_arr += prog.theta0[j] * d0 * d0 + prog.theta[j] * dk * dk;
            }
            p.amp_stage += amp_arr;
        }
    }
    return p;
}

EfficiencyReport energy_efficiency(const FlopReport& flops, double power_w, double t_compute_s) {
    if (power_w <= 0.0 || t_compute_s <= 0.0)
        throw SimError("energy_efficiency: power and compute time must be > 0");
    EfficiencyReport r;
    r.power_w = power_w;
    r.t_compute_s = t_compute_s;
    r.flops = flops.total();
    r.tops_per_watt = r.flops / (t_compute_s * power_w) / 1e12;
    return r;
}

}  // namespace mcadet
