// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include "mcadet/circuit.hpp"
#include "mcadet/detector.hpp"

namespace mcadet {

// Batch NMSE: sum ||s_hat - s||^2 / sum ||s||^2.
class NmseAccumulator {
  public:
    void add(const Vec& s_hat, const Vec& s);
    double value() const;  // throws ZeroSignal when no signal energy accumulated
    bool empty() const { return signal_ == 0.0; }

  private:
    double error_ = 0.0;
    double signal_ = 0.0;
};

double nmse(const std::vector<Vec>& s_hat_batch, const std::vector<Vec>& s_batch);

// Per-component quiescent powers. The defaults are representative values
// for the component classes used by the model (high-speed OA, DAC and
// ADC); they are configuration inputs, not measured data.
struct PowerParams {
    double p_oa_w = 1e-3;
    double p_dac_w = 5e-3;
    double p_adc_w = 10e-3;
    bool include_array_static = true;
};

// Power model. DACs drive the 2R input lines (differentially, so the B
// array needs no extra inverter OAs), ADCs read the 2K outputs. OA count
// is 2K inversion + 2K feedback inverters + 2K followers, plus 2K
// amplifier OAs for the proposed topology only. Array static power is
// the per-device sum of g * dv^2 at the solved operating point.
struct PowerBreakdown {
    double oa = 0.0;
    double dac = 0.0;
    double adc = 0.0;
    double array_static = 0.0;  // input + feedback arrays
    double amp_stage = 0.0;     // amplifier OAs + theta devices

    double total() const { return oa + dac + adc + array_static + amp_stage; }
};

PowerBreakdown estimate_power(const ConductanceProgram& prog, const CircuitSolution& sol,
                              const Vec& v_in, const PowerParams& params);

struct EfficiencyReport {
    double power_w = 0.0;
    double t_compute_s = 0.0;
    double flops = 0.0;
    double tops_per_watt = 0.0;
};

// flops / (t_compute * power) / 1e12.
EfficiencyReport energy_efficiency(const FlopReport& flops, double power_w, double t_compute_s);

}  // namespace mcadet
