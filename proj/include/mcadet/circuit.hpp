// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include "mcadet/channel.hpp"
#include "mcadet/detector.hpp"
#include "mcadet/mapping.hpp"

namespace mcadet {

enum class Topology { Proposed, Conventional, DigitalReference };

// Operational amplifier model. open_loop_gain is linear (not dB).
// Inverters and voltage followers are ideal unless flagged; the main
// inversion OAs and the amplifier-stage OAs always use the finite model
// in solve_finite_gain / solve_transient. followers_load controls
// whether the follower-driven array contributes to the loading of the
// inverting nodes.
struct OaModel {
    double open_loop_gain = 1e5;  // 100 dB
    double gbp_hz = 500e6;
    bool ideal_inverters = true;
    bool ideal_followers = true;
    bool followers_load = true;

    static double olg_from_db(double db) { return std::pow(10.0, db / 20.0); }
};

// A fully programmed detector circuit. The input stage (A, B) is
// 2K x 2R, the feedback stage (C diagonal, D, E) is 2K x 2K. The
// proposed topology adds 2K amplifier circuits: each has one device
// programmed to the common value theta0 and one feedback device theta_k.
// The conventional topology has no amplifier stage (theta vectors empty)
// and its output is taken directly at the inverting OA outputs.
struct ConductanceProgram {
    Topology topology = Topology::Proposed;
    Mat a;
    Mat b;
    Vec c;       // 2K diagonal
    Mat d;
    Mat e;
    Vec theta0;  // 2K devices, all targeted at the same value
    Vec theta;   // 2K feedback devices
    double theta0_target = 0.0;
    DeviceRange range;
    ScaleLedger ledger;
    long long truncated = 0;         // clamped mapping entries
    long long mappable_entries = 0;  // denominator for the truncation fraction

    int ports_out() const { return static_cast<int>(c.size()); }  // 2K
    int ports_in() const { return a.cols; }                       // 2R
};

struct BuildOptions {
    bool strict = false;             // throw InfeasibleMapping instead of clamping C
    bool deviate_amplifiers = true;  // amplifier devices also receive deviations
};

// Program the proposed topology from a realization: A-B <- alpha_in G^T,
// C <- alpha_fb Q, D-E <- alpha_fb X, Theta <- normalized Lambda.
// alpha_fb is the scheme factor for X capped so the Q diagonal stays
// inside the device window (one shared factor keeps C + D - E
// proportional to Q + X). Deviations are injected last.
ConductanceProgram build_proposed(const ChannelRealization& chan, DetectorKind kind,
                                  MappingScheme scheme, DeviceRange range, double sigma_m,
                                  RngStream& stream, const BuildOptions& opts = {});

// Conventional baseline: the whole H^T H (+ rho I) is mapped, diagonal
// onto C and off-diagonal onto D-E, with A-B <- alpha_in H^T. Output is
// the inverting stage itself, so the ledger sign is negative.
ConductanceProgram build_conventional(const ChannelRealization& chan, DetectorKind kind,
                                      MappingScheme scheme, DeviceRange range, double sigma_m,
                                      RngStream& stream, const BuildOptions& opts = {});

// N(0, sigma_m^2) programming error on every device, clamped to the
// window. Draw order is fixed: A, B, C, D, E, theta0, theta.
void inject_deviation(ConductanceProgram& prog, double sigma_m, RngStream& stream,
                      bool include_amplifiers = true);

// Output-voltage stability: the diagonal of C must be entrywise positive.
bool check_stability(const ConductanceProgram& prog);

struct CircuitSolution {
    Vec v_out;
    Vec v1;      // inverting OA outputs
    Vec u;       // virtual-ground node voltages
    Vec w;       // amplifier-stage virtual grounds (proposed only)
    double residual = 0.0;  // max nodal current imbalance, amps
    double settle_time = -1.0;  // seconds, transient solver only
};

// Ideal OAs: v1 = -(C+D-E)^-1 (A-B) v_in, v_out = -Theta^-1 v1 (or v1
// itself for the conventional topology), u = 0.
CircuitSolution solve_ideal(const ConductanceProgram& prog, const Vec& v_in);

// Exact nodal solution with finite open-loop gain: every device attached
// to an inverting node loads it, and u_j = -v1_j / A_OL.
CircuitSolution solve_finite_gain(const ConductanceProgram& prog, const Vec& v_in,
                                  const OaModel& oa);

// Single-pole OA dynamics, tau = A_OL / (2 pi GBP), integrated from
// v1(0) = 0 by exact matrix-exponential propagation of the linear ODE.
// settle_time is the first time after which the output stays within
// settle_tol of its final value. Throws NoConvergence if t_end is
// reached unsettled.
CircuitSolution solve_transient(const ConductanceProgram& prog, const Vec& v_in,
                                const OaModel& oa, double t_end, double settle_tol = 0.01);

enum class CircuitSolver { Ideal, FiniteGain, Transient };

struct DetectionOutcome {
    Vec s_hat;
    CircuitSolution sol;
    Vec v_in;
    double v_scale = 1.0;
};

struct ConverterOptions {
    int dac_bits = 0;  // 0 = ideal converters
    int adc_bits = 0;
};

// Scale y onto the DAC full scale, solve the circuit, de-scale the
// measured output back into an estimate via the ledger.
DetectionOutcome run_circuit_detection(const ConductanceProgram& prog, const Vec& y,
                                       CircuitSolver solver, const OaModel& oa,
                                       double t_end = 2e-6, double settle_tol = 0.01,
                                       const ConverterOptions& conv = {});

}  // namespace mcadet
