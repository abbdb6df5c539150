// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcadet {

namespace {

// Shared feedback factor: the scheme factor for the pair-mapped matrix,
// capped so the largest diagonal target alpha_fb * q_ii still fits under
// omega_max. Without the cap the C array is unmappable whenever the Gram
// diagonal dominates the spread of X, which is the normal massive-MIMO
// situation.
double feedback_alpha(const Mat& x, const Vec& q, MappingScheme scheme, DeviceRange range) {
    const double qmax = *std::max_element(q.begin(), q.end());
    const double cap = range.omega_max / qmax;
    double a;
    try {
        a = compute_alpha(x, scheme, range);
    } catch (const ZeroMatrix&) {
        return cap;
    }
    return std::min(a, cap);
}

ConductanceProgram assemble(Topology topology, const Mat& u_in, const Mat& x_fb, const Vec& q_fb,
                            MappingScheme scheme, DeviceRange range, const BuildOptions& opts) {
    ConductanceProgram prog;
    prog.topology = topology;
    prog.range = range;

    const double alpha_in = compute_alpha(u_in, scheme, range);
    ConductancePair in_pair = map_matrix(u_in, alpha_in, range);
    prog.a = std::move(in_pair.a);
    prog.b = std::move(in_pair.b);

    const double alpha_fb = feedback_alpha(x_fb, q_fb, scheme, range);
    ConductancePair fb_pair = map_matrix(x_fb, alpha_fb, range);
    prog.d = std::move(fb_pair.a);
    prog.e = std::move(fb_pair.b);

    DiagonalMap cmap = map_q_onto_c(q_fb, alpha_fb, range, opts.strict);
    prog.c = std::move(cmap.c);

    prog.ledger.alpha_in = alpha_in;
    prog.ledger.alpha_fb = alpha_fb;
    prog.truncated = in_pair.truncated + fb_pair.truncated + cmap.truncated;
    prog.mappable_entries = static_cast<long long>(u_in.rows) * u_in.cols +
                            static_cast<long long>(x_fb.rows) * x_fb.cols +
                            static_cast<long long>(q_fb.size());
    return prog;
}

}  // namespace

ConductanceProgram build_proposed(const ChannelRealization& chan, DetectorKind kind,
                                  MappingScheme scheme, DeviceRange range, double sigma_m,
                                  RngStream& stream, const BuildOptions& opts) {
    const Vec& q = kind.variant == DetectorVariant::Zf ? chan.q_zf : chan.q_mmse;
    ConductanceProgram prog =
        assemble(Topology::Proposed, transpose(chan.g), chan.x, q, scheme, range, opts);

    ThetaMap tm = map_lambda_onto_theta(chan.lambda, range);
    prog.theta0_target = tm.theta0;
    prog.theta0.assign(tm.theta.size(), tm.theta0);
    prog.theta = std::move(tm.theta);
    prog.mappable_entries += static_cast<long long>(prog.theta.size());

    prog.ledger.lambda_norm = tm.lambda_norm;
    prog.ledger.sign = 1.0;
    inject_deviation(prog, sigma_m, stream, opts.deviate_amplifiers);
    return prog;
}

ConductanceProgram build_conventional(const ChannelRealization& chan, DetectorKind kind,
                                      MappingScheme scheme, DeviceRange range, double sigma_m,
                                      RngStream& stream, const BuildOptions& opts) {
    Mat m = transpose(chan.h) * chan.h;
    if (kind.variant == DetectorVariant::Mmse)
        for (int i = 0; i < m.rows; ++i) m(i, i) += kind.rho;

    Vec q(m.rows);
    Mat x = m;
    for (int i = 0; i < m.rows; ++i) {
        q[i] = m(i, i);
        if (q[i] <= 0.0) throw StabilityViolation("build_conventional: non-positive Gram diagonal");
        x(i, i) = 0.0;
    }

    ConductanceProgram prog =
        assemble(Topology::Conventional, transpose(chan.h), x, q, scheme, range, opts);
    prog.ledger.lambda_norm = 1.0;
    prog.ledger.sign = -1.0;
    inject_deviation(prog, sigma_m, stream, opts.deviate_amplifiers);
    return prog;
}

void inject_deviation(ConductanceProgram& prog, double sigma_m, RngStream& stream,
                      bool include_amplifiers) {
    if (sigma_m == 0.0) return;
    deviate_matrix(prog.a, sigma_m, prog.range, stream);
    deviate_matrix(prog.b, sigma_m, prog.range, stream);
    deviate_vector(prog.c, sigma_m, prog.range, stream);
    deviate_matrix(prog.d, sigma_m, prog.range, stream);
    deviate_matrix(prog.e, sigma_m, prog.range, stream);
    if (include_amplifiers && !prog.theta.empty()) {
        deviate_vector(prog.theta0, sigma_m, prog.range, stream);
        deviate_vector(prog.theta, sigma_m, prog.range, stream);
    }
}

bool check_stability(const ConductanceProgram& prog) {
    for (double c : prog.c)
        if (!(c > 0.0)) return false;
    return true;
}

namespace {

Mat feedback_matrix(const ConductanceProgram& prog, double kappa_d, double kappa_e) {
    Mat f = kappa_d * prog.d;
    f = f + kappa_e * prog.e;
    for (int i = 0; i < f.rows; ++i) f(i, i) += prog.c[i];
    return f;
}

Vec amplifier_out_ideal(const ConductanceProgram& prog, const Vec& v1) {
    Vec out(v1.size());
    for (size_t k = 0; k < v1.size(); ++k) out[k] = -(prog.theta0[k] / prog.theta[k]) * v1[k];
    return out;
}

double nodal_residual(const ConductanceProgram& prog, const Vec& v_in, const Vec& v1,
                      const Vec& u, const Vec& loading, double kappa_b, double kappa_d,
                      double kappa_e) {
    const int n = prog.ports_out();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < prog.ports_in(); ++i)
            s += (prog.a(j, i) + kappa_b * prog.b(j, i)) * v_in[i];
        s += prog.c[j] * v1[j];
        for (int k = 0; k < n; ++k)
            s += (kappa_d * prog.d(j, k) + kappa_e * prog.e(j, k)) * v1[k];
        s -= u[j] * loading[j];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

Vec node_loading(const ConductanceProgram& prog, bool followers_load) {
    const int n = prog.ports_out();
    Vec loading(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = prog.c[j];
        for (int i = 0; i < prog.ports_in(); ++i) s += prog.a(j, i) + prog.b(j, i);
        for (int k = 0; k < n; ++k) s += prog.e(j, k) + (followers_load ? prog.d(j, k) : 0.0);
        loading[j] = s;
    }
    return loading;
}

}  // namespace

CircuitSolution solve_ideal(const ConductanceProgram& prog, const Vec& v_in) {
    if (!check_stability(prog))
        throw StabilityViolation("solve_ideal: non-positive feedback diagonal");
    const int n = prog.ports_out();
    Mat f = feedback_matrix(prog, 1.0, -1.0);

    Vec i1(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < prog.ports_in(); ++i)
            s += (prog.a(j, i) - prog.b(j, i)) * v_in[i];
        i1[j] = s;
    }

    CircuitSolution sol;
    try {
        sol.v1 = solve_dense(f, -1.0 * i1);
    } catch (const SingularMatrix& e) {
        throw SingularFeedback(e.what());
    }
    sol.u.assign(n, 0.0);
    sol.v_out = prog.topology == Topology::Proposed ? amplifier_out_ideal(prog, sol.v1) : sol.v1;
    if (prog.topology == Topology::Proposed) sol.w.assign(n, 0.0);

    // Re-substitution: with u = 0 the KCL imbalance is the solver residual.
    Vec loading = node_loading(prog, true);
    sol.residual = nodal_residual(prog, v_in, sol.v1, sol.u, loading, -1.0, 1.0, -1.0);
    return sol;
}

namespace {

struct GainCoefficients {
    double kappa_b;
    double kappa_d;
    double kappa_e;
};

GainCoefficients gain_coefficients(const OaModel& oa) {
    const double a = oa.open_loop_gain;
    GainCoefficients k;
    k.kappa_b = oa.ideal_inverters ? -1.0 : -a / (a + 2.0);
    k.kappa_d = oa.ideal_followers ? 1.0 : a / (a + 1.0);
    k.kappa_e = k.kappa_b;
    return k;
}

}  // namespace

CircuitSolution solve_finite_gain(const ConductanceProgram& prog, const Vec& v_in,
                                  const OaModel& oa) {
    if (oa.open_loop_gain <= 0.0) throw SimError("solve_finite_gain: A_OL must be > 0");
    const int n = prog.ports_out();
    const GainCoefficients k = gain_coefficients(oa);
    const Vec loading = node_loading(prog, oa.followers_load);

    Mat sys = feedback_matrix(prog, k.kappa_d, k.kappa_e);
    for (int j = 0; j < n; ++j) sys(j, j) += loading[j] / oa.open_loop_gain;

    Vec rhs(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < prog.ports_in(); ++i)
            s += (prog.a(j, i) + k.kappa_b * prog.b(j, i)) * v_in[i];
        rhs[j] = -s;
    }

    CircuitSolution sol;
    try {
        sol.v1 = solve_dense(sys, rhs);
    } catch (const SingularMatrix& e) {
        throw SingularSystem(e.what());
    }
    sol.u.resize(n);
    for (int j = 0; j < n; ++j) sol.u[j] = -sol.v1[j] / oa.open_loop_gain;

    double amp_residual = 0.0;
    if (prog.topology == Topology::Proposed) {
        sol.v_out.resize(n);
        sol.w.resize(n);
        for (int j = 0; j < n; ++j) {
            const double t0 = prog.theta0[j];
            const double tk = prog.theta[j];
            sol.v_out[j] = -t0 * sol.v1[j] / (tk + (t0 + tk) / oa.open_loop_gain);
            sol.w[j] = -sol.v_out[j] / oa.open_loop_gain;
            amp_residual = std::max(
                amp_residual, std::abs(t0 * (sol.v1[j] - sol.w[j]) + tk * (sol.v_out[j] - sol.w[j])));
        }
    } else {
        sol.v_out = sol.v1;
    }

    sol.residual = std::max(
        nodal_residual(prog, v_in, sol.v1, sol.u, loading, k.kappa_b, k.kappa_d, k.kappa_e),
        amp_residual);
    return sol;
}

CircuitSolution solve_transient(const ConductanceProgram& prog, const Vec& v_in,
                                const OaModel& oa, double t_end, double settle_tol) {
    if (oa.gbp_hz <= 0.0) throw SimError("solve_transient: GBP must be > 0");
    const CircuitSolution stat = solve_finite_gain(prog, v_in, oa);

    const int n = prog.ports_out();
    const bool amp = prog.topology == Topology::Proposed;
    const int dim = amp ? 2 * n : n;
    const double a_ol = oa.open_loop_gain;
    const double tau = a_ol / (2.0 * std::numbers::pi * oa.gbp_hz);
    const GainCoefficients k = gain_coefficients(oa);
    const Vec loading = node_loading(prog, oa.followers_load);

    // State x = [v1; v_out]; dx/dt = M x + c. The v1 block comes from the
    // instantaneous KCL balance u_j = (input + feedback currents) / L_j,
    // the amplifier block from its two-device node.
    Mat m(dim, dim);
    const Mat fb = feedback_matrix(prog, k.kappa_d, k.kappa_e);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            m(j, i) = -(1.0 / tau) * ((i == j ? 1.0 : 0.0) + a_ol * fb(j, i) / loading[j]);
    if (amp) {
        for (int j = 0; j < n; ++j) {
            const double t0 = prog.theta0[j];
            const double tk = prog.theta[j];
            const double denom = t0 + tk;
            m(n + j, j) = -(a_ol / tau) * t0 / denom;
            m(n + j, n + j) = -(1.0 / tau) * (1.0 + a_ol * tk / denom);
        }
    }

    // Steady state straight from the static solution, so the t->infinity
    // limit matches solve_finite_gain by construction.
    Vec x_inf(dim);
    for (int j = 0; j < n; ++j) x_inf[j] = stat.v1[j];
    if (amp)
        for (int j = 0; j < n; ++j) x_inf[n + j] = stat.v_out[j];

    const int n_steps = 4096;
    const double dt = t_end / n_steps;
    const Mat phi = expm(dt * m);

    const Vec& v_out_inf = amp ? stat.v_out : stat.v1;
    const double ref = std::max(norm_inf(v_out_inf), 1e-300);

    Vec x(dim, 0.0);  // v1(0) = 0
    Vec err_trace(n_steps + 1);
    err_trace[0] = 1.0;  // x = 0, so the output error is the full reference
    const int off = amp ? n : 0;
    for (int s = 1; s <= n_steps; ++s) {
        Vec delta(dim);
        for (int i = 0; i < dim; ++i) delta[i] = x[i] - x_inf[i];
        Vec next = mat_vec(phi, delta);
        for (int i = 0; i < dim; ++i) x[i] = x_inf[i] + next[i];

        double err = 0.0;
        for (int j = 0; j < n; ++j) err = std::max(err, std::abs(x[off + j] - v_out_inf[j]));
        err_trace[s] = err / ref;
    }
    if (err_trace[n_steps] > settle_tol)
        throw NoConvergence("solve_transient: output not settled at t_end");

    // Settle time: the crossing right after the last sample outside the
    // tolerance tube, interpolated on the sampling grid.
    int last_out = 0;
    for (int s = 0; s <= n_steps; ++s)
        if (err_trace[s] > settle_tol) last_out = s;
    double settle = last_out * dt;
    if (err_trace[last_out] > settle_tol) {
        const double drop = err_trace[last_out] - err_trace[last_out + 1];
        const double frac =
            drop > 0.0 ? std::min(1.0, (err_trace[last_out] - settle_tol) / drop) : 1.0;
        settle = (last_out + frac) * dt;
    }

    CircuitSolution sol = stat;
    sol.settle_time = settle;
    sol.v1.assign(x.begin(), x.begin() + n);
    if (amp) sol.v_out.assign(x.begin() + n, x.end());
    else sol.v_out = sol.v1;
    for (int j = 0; j < n; ++j) sol.u[j] = -sol.v1[j] / a_ol;
    return sol;
}

namespace {

double quantize(double v, int bits, double fullscale) {
    if (bits <= 0 || fullscale <= 0.0) return v;
    const double levels = std::ldexp(1.0, bits);  // 2^bits
    const double step = 2.0 * fullscale / levels;
    double idx = std::floor((v + fullscale) / step);
    idx = std::clamp(idx, 0.0, levels - 1.0);
    return -fullscale + (idx + 0.5) * step;
}

}  // namespace

DetectionOutcome run_circuit_detection(const ConductanceProgram& prog, const Vec& y,
                                       CircuitSolver solver, const OaModel& oa, double t_end,
                                       double settle_tol, const ConverterOptions& conv) {
    DetectionOutcome out;
    const double peak = norm_inf(y);
    out.v_scale = peak > 0.0 ? 1.0 / peak : 1.0;
    out.v_in = out.v_scale * y;
    if (conv.dac_bits > 0)
        for (double& v : out.v_in) v = quantize(v, conv.dac_bits, 1.0);

    switch (solver) {
        case CircuitSolver::Ideal:
            out.sol = solve_ideal(prog, out.v_in);
            break;
        case CircuitSolver::FiniteGain:
            out.sol = solve_finite_gain(prog, out.v_in, oa);
            break;
        case CircuitSolver::Transient:
            out.sol = solve_transient(prog, out.v_in, oa, t_end, settle_tol);
            break;
    }

    Vec v_out = out.sol.v_out;
    if (conv.adc_bits > 0) {
        const double fs = norm_inf(v_out);
        for (double& v : v_out) v = quantize(v, conv.adc_bits, fs);
    }

    ScaleLedger ledger = prog.ledger;
    ledger.v_scale = out.v_scale;
    out.s_hat = ledger.out_gain() * v_out;
    return out;
}

}  // namespace mcadet
