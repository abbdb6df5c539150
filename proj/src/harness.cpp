// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "mcadet/modem.hpp"

namespace mcadet {

namespace {

// Fixed batch size keeps the stop rule and all reductions independent of
// the thread count.
constexpr long long kBatchFrames = 256;

enum StreamPurpose : std::uint64_t {
    kSsfc = 0,
    kLsfc = 1,
    kBits = 2,
    kNoise = 3,
    kDeviation = 4,
};

std::uint64_t stream_id(std::uint64_t point, std::uint64_t frame, StreamPurpose purpose) {
    return (point << 44) | (frame << 3) | purpose;
}

struct FrameOutcome {
    bool ok = false;
    long long errors = 0;
    long long bits = 0;
    double err2 = 0.0;
    double sig2 = 0.0;
    long long truncated = 0;
    long long entries = 0;
    double power = 0.0;
    bool has_power = false;
    double settle = -1.0;
    double snr_lin = 0.0;  // realized mean per-user array SNR
};

struct PointConfig {
    ExperimentConfig cfg;
    double sweep_value = 0.0;
    LinkBudget budget;
    Constellation constellation;
    DetectorKind kind;
};

FrameOutcome compute_frame(const PointConfig& pc, std::uint64_t point_index,
                           std::uint64_t frame_index) {
    const ExperimentConfig& cfg = pc.cfg;
    FrameOutcome out;
    try {
        RngStream ssfc_stream(cfg.seed, stream_id(point_index, frame_index, kSsfc));
        RngStream bit_stream(cfg.seed, stream_id(point_index, frame_index, kBits));
        RngStream noise_stream(cfg.seed, stream_id(point_index, frame_index, kNoise));
        RngStream dev_stream(cfg.seed, stream_id(point_index, frame_index, kDeviation));

        std::vector<double> lambda;
        if (cfg.mode == SimulationMode::Cell) {
            const std::uint64_t lsfc_frame = cfg.freeze_lsfc ? 0 : frame_index;
            RngStream lsfc_stream(cfg.seed, stream_id(point_index, lsfc_frame, kLsfc));
            lambda = place_uts(cfg.scenario, lsfc_stream);
        } else {
            lambda.assign(cfg.scenario.users, 1.0);
        }

        ChannelRealization chan = make_realization(cfg.scenario, draw_ssfc(cfg.scenario, ssfc_stream),
                                                   std::move(lambda), pc.budget.rho);
        const Frame frame = make_frame(pc.constellation, chan.h, std::sqrt(pc.budget.sigma_n2),
                                       bit_stream, noise_stream);

        double mean_lambda = 0.0;
        for (double l : chan.lambda) mean_lambda += l;
        mean_lambda /= static_cast<double>(chan.lambda.size());
        out.snr_lin = pc.budget.symbol_energy * mean_lambda * 2.0 * cfg.scenario.sigma_g2() *
                      cfg.scenario.rx_antennas / pc.budget.sigma_n2;

        Vec s_hat;
        if (cfg.topology == Topology::DigitalReference) {
            s_hat = pc.kind.variant == DetectorVariant::Zf
                        ? detect_zf(chan.h, frame.y)
                        : detect_mmse(chan.h, frame.y, pc.kind.rho);
        } else {
            const double sigma_m = cfg.sigma_m_fraction * cfg.range.omega();
            BuildOptions opts;
            opts.strict = cfg.strict_mapping;
            opts.deviate_amplifiers = cfg.deviate_amplifiers;
            ConductanceProgram prog =
                cfg.topology == Topology::Proposed
                    ? build_proposed(chan, pc.kind, cfg.scheme, cfg.range, sigma_m, dev_stream, opts)
                    : build_conventional(chan, pc.kind, cfg.scheme, cfg.range, sigma_m, dev_stream,
                                         opts);
            if (!check_stability(prog))
                throw StabilityViolation("run_experiment: unstable program");

            const DetectionOutcome det = run_circuit_detection(
                prog, frame.y, cfg.solver, cfg.oa, cfg.t_end_s, cfg.settle_tol, cfg.converters);
            s_hat = det.s_hat;
            out.power = estimate_power(prog, det.sol, det.v_in, cfg.power).total();
            out.has_power = true;
            out.truncated = prog.truncated;
            out.entries = prog.mappable_entries;
            out.settle = det.sol.settle_time;
        }

        const BitErrorCount count = demap_and_count(pc.constellation, s_hat, frame);
        out.errors = count.errors;
        out.bits = count.total;
        for (size_t i = 0; i < s_hat.size(); ++i) {
            const double d = s_hat[i] - frame.s[i];
            out.err2 += d * d;
            out.sig2 += frame.s[i] * frame.s[i];
        }
        out.ok = true;
    } catch (const SimError&) {
        out.ok = false;
    }
    return out;
}

PointConfig make_point_config(const ExperimentConfig& base, std::size_t index) {
    PointConfig pc;
    pc.cfg = base;
    pc.sweep_value = base.sweep_values[index];
    switch (base.sweep_axis) {
        case SweepAxis::SnrDb: pc.cfg.snr_db = pc.sweep_value; break;
        case SweepAxis::Beta: pc.cfg.scheme.beta = pc.sweep_value; break;
        case SweepAxis::SigmaM: pc.cfg.sigma_m_fraction = pc.sweep_value; break;
        case SweepAxis::OlgDb: pc.cfg.oa.open_loop_gain = OaModel::olg_from_db(pc.sweep_value); break;
        case SweepAxis::KUsers: pc.cfg.scenario.users = static_cast<int>(pc.sweep_value); break;
    }
    pc.budget = link_budget(pc.cfg, pc.cfg.snr_db);
    pc.constellation = Constellation::square_qam(pc.cfg.qam_order, pc.budget.symbol_energy);
    pc.kind = pc.cfg.detector == DetectorVariant::Zf ? DetectorKind::zf()
                                                     : DetectorKind::mmse(pc.budget.rho);
    return pc;
}

}  // namespace

LinkBudget link_budget(const ExperimentConfig& cfg, double snr_db) {
    LinkBudget b;
    if (cfg.mode == SimulationMode::Cell) {
        b.symbol_energy = std::pow(10.0, cfg.scenario.tx_power_dbm / 10.0);  // mW
        b.sigma_n2 = thermal_noise_mw(cfg.scenario);
    } else {
        b.symbol_energy = cfg.symbol_energy;
        const double snr_lin = std::pow(10.0, snr_db / 10.0);
        b.sigma_n2 = b.symbol_energy * 2.0 * cfg.scenario.sigma_g2() * cfg.scenario.rx_antennas /
                     snr_lin;
    }
    b.rho = b.sigma_n2 / b.symbol_energy;
    return b;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ResultRow> rows;
    rows.reserve(cfg.sweep_values.size());

    for (std::size_t pt = 0; pt < cfg.sweep_values.size(); ++pt) {
        const PointConfig pc = make_point_config(cfg, pt);

        long long frames = 0;
        long long failed = 0;
        long long errors = 0;
        long long bits = 0;
        double err2 = 0.0, sig2 = 0.0;
        long long truncated = 0, entries = 0;
        double power_sum = 0.0;
        long long power_n = 0;
        double settle_sum = 0.0;
        long long settle_n = 0;
        double snr_sum = 0.0;
        long long snr_n = 0;

        while (frames < cfg.stop.max_frames) {
            const long long batch =
                std::min<long long>(kBatchFrames, cfg.stop.max_frames - frames);
            std::vector<FrameOutcome> outcome(batch);

            const int workers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(batch)));
            if (workers == 1) {
                for (long long i = 0; i < batch; ++i)
                    outcome[i] = compute_frame(pc, pt, static_cast<std::uint64_t>(frames + i));
            } else {
                std::vector<std::thread> pool;
                std::exception_ptr error;
                std::mutex error_mutex;
                for (int w = 0; w < workers; ++w) {
                    pool.emplace_back([&, w] {
                        try {
                            for (long long i = w; i < batch; i += workers)
                                outcome[i] =
                                    compute_frame(pc, pt, static_cast<std::uint64_t>(frames + i));
                        } catch (...) {
                            std::lock_guard<std::mutex> lock(error_mutex);
                            if (!error) error = std::current_exception();
                        }
                    });
                }
                for (auto& t : pool) t.join();
                if (error) std::rethrow_exception(error);
            }

            for (const FrameOutcome& f : outcome) {
                if (!f.ok) {
                    ++failed;
                    continue;
                }
                errors += f.errors;
                bits += f.bits;
                err2 += f.err2;
                sig2 += f.sig2;
                truncated += f.truncated;
                entries += f.entries;
                if (f.has_power) {
                    power_sum += f.power;
                    ++power_n;
                }
                if (f.settle >= 0.0) {
                    settle_sum += f.settle;
                    ++settle_n;
                }
                snr_sum += f.snr_lin;
                ++snr_n;
            }
            frames += batch;
            if (cfg.stop.target_bit_errors > 0 && errors >= cfg.stop.target_bit_errors) break;
        }

        if (bits == 0)
            throw SimError("run_experiment: every frame of sweep point " + std::to_string(pt) +
                           " failed");

        ResultRow row;
        row.sweep_value = pc.sweep_value;
        row.snr_db = cfg.mode == SimulationMode::Cell
                         ? 10.0 * std::log10(snr_sum / static_cast<double>(snr_n))
                         : pc.cfg.snr_db;
        row.bit_errors = errors;
        row.bits = bits;
        row.ber = static_cast<double>(errors) / static_cast<double>(bits);
        row.nmse = sig2 > 0.0 ? err2 / sig2 : 0.0;
        row.power_w = power_n > 0 ? power_sum / static_cast<double>(power_n) : 0.0;
        row.settle_time_s =
            settle_n > 0 ? settle_sum / static_cast<double>(settle_n)
                         : std::numeric_limits<double>::quiet_NaN();
        row.truncated_fraction =
            entries > 0 ? static_cast<double>(truncated) / static_cast<double>(entries) : 0.0;
        if (row.power_w > 0.0) {
            const double t = settle_n > 0 ? settle_sum / static_cast<double>(settle_n)
                                          : cfg.t_compute_s;
            const FlopReport fl = count_flops(pc.cfg.scenario.rx_antennas, pc.cfg.scenario.users,
                                              pc.kind);
            row.tops_per_watt = energy_efficiency(fl, row.power_w, t).tops_per_watt;
        }
        row.seed = cfg.seed;
        row.frames = frames;
        row.failed_frames = failed;
        rows.push_back(row);

        std::fprintf(stderr,
                     "[point %zu] %s=%g frames=%lld failed=%lld ber=%.3g nmse=%.3g\n", pt,
                     to_string(cfg.sweep_axis), pc.sweep_value, frames, failed, row.ber, row.nmse);
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string csv_text(const std::vector<ResultRow>& rows) {
    std::string out =
        "sweep_value,snr_db,ber,bit_errors,bits,nmse,power_w,tops_per_watt,"
        "settle_time_s,truncated_fraction,seed\n";
    for (const ResultRow& r : rows) {
        out += fmt(r.sweep_value) + ',' + fmt(r.snr_db) + ',' + fmt(r.ber) + ',';
        out += std::to_string(r.bit_errors) + ',' + std::to_string(r.bits) + ',';
        out += fmt(r.nmse) + ',' + fmt(r.power_w) + ',' + fmt(r.tops_per_watt) + ',';
        out += fmt(r.settle_time_s) + ',' + fmt(r.truncated_fraction) + ',';
        out += std::to_string(r.seed) + '\n';
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!out) throw IoError("emit_csv: cannot open " + path);
    out << csv_text(rows);
    if (!out) throw IoError("emit_csv: write failed for " + path);
}

PlotKind plot_kind_for(const ExperimentConfig& cfg) {
    if (cfg.sweep_axis == SweepAxis::SnrDb && cfg.sweep_values.size() > 1)
        return PlotKind::BerVsSnr;
    if (cfg.sweep_axis == SweepAxis::KUsers) return PlotKind::PowerVsK;
    return PlotKind::BerVsSweep;
}

void emit_plot_script(const std::vector<ResultRow>& rows, PlotKind kind, const std::string& path,
                      const std::string& csv_path, const ExperimentConfig& cfg) {
    if (rows.empty()) throw ConfigError("emit_plot_script: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_plot_script: cannot open " + path);

    out << "# gnuplot script generated by mcadet\n";
    out << "set datafile separator ','\n";
    out << "set key top right\n";
    switch (kind) {
        case PlotKind::BerVsSnr:
            out << "set logscale y\n";
            out << "set xlabel 'SNR (dB)'\n";
            out << "set ylabel 'BER'\n";
            out << "plot '" << csv_path
                << "' every ::1 using 2:3 with linespoints title 'BER'\n";
            break;
        case PlotKind::BerVsSweep:
            out << "set logscale y\n";
            out << "set xlabel '" << to_string(cfg.sweep_axis) << "'\n";
            out << "set ylabel 'BER'\n";
            out << "plot '" << csv_path
                << "' every ::1 using 1:3 with linespoints title 'BER', '" << csv_path
                << "' every ::1 using 1:6 with linespoints title 'NMSE'\n";
            break;
        case PlotKind::NmseSurface:
            out << "set logscale z\n";
            out << "set xlabel '" << to_string(cfg.sweep_axis) << "'\n";
            out << "set ylabel 'sigma_m / omega'\n";
            out << "set zlabel 'NMSE'\n";
            out << "# stack CSVs from runs at different sigma_m to fill the surface\n";
            out << "splot '" << csv_path << "' every ::1 using 1:(" << fmt(cfg.sigma_m_fraction)
                << "):6 with points title 'NMSE'\n";
            break;
        case PlotKind::PowerVsK:
            out << "set style fill solid 0.6\n";
            out << "set boxwidth 0.8\n";
            out << "set xlabel 'number of user terminals K'\n";
            out << "set ylabel 'power (W)'\n";
            out << "plot '" << csv_path << "' every ::1 using 1:7 with boxes title 'power'\n";
            break;
        case PlotKind::TopsVsK:
            out << "set logscale y\n";
            out << "set xlabel 'number of user terminals K'\n";
            out << "set ylabel 'TOPS/W'\n";
            out << "plot '" << csv_path
                << "' every ::1 using 1:8 with linespoints title 'circuit', "
                << fmt(cfg.gpu_tops_per_watt) << " with lines title 'GPU reference'\n";
            break;
    }
    if (!out) throw IoError("emit_plot_script: write failed for " + path);
}

}  // namespace mcadet
