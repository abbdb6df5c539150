// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <string>
#include <vector>

#include "mcadet/config.hpp"

namespace mcadet {

struct ResultRow {
    double sweep_value = 0.0;
    double snr_db = 0.0;
    double ber = 0.0;
    long long bit_errors = 0;
    long long bits = 0;
    double nmse = 0.0;
    double power_w = 0.0;
    double tops_per_watt = 0.0;
    double settle_time_s = 0.0;        // NaN unless the transient solver ran
    double truncated_fraction = 0.0;
    std::uint64_t seed = 0;
    long long frames = 0;          // not part of the CSV schema
    long long failed_frames = 0;   // frames skipped due to module errors
};

// Monte Carlo execution of one configured experiment: one row per sweep
// point. Frames run in fixed-size batches whose results merge in frame
// order, so the output is independent of the thread count. Per-frame
// module errors are counted and skipped; a sweep point where every frame
// fails raises the error instead.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

std::string csv_text(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);  // throws IoError

enum class PlotKind { BerVsSnr, BerVsSweep, NmseSurface, PowerVsK, TopsVsK };

PlotKind plot_kind_for(const ExperimentConfig& cfg);

// gnuplot-dialect script referencing the CSV file.
void emit_plot_script(const std::vector<ResultRow>& rows, PlotKind kind, const std::string& path,
                      const std::string& csv_path, const ExperimentConfig& cfg);

// Noise variance (complex, per receive antenna) and symbol energy for a
// configuration. In snr mode snr_db is the per-user full-array received
// SNR: sigma_n^2 = p_s * 2 sigma_g^2 R / snr_lin.
struct LinkBudget {
    double symbol_energy = 1.0;
    double sigma_n2 = 0.0;
    double rho = 0.0;
};

LinkBudget link_budget(const ExperimentConfig& cfg, double snr_db);

}  // namespace mcadet
