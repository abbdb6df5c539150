// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcadet/channel.hpp"
#include "mcadet/circuit.hpp"
#include "mcadet/mapping.hpp"
#include "mcadet/metrics.hpp"

namespace mcadet {

// snr: fixed unit large-scale coefficients, snr_db sets the noise level
//      as per-user full-array received SNR.
// cell: terminals drop uniformly in the cell, noise from bandwidth and
//       noise figure, symbol energy from the transmit power.
enum class SimulationMode { SnrSwept, Cell };

enum class SweepAxis { SnrDb, Beta, SigmaM, OlgDb, KUsers };

struct StopRule {
    long long max_frames = 100000;
    long long target_bit_errors = 500;  // <= 0 disables the error target
};

struct ExperimentConfig {
    ScenarioParams scenario;
    SimulationMode mode = SimulationMode::SnrSwept;
    DetectorVariant detector = DetectorVariant::Mmse;
    Topology topology = Topology::Proposed;
    MappingScheme scheme{MappingKind::Amf, 3.0};
    DeviceRange range;
    double sigma_m_fraction = 0.0;  // of omega
    OaModel oa;
    CircuitSolver solver = CircuitSolver::FiniteGain;
    ConverterOptions converters;
    bool deviate_amplifiers = true;
    bool strict_mapping = false;
    int qam_order = 64;
    double symbol_energy = 1.0;  // p_s in snr mode
    double snr_db = 20.0;
    SweepAxis sweep_axis = SweepAxis::SnrDb;
    std::vector<double> sweep_values;
    StopRule stop;
    std::uint64_t seed = 1;
    std::string out_path = "results.csv";
    int threads = 1;
    double t_compute_s = 110e-9;  // efficiency compute time w/o transient solver
    double t_end_s = 2e-6;
    double settle_tol = 0.01;
    bool freeze_lsfc = false;
    PowerParams power;
    double gpu_tops_per_watt = 0.0066;  // chart overlay constant

    void validate() const;  // throws ConfigError
};

// Flat key/value text (TOML dialect): `key = value` lines, `#` comments,
// numbers, true/false, quoted strings and [a, b, c] numeric arrays.
// Unknown keys are rejected. Values overlay onto cfg.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);  // throws IoError

// Built-in experiment presets: fig3..fig9 and timing.
ExperimentConfig recipe_config(const std::string& name);
std::vector<std::string> recipe_names();

const char* to_string(SweepAxis axis);

}  // namespace mcadet
