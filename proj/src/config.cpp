// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#include "mcadet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mcadet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

double parse_number(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end).size() != 0)
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    return x;
}

long long parse_int(const std::string& v, const std::string& key) {
    const double x = parse_number(v, key);
    const long long i = static_cast<long long>(std::llround(x));
    if (static_cast<double>(i) != x)
        throw ConfigError("config: expected integer for " + key + ": '" + v + "'");
    return i;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config: expected true/false for " + key + ": '" + v + "'");
}

std::string parse_string(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;  // bare tokens accepted
}

std::vector<double> parse_array(const std::string& v, const std::string& key) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("config: expected [..] array for " + key);
    std::vector<double> out;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(item, key));
    }
    return out;
}

SweepAxis parse_axis(const std::string& v) {
    if (v == "snr_db") return SweepAxis::SnrDb;
    if (v == "beta") return SweepAxis::Beta;
    if (v == "sigma_m") return SweepAxis::SigmaM;
    if (v == "olg_db") return SweepAxis::OlgDb;
    if (v == "k_users") return SweepAxis::KUsers;
    throw ConfigError("config: unknown sweep axis '" + v + "'");
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_number(value, key); };
    auto integer = [&] { return parse_int(value, key); };
    auto flag = [&] { return parse_bool(value, key); };
    auto str = [&] { return parse_string(value); };

    if (key == "scenario.rx_antennas") c.scenario.rx_antennas = static_cast<int>(integer());
    else if (key == "scenario.users") c.scenario.users = static_cast<int>(integer());
    else if (key == "scenario.cell_radius_m") c.scenario.cell_radius_m = num();
    else if (key == "scenario.tx_power_dbm") c.scenario.tx_power_dbm = num();
    else if (key == "scenario.carrier_freq_hz") c.scenario.carrier_freq_hz = num();
    else if (key == "scenario.bandwidth_hz") c.scenario.bandwidth_hz = num();
    else if (key == "scenario.noise_figure_db") c.scenario.noise_figure_db = num();
    else if (key == "scenario.sigma_g2") c.scenario.sigma_g = std::sqrt(num());
    else if (key == "scenario.pathloss_exponent") c.scenario.pathloss_exponent = num();
    else if (key == "scenario.pathloss_ref_db") c.scenario.pathloss_ref_db = num();
    else if (key == "mode") {
        const std::string v = str();
        if (v == "snr") c.mode = SimulationMode::SnrSwept;
        else if (v == "cell") c.mode = SimulationMode::Cell;
        else throw ConfigError("config: mode must be snr or cell");
    } else if (key == "detector") {
        const std::string v = str();
        if (v == "zf") c.detector = DetectorVariant::Zf;
        else if (v == "mmse") c.detector = DetectorVariant::Mmse;
        else throw ConfigError("config: detector must be zf or mmse");
    } else if (key == "topology") {
        const std::string v = str();
        if (v == "proposed") c.topology = Topology::Proposed;
        else if (v == "conventional") c.topology = Topology::Conventional;
        else if (v == "digital") c.topology = Topology::DigitalReference;
        else throw ConfigError("config: topology must be proposed, conventional or digital");
    } else if (key == "scheme") {
        const std::string v = str();
        if (v == "amf") c.scheme.kind = MappingKind::Amf;
        else if (v == "fmf") c.scheme.kind = MappingKind::Fmf;
        else throw ConfigError("config: scheme must be amf or fmf");
    } else if (key == "beta") c.scheme.beta = num();
    else if (key == "range.omega_min_s") c.range.omega_min = num();
    else if (key == "range.omega_max_s") c.range.omega_max = num();
    else if (key == "sigma_m_fraction") c.sigma_m_fraction = num();
    else if (key == "oa.olg_db") c.oa.open_loop_gain = OaModel::olg_from_db(num());
    else if (key == "oa.gbp_hz") c.oa.gbp_hz = num();
    else if (key == "oa.solver") {
        const std::string v = str();
        if (v == "ideal") c.solver = CircuitSolver::Ideal;
        else if (v == "finite") c.solver = CircuitSolver::FiniteGain;
        else if (v == "transient") c.solver = CircuitSolver::Transient;
        else throw ConfigError("config: oa.solver must be ideal, finite or transient");
    } else if (key == "oa.ideal_inverters") c.oa.ideal_inverters = flag();
    else if (key == "oa.ideal_followers") c.oa.ideal_followers = flag();
    else if (key == "oa.followers_load") c.oa.followers_load = flag();
    else if (key == "oa.t_end_s") c.t_end_s = num();
    else if (key == "oa.settle_tol") c.settle_tol = num();
    else if (key == "deviate_amplifiers") c.deviate_amplifiers = flag();
    else if (key == "strict_mapping") c.strict_mapping = flag();
    else if (key == "qam_order") c.qam_order = static_cast<int>(integer());
    else if (key == "symbol_energy") c.symbol_energy = num();
    else if (key == "snr_db") c.snr_db = num();
    else if (key == "sweep.axis") c.sweep_axis = parse_axis(str());
    else if (key == "sweep.values") c.sweep_values = parse_array(value, key);
    else if (key == "stop.max_frames") c.stop.max_frames = integer();
    else if (key == "stop.target_bit_errors") c.stop.target_bit_errors = integer();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer());
    else if (key == "out_path") c.out_path = str();
    else if (key == "threads") c.threads = static_cast<int>(integer());
    else if (key == "t_compute_s") c.t_compute_s = num();
    else if (key == "freeze_lsfc") c.freeze_lsfc = flag();
    else if (key == "converters.dac_bits") c.converters.dac_bits = static_cast<int>(integer());
    else if (key == "converters.adc_bits") c.converters.adc_bits = static_cast<int>(integer());
    else if (key == "power.p_oa_w") c.power.p_oa_w = num();
    else if (key == "power.p_dac_w") c.power.p_dac_w = num();
    else if (key == "power.p_adc_w") c.power.p_adc_w = num();
    else if (key == "power.include_array_static") c.power.include_array_static = flag();
    else if (key == "gpu_tops_per_watt") c.gpu_tops_per_watt = num();
    else throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " malformed");
        apply_key(cfg, key, value);
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    apply_config_text(cfg, text);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
    scenario.validate();
    range.validate();
    if (sweep_values.empty()) throw ConfigError("config: sweep.values must be non-empty");
    if (stop.max_frames < 1) throw ConfigError("config: stop.max_frames must be >= 1");
    if (qam_order != 4 && qam_order != 16 && qam_order != 64)
        throw ConfigError("config: qam_order must be 4, 16 or 64");
    if (symbol_energy <= 0.0) throw ConfigError("config: symbol_energy must be > 0");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (sigma_m_fraction < 0.0) throw ConfigError("config: sigma_m_fraction must be >= 0");
    if (scheme.kind == MappingKind::Fmf && scheme.beta <= 0.0)
        throw ConfigError("config: FMF beta must be > 0");
    if (sweep_axis == SweepAxis::Beta && scheme.kind != MappingKind::Fmf)
        throw ConfigError("config: beta sweep requires scheme = fmf");
    if (sweep_axis == SweepAxis::SnrDb && mode != SimulationMode::SnrSwept)
        throw ConfigError("config: snr_db sweep requires mode = snr");
    if (sweep_axis == SweepAxis::KUsers) {
        for (double v : sweep_values) {
            const int k = static_cast<int>(std::llround(v));
            if (static_cast<double>(k) != v || k < 1 || k > scenario.rx_antennas)
                throw ConfigError("config: k_users sweep values must be integers in [1, R]");
        }
    }
    if (oa.open_loop_gain <= 0.0) throw ConfigError("config: oa.olg_db invalid");
    if (oa.gbp_hz <= 0.0) throw ConfigError("config: oa.gbp_hz must be > 0");
    if (t_compute_s <= 0.0) throw ConfigError("config: t_compute_s must be > 0");
    if (settle_tol <= 0.0 || settle_tol >= 1.0)
        throw ConfigError("config: oa.settle_tol must be in (0, 1)");
}

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::Beta: return "beta";
        case SweepAxis::SigmaM: return "sigma_m";
        case SweepAxis::OlgDb: return "olg_db";
        case SweepAxis::KUsers: return "k_users";
    }
    return "?";
}

std::vector<std::string> recipe_names() {
    return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "timing"};
}

ExperimentConfig recipe_config(const std::string& name) {
    ExperimentConfig c;  // defaults: 4x64, 64-QAM, MMSE, proposed, AMF
    if (name == "fig3") {
        // BER vs OA open-loop gain, no deviations.
        c.sweep_axis = SweepAxis::OlgDb;
        c.sweep_values = {40, 60, 80, 100};
        c.snr_db = 24.0;
        c.sigma_m_fraction = 0.0;
        c.stop = {300000, 500};
        c.out_path = "fig3.csv";
    } else if (name == "fig4") {
        // FMF truncation study, no deviations.
        c.scheme = {MappingKind::Fmf, 1.0};
        c.sweep_axis = SweepAxis::Beta;
        c.sweep_values = {1, 2, 3, 4};
        c.snr_db = 24.0;
        c.stop = {300000, 500};
        c.out_path = "fig4.csv";
    } else if (name == "fig5") {
        // FMF with 1% deviations: BER turns over in beta.
        c.scheme = {MappingKind::Fmf, 1.0};
        c.sweep_axis = SweepAxis::Beta;
        c.sweep_values = {1, 2, 3, 4, 5, 6};
        c.snr_db = 24.0;
        c.sigma_m_fraction = 0.01;
        c.stop = {300000, 500};
        c.out_path = "fig5.csv";
    } else if (name == "fig6") {
        // NMSE operating point at 20 dB.
        c.scheme = {MappingKind::Fmf, 1.0};
        c.sweep_axis = SweepAxis::Beta;
        c.sweep_values = {1, 2, 3, 4, 5, 6};
        c.snr_db = 20.0;
        c.sigma_m_fraction = 0.01;
        c.stop = {4000, 0};
        c.out_path = "fig6.csv";
    } else if (name == "fig7") {
        // Cell-mode robustness comparison; run once per topology.
        c.mode = SimulationMode::Cell;
        c.scheme = {MappingKind::Fmf, 1.0};
        c.sweep_axis = SweepAxis::Beta;
        c.sweep_values = {1, 2, 3, 4, 5, 6};
        c.sigma_m_fraction = 0.005;
        c.stop = {100000, 500};
        c.out_path = "fig7.csv";
    } else if (name == "fig8") {
        // Power vs user count.
        c.sweep_axis = SweepAxis::KUsers;
        c.sweep_values = {2, 4, 8, 16};
        c.snr_db = 24.0;
        c.stop = {50, 0};
        c.out_path = "fig8.csv";
    } else if (name == "fig9") {
        // Energy efficiency vs user count.
        c.sweep_axis = SweepAxis::KUsers;
        c.sweep_values = {2, 4, 8, 16};
        c.snr_db = 24.0;
        c.stop = {50, 0};
        c.out_path = "fig9.csv";
    } else if (name == "timing") {
        c.solver = CircuitSolver::Transient;
        c.sweep_axis = SweepAxis::SnrDb;
        c.sweep_values = {24};
        c.stop = {10, 0};
        c.out_path = "timing.csv";
    } else {
        throw ConfigError("unknown recipe '" + name + "'");
    }
    return c;
}

}  // namespace mcadet
