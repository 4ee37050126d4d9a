#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "risfas/mc.hpp"
#include "risfas/secrecy.hpp"

namespace risfas::sweep {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Axis {
    avg_snr_b_db,
    ris_elements,
    ports_b,
    area_b,
    ports_e,
    area_e,
    rate_bits,
};

enum class Output { sop_glq, sop_reference, sop_mc, cdf_table, pdf_table };

const char* axis_name(Axis a);
const char* output_name(Output o);

// Resolved scenario template. Defaults follow the reference parameter set:
// Rs = 3 bits, d_ar = 100 m, d_rb = 500 m, d_re = 800 m, alpha = 2.1,
// noise -70 / -50 dBm, K = 2, M = 6, both grids 2x2 over 1 wavelength^2,
// Bob average SNR 2 dB (transmit power derived from it).
struct ScenarioConfig {
    int ris_elements = 6;
    double rate_bits = 3.0;
    int glq_order = 2;
    MvnAccuracy mvn{};

    double dist_ar_m = 100.0;
    double dist_rb_m = 500.0;
    double dist_re_m = 800.0;
    double pathloss_exp = 2.1;
    double noise_b_dbm = -70.0;
    double noise_e_dbm = -50.0;

    // Exactly one of power_dbm / avg_snr_b_db drives the budget; by default
    // the Bob SNR axis value (2 dB) fixes the transmit power.
    std::optional<double> power_dbm;
    double avg_snr_b_db = 2.0;
    // Explicit Eve SNR override; otherwise derived from the same transmit
    // power through the Eve link budget.
    std::optional<double> avg_snr_e_db;

    PortGrid bob_grid{2, 2, 1.0, 1.0};
    PortGrid eve_grid{2, 2, 1.0, 1.0};

    double resolved_power_dbm() const;
    double resolved_avg_snr_b_db() const;
    double resolved_avg_snr_e_db() const;
    SecrecyScenario build() const;
};

struct SweepSpec {
    ScenarioConfig base;
    Axis axis = Axis::avg_snr_b_db;
    std::vector<double> values; // non-empty, strictly monotone
    std::vector<Output> outputs{Output::sop_glq, Output::sop_reference};
    std::optional<mc::McConfig> mc_cfg;
    int workers = 1;
    std::uint64_t master_seed = 1;

    // Gamma grid for dist tables (0 < count); max <= 0 means automatic range.
    int dist_points = 50;
    double dist_gamma_max = 0.0;

    void validate() const;
};

struct Cell {
    bool present = false;
    double value = 0.0;
    double error = 0.0; // error estimate or CI half-width
    std::string flag;   // "below_numerical_floor", "accuracy", ...
};

struct SweepRow {
    double axis_value = 0.0;
    Cell sop_glq;
    Cell sop_reference;
    Cell sop_mc;
    double mc_ci_lo = 0.0;
    double mc_ci_hi = 0.0;
    double wall_seconds = 0.0;
    std::string error; // per-point failure, run continues
};

// Parse + validate a JSON config file. Unknown keys are rejected with the
// list of valid keys; field invariants are reported by name. A missing or
// empty file yields the default spec.
SweepSpec load_config(const std::string& path);
SweepSpec parse_config(const nlohmann::json& j);

// Evaluate every axis point (optionally on several worker threads). Output
// order follows `spec.values` regardless of completion order; per-point MVN
// and MC seeds are derived from (master_seed, point index).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Distribution tables (Fig. 2-style data): per-gamma rows for both nodes.
struct DistRow {
    double gamma = 0.0;
    double cdf_b = 0.0, pdf_b_paper = 0.0, pdf_b_derivative = 0.0;
    double cdf_e = 0.0, pdf_e_paper = 0.0, pdf_e_derivative = 0.0;
    double mc_cdf_b = -1.0, mc_cdf_e = -1.0; // < 0 when MC not requested
};
std::vector<DistRow> run_dist(const SweepSpec& spec);

// Analytic-vs-MC comparison report.
struct ValidateRow {
    std::string metric;
    double value = 0.0;
    double detail_lo = 0.0, detail_hi = 0.0;
    std::string note;
};
std::vector<ValidateRow> run_validate(const SweepSpec& spec);

enum class Format { csv, json };

// Serialization. CSV bodies are deterministic (no timestamps); JSON carries a
// meta block with the resolved configuration, seeds and version.
std::string to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);
std::string to_csv(const std::vector<DistRow>& rows, bool with_mc);
std::string to_csv(const std::vector<ValidateRow>& rows);
nlohmann::json meta_block(const SweepSpec& spec);
std::string to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);
std::string to_json(const SweepSpec& spec, const std::vector<DistRow>& rows, bool with_mc);
std::string to_json(const SweepSpec& spec, const std::vector<ValidateRow>& rows);

void write_file(const std::string& path, const std::string& content);

} // namespace risfas::sweep
