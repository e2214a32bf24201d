#pragma once

/**
 * @file config.hpp
 * @brief Run configuration (JSON). Frequencies are in units of 1/T, T = 1 s.
 *
 *   {
 *     "system": {"m_rx": 3, "T": 1, "f_c_over_T": 0.65, "eta_min": 0.95,
 *                "energy_budget": 1, "n_t": 8, "n_u": 2, "bits_per_rail": 60},
 *     "sweep":  {"snr_db": [0, 2, ...], "min_bits": 2000000, "min_errors": 200,
 *                "max_bits": 100000000, "frames_per_batch": 128,
 *                "chaining": "raw", "feasibility_guard": true},
 *     "psd":    {"frames": 10000, "f_max_over_T": 3, "points": 8192},
 *     "search": {"restarts": 64, "coarse_step": 0.01, "fine_step": 0.0001,
 *                "gamma_tolerance": 1e-5, "seed": 20210607},
 *     "coeff_source": "table5",          // table4 | table5 | file:<path> | optimize
 *     "output_dir": "out",
 *     "master_seed": 1,
 *     "jobs": 0                          // 0 = available cores
 *   }
 *
 * Every key is optional. A summary.json written by a run carries the resolved
 * configuration under "config" and can be passed back as the config file.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tizx/detector.hpp"
#include "tizx/harness.hpp"
#include "tizx/optimizer.hpp"

namespace tizx {

struct SystemConfig {
    int m_rx = 3;
    double t = 1.0;
    double f_c = 0.65;
    double eta_min = 0.95;
    double energy_budget = 1.0;
    int n_t = 8;
    int n_u = 2;
    int bits_per_rail = 0;  // 0: table default for m_rx
};

struct SweepSettings {
    std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14, 16};
    std::uint64_t min_bits = 2'000'000;
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 100'000'000;
    int frames_per_batch = 128;
    PolarityChaining chaining = PolarityChaining::Raw;
    bool feasibility_guard = true;
};

struct PsdSettings {
    int frames = 10000;
    double f_max = 3.0;
    int points = 8192;
};

struct RunConfig {
    SystemConfig system;
    SweepSettings sweep;
    PsdSettings psd;
    SearchConfig search;
    std::string coeff_source;  // empty: table for system.m_rx
    std::string output_dir = "out";
    std::uint64_t master_seed = 1;
    int jobs = 0;

    /// Throws ConfigError.
    void validate() const;
    int resolved_jobs() const;
    int resolved_bits_per_rail() const;
    std::string resolved_coeff_source() const;

    SweepConfig sweep_config() const;
    DesignProblem design_problem() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Accepts a plain config or a summary.json with a "config" member.
/// Throws ConfigError on malformed input or unknown keys.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace tizx
