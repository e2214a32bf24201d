#include "tizx/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "tizx/errors.hpp"

namespace tizx {

using nlohmann::json;

void RunConfig::validate() const
{
    const ZxParams params = ZxParams::for_oversampling(system.m_rx);
    if (!(system.t > 0.0)) throw ConfigError("system.T must be positive");
    if (!(system.f_c > 0.0)) throw ConfigError("system.f_c_over_T must be positive");
    if (!(system.eta_min >= 0.0 && system.eta_min < 1.0)) throw ConfigError("system.eta_min must lie in [0, 1)");
    if (!(system.energy_budget > 0.0)) throw ConfigError("system.energy_budget must be positive");
    sweep_config().validate(params);
    if (sweep.snr_db.empty()) throw ConfigError("sweep.snr_db is empty");
    if (psd.frames < 100) throw ConfigError("psd.frames must be at least 100");
    if (!(psd.f_max > 0.0) || psd.points < 3) throw ConfigError("psd grid is invalid");
    if (search.restarts < 1) throw ConfigError("search.restarts must be positive");
    if (!(search.fine_step > 0.0 && search.coarse_step >= search.fine_step))
        throw ConfigError("search steps must satisfy 0 < fine_step <= coarse_step");
    if (jobs < 0) throw ConfigError("jobs must be >= 0");
    if (output_dir.empty()) throw ConfigError("output_dir is empty");

    const std::string src = resolved_coeff_source();
    if (src == "table4" && system.m_rx != 2) throw ConfigError("table4 is the m_rx = 2 set");
    if (src == "table5" && system.m_rx != 3) throw ConfigError("table5 is the m_rx = 3 set");
    if (src != "table4" && src != "table5" && src != "optimize" && src.rfind("file:", 0) != 0)
        throw ConfigError("coeff_source must be table4, table5, optimize or file:<path>");
}

int RunConfig::resolved_jobs() const
{
    if (jobs > 0) return jobs;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int RunConfig::resolved_bits_per_rail() const
{
    if (system.bits_per_rail > 0) return system.bits_per_rail;
    return SweepConfig::for_oversampling(system.m_rx).bits_per_rail;
}

std::string RunConfig::resolved_coeff_source() const
{
    if (!coeff_source.empty()) return coeff_source;
    return system.m_rx == 2 ? "table4" : "table5";
}

SweepConfig RunConfig::sweep_config() const
{
    SweepConfig c = SweepConfig::for_oversampling(system.m_rx);
    c.snr_grid_db = sweep.snr_db;
    c.n_t = system.n_t;
    c.n_u = system.n_u;
    c.bits_per_rail = resolved_bits_per_rail();
    c.min_bits = sweep.min_bits;
    c.min_errors = sweep.min_errors;
    c.max_bits = sweep.max_bits;
    c.master_seed = master_seed;
    c.frames_per_batch = sweep.frames_per_batch;
    c.jobs = resolved_jobs();
    c.t = system.t;
    c.f_c = system.f_c;
    c.energy_budget = system.energy_budget;
    c.chaining = sweep.chaining;
    return c;
}

DesignProblem RunConfig::design_problem() const
{
    DesignProblem p;
    p.params = ZxParams::for_oversampling(system.m_rx);
    p.energy_budget = system.energy_budget;
    p.f_c = system.f_c;
    p.eta_min = system.eta_min;
    return p;
}

// ---------------------------------------------------------------------------

json to_json(const RunConfig& c)
{
    return json{
        {"system",
         {{"m_rx", c.system.m_rx},
          {"T", c.system.t},
          {"f_c_over_T", c.system.f_c},
          {"eta_min", c.system.eta_min},
          {"energy_budget", c.system.energy_budget},
          {"n_t", c.system.n_t},
          {"n_u", c.system.n_u},
          {"bits_per_rail", c.resolved_bits_per_rail()}}},
        {"sweep",
         {{"snr_db", c.sweep.snr_db},
          {"min_bits", c.sweep.min_bits},
          {"min_errors", c.sweep.min_errors},
          {"max_bits", c.sweep.max_bits},
          {"frames_per_batch", c.sweep.frames_per_batch},
          {"chaining", c.sweep.chaining == PolarityChaining::Raw ? "raw" : "detected"},
          {"feasibility_guard", c.sweep.feasibility_guard}}},
        {"psd", {{"frames", c.psd.frames}, {"f_max_over_T", c.psd.f_max}, {"points", c.psd.points}}},
        {"search",
         {{"restarts", c.search.restarts},
          {"coarse_step", c.search.coarse_step},
          {"fine_step", c.search.fine_step},
          {"gamma_tolerance", c.search.gamma_tolerance},
          {"max_sweeps_per_step", c.search.max_sweeps_per_step},
          {"seed", c.search.seed}}},
        {"coeff_source", c.resolved_coeff_source()},
        {"output_dir", c.output_dir},
        {"master_seed", c.master_seed},
        {"jobs", c.jobs},
    };
}

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed)
{
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const json& root)
{
    const json& j = root.contains("config") ? root.at("config") : root;
    RunConfig c;
    try {
        check_keys(j, "config", {"system", "sweep", "psd", "search", "coeff_source", "output_dir",
                                 "master_seed", "jobs"});
        if (j.contains("system")) {
            const json& s = j.at("system");
            check_keys(s, "system", {"m_rx", "T", "f_c_over_T", "eta_min", "energy_budget", "n_t", "n_u",
                                     "bits_per_rail"});
            read(s, "m_rx", c.system.m_rx);
            read(s, "T", c.system.t);
            read(s, "f_c_over_T", c.system.f_c);
            read(s, "eta_min", c.system.eta_min);
            read(s, "energy_budget", c.system.energy_budget);
            read(s, "n_t", c.system.n_t);
            read(s, "n_u", c.system.n_u);
            read(s, "bits_per_rail", c.system.bits_per_rail);
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            check_keys(s, "sweep", {"snr_db", "min_bits", "min_errors", "max_bits", "frames_per_batch",
                                    "chaining", "feasibility_guard"});
            read(s, "snr_db", c.sweep.snr_db);
            read(s, "min_bits", c.sweep.min_bits);
            read(s, "min_errors", c.sweep.min_errors);
            read(s, "max_bits", c.sweep.max_bits);
            read(s, "frames_per_batch", c.sweep.frames_per_batch);
            read(s, "feasibility_guard", c.sweep.feasibility_guard);
            if (s.contains("chaining")) {
                const auto v = s.at("chaining").get<std::string>();
                if (v == "raw") c.sweep.chaining = PolarityChaining::Raw;
                else if (v == "detected") c.sweep.chaining = PolarityChaining::Detected;
                else throw ConfigError("sweep.chaining must be raw or detected");
            }
        }
        if (j.contains("psd")) {
            const json& s = j.at("psd");
            check_keys(s, "psd", {"frames", "f_max_over_T", "points"});
            read(s, "frames", c.psd.frames);
            read(s, "f_max_over_T", c.psd.f_max);
            read(s, "points", c.psd.points);
        }
        if (j.contains("search")) {
            const json& s = j.at("search");
            check_keys(s, "search", {"restarts", "coarse_step", "fine_step", "gamma_tolerance",
                                     "max_sweeps_per_step", "seed"});
            read(s, "restarts", c.search.restarts);
            read(s, "coarse_step", c.search.coarse_step);
            read(s, "fine_step", c.search.fine_step);
            read(s, "gamma_tolerance", c.search.gamma_tolerance);
            read(s, "max_sweeps_per_step", c.search.max_sweeps_per_step);
            read(s, "seed", c.search.seed);
        }
        read(j, "coeff_source", c.coeff_source);
        read(j, "output_dir", c.output_dir);
        read(j, "master_seed", c.master_seed);
        read(j, "jobs", c.jobs);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig parse_run_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return run_config_from_json(j);
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace tizx
