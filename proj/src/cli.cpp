#include "tizx/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "tizx/config.hpp"
#include "tizx/errors.hpp"
#include "tizx/harness.hpp"
#include "tizx/io.hpp"
#include "tizx/optimizer.hpp"
#include "tizx/tables.hpp"

namespace tizx {

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string output_dir;
    std::string coeffs;
    std::string chaining;
    int m_rx = 0;
    int frames = 0;
    int jobs = -1;
    int dump_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t min_bits = 0;
    std::uint64_t min_errors = 0;
    double eta_min = -1.0;
    std::vector<double> snr;
    bool no_guard = false;
    bool seed_set = false;
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON run configuration (or a previous summary.json)");
    sub->add_option("--m-rx", f.m_rx, "oversampling factor (2 or 3)");
    sub->add_option("--coeffs", f.coeffs, "table4 | table5 | optimize | <file>");
    sub->add_option("--output-dir", f.output_dir, "directory for CSV/JSON artifacts");
    sub->add_option("--seed", f.seed, "master seed")->each([&f](const std::string&) { f.seed_set = true; });
    sub->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
    sub->add_option("--eta-min", f.eta_min, "required power containment");
}

RunConfig resolve_config(const Flags& f)
{
    RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (f.m_rx) {
        if (c.system.m_rx != f.m_rx) {
            c.system.bits_per_rail = 0;
            if (c.coeff_source == "table4" || c.coeff_source == "table5") c.coeff_source.clear();
        }
        c.system.m_rx = f.m_rx;
    }
    if (!f.coeffs.empty()) {
        if (f.coeffs == "table4" || f.coeffs == "table5" || f.coeffs == "optimize" ||
            f.coeffs.rfind("file:", 0) == 0)
            c.coeff_source = f.coeffs;
        else
            c.coeff_source = "file:" + f.coeffs;
    }
    if (!f.output_dir.empty()) c.output_dir = f.output_dir;
    if (f.seed_set) c.master_seed = f.seed;
    if (f.jobs >= 0) c.jobs = f.jobs;
    if (f.eta_min >= 0.0) c.system.eta_min = f.eta_min;
    if (f.frames > 0) c.psd.frames = f.frames;
    if (!f.snr.empty()) c.sweep.snr_db = f.snr;
    if (f.min_bits) c.sweep.min_bits = f.min_bits;
    if (f.min_errors) c.sweep.min_errors = f.min_errors;
    if (f.no_guard) c.sweep.feasibility_guard = false;
    if (f.chaining == "raw") c.sweep.chaining = PolarityChaining::Raw;
    else if (f.chaining == "detected") c.sweep.chaining = PolarityChaining::Detected;
    else if (!f.chaining.empty()) throw ConfigError("--chaining must be raw or detected");
    c.validate();
    return c;
}

SearchConfig search_of(const RunConfig& c)
{
    SearchConfig s = c.search;
    s.jobs = c.resolved_jobs();
    return s;
}

json coeffs_json(const CoefficientSet& cs)
{
    json rows = json::array();
    const auto& g = cs.matrix();
    for (int i = 0; i < g.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < g.cols(); ++j) r.push_back(g(i, j));
        rows.push_back(r);
    }
    return rows;
}

json solution_json(const DesignSolution& sol)
{
    json trace = json::array();
    for (const auto& s : sol.log.trace)
        trace.push_back({{"gamma", s.gamma}, {"best_eta", s.best_eta}, {"feasible", s.feasible}});
    json j{{"gamma", sol.gamma},
           {"eta", sol.eta},
           {"norm_sq", sol.norm_sq},
           {"feasible", sol.feasible},
           {"evaluations", sol.log.evaluations},
           {"bracket", {sol.log.bracket_lo, sol.log.bracket_hi}},
           {"trace", trace}};
    if (sol.coeffs) j["coefficients"] = coeffs_json(*sol.coeffs);
    return j;
}

CoefficientSet resolve_coefficients(const RunConfig& c, json& summary, std::ostream& out)
{
    const std::string src = c.resolved_coeff_source();
    if (src == "table4" || src == "table5") return published_table(c.system.m_rx);
    if (src == "optimize") {
        const DesignSolution sol = solve(c.design_problem(), search_of(c));
        summary["optimization"] = solution_json(sol);
        if (!sol.feasible || !sol.coeffs)
            throw InfeasibleError("optimizer found no feasible coefficient set (best eta " +
                                  std::to_string(sol.eta) + ")");
        out << "optimized: gamma=" << sol.gamma << " eta=" << sol.eta << "\n";
        return *sol.coeffs;
    }
    CoefficientSet cs = load_coefficients(src.substr(5));
    if (cs.params().m_rx != c.system.m_rx)
        throw ConfigError("coefficient file is an m_rx=" + std::to_string(cs.params().m_rx) +
                          " set but m_rx=" + std::to_string(c.system.m_rx) + " was requested");
    return cs;
}

std::string out_path(const RunConfig& c, const std::string& name)
{
    return (std::filesystem::path(c.output_dir) / name).string();
}

void write_summary(const RunConfig& c, json summary, double seconds)
{
    summary["config"] = to_json(c);
    summary["runtime_s"] = seconds;
    write_file_atomic(out_path(c, "summary.json"), summary.dump(2) + "\n");
}

json coefficient_summary(const CoefficientSet& cs, double f_c)
{
    const ContainmentReport rep = containment_report(cs, f_c);
    return {{"coefficients", coeffs_json(cs)},
            {"gamma", cs.min_entry()},
            {"norm_sq", cs.norm_sq()},
            {"eta", rep.eta},
            {"total_power", rep.total_power},
            {"inband_power", rep.inband_power},
            {"f_c_over_T", rep.f_c}};
}

// --------------------------------------------------------------------------

int cmd_validate_tables(const Flags& f, std::ostream& out)
{
    RunConfig base = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (f.eta_min >= 0.0) base.system.eta_min = f.eta_min;
    std::vector<int> which = f.m_rx ? std::vector<int>{f.m_rx} : std::vector<int>{3, 2};
    bool all_ok = true;
    json results = json::array();
    for (int m : which) {
        RunConfig c = base;
        c.system.m_rx = m;
        c.system.bits_per_rail = 0;
        c.coeff_source.clear();
        c.validate();
        const CoefficientSet table = published_table(m);
        const TableReport r = verify_table(c.design_problem(), table);
        const bool ok = r.norm_ok && r.positive && r.containment_ok;
        all_ok = all_ok && ok;
        out << std::setprecision(6) << "m_rx=" << m << " " << (m == 3 ? "table5" : "table4")
            << ": gamma=" << r.min_entry << " norm_sq=" << r.evaluation.norm_sq
            << " eta=" << r.evaluation.eta << " (f_c=" << c.system.f_c << "/T, required "
            << c.system.eta_min << ")"
            << " norm " << (r.norm_ok ? "ok" : "FAIL") << ", positive " << (r.positive ? "ok" : "FAIL")
            << ", containment " << (r.containment_ok ? "ok" : "FAIL") << "\n";
        results.push_back({{"m_rx", m},
                           {"gamma", r.min_entry},
                           {"norm_sq", r.evaluation.norm_sq},
                           {"eta", r.evaluation.eta},
                           {"norm_ok", r.norm_ok},
                           {"positive", r.positive},
                           {"containment_ok", r.containment_ok}});
    }
    if (!f.output_dir.empty()) {
        base.output_dir = f.output_dir;
        write_file_atomic(out_path(base, "tables.json"), json{{"tables", results}}.dump(2) + "\n");
    }
    return all_ok ? kExitOk : kExitInfeasible;
}

int cmd_optimize(const Flags& f, std::ostream& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig c = resolve_config(f);
    const DesignSolution sol = solve(c.design_problem(), search_of(c));
    json summary{{"command", "optimize"}, {"optimization", solution_json(sol)}};
    if (sol.coeffs) {
        write_file_atomic(out_path(c, "coefficients.txt"), format_coefficients(*sol.coeffs));
        summary["containment"] = coefficient_summary(*sol.coeffs, c.system.f_c);
    }
    write_file_atomic(out_path(c, "solution.json"), solution_json(sol).dump(2) + "\n");
    write_summary(c, summary, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out << std::setprecision(8) << "m_rx=" << c.system.m_rx << " gamma=" << sol.gamma << " eta=" << sol.eta
        << " norm_sq=" << sol.norm_sq << (sol.feasible ? " feasible" : " INFEASIBLE") << "\n";
    return sol.feasible ? kExitOk : kExitInfeasible;
}

int cmd_ber(const Flags& f, std::ostream& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig c = resolve_config(f);
    json summary{{"command", "ber"}};
    const CoefficientSet cs = resolve_coefficients(c, summary, out);
    summary["containment"] = coefficient_summary(cs, c.system.f_c);

    const SweepConfig sweep = c.sweep_config();
    summary["frame"] = {{"samples_per_rail", sweep.samples_per_rail(cs.params())},
                        {"nyquist_intervals", sweep.nyquist_intervals(cs.params())},
                        {"E0", sweep.frame_energy(cs.params())}};
    if (f.dump_samples > 0)
        write_file_atomic(out_path(c, "pre_quantization.csv"),
                          dump_pre_quantization(sweep, cs, sweep.snr_grid_db.front(), f.dump_samples));

    FeasibilityGuard guard;
    guard.enforce = c.sweep.feasibility_guard;
    guard.eta_min = c.system.eta_min;
    const BerCurve curve = ber_sweep(sweep, cs, guard);

    json points = json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"snr_db", p.snr_db}, {"bits", p.bits}, {"errors", p.errors}, {"frames", p.frames},
                          {"ber", p.ber}, {"ci", {p.ci_lo, p.ci_hi}}, {"runtime_s", p.seconds}});
        out << std::setprecision(6) << "snr=" << p.snr_db << " dB  ber=" << p.ber << "  [" << p.ci_lo
            << ", " << p.ci_hi << "]  bits=" << p.bits << " errors=" << p.errors << "\n";
    }
    summary["points"] = points;
    summary["channel_resamples"] = curve.channel_resamples;
    summary["seeds"] = {{"master_seed", c.master_seed}};
    write_file_atomic(out_path(c, "ber.csv"), ber_csv(curve));
    write_summary(c, summary, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return kExitOk;
}

int cmd_psd(const Flags& f, std::ostream& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig c = resolve_config(f);
    json summary{{"command", "psd"}};
    const CoefficientSet cs = resolve_coefficients(c, summary, out);
    summary["containment"] = coefficient_summary(cs, c.system.f_c);

    std::seed_seq seq{static_cast<std::uint32_t>(c.master_seed), static_cast<std::uint32_t>(c.master_seed >> 32),
                      0x50534400u};
    Rng rng(seq);
    const EmpiricalPsd psd = empirical_psd(cs, c.psd.frames, rng, c.resolved_bits_per_rail());

    double max_dev = 0.0;
    for (std::size_t i = 0; i < psd.freqs.size(); ++i)
        if (std::abs(psd.freqs[i]) <= c.system.f_c)
            max_dev = std::max(max_dev, std::abs(psd.empirical_db[i] - psd.analytic_db[i]));
    const double numeric = numeric_power(psd, 2000, c.system.t);
    const double closed = summary["containment"]["total_power"].get<double>();

    summary["psd"] = {{"frames", psd.frames},
                      {"bins", psd.freqs.size()},
                      {"max_inband_deviation_db", max_dev},
                      {"numeric_power", numeric},
                      {"closed_form_power", closed}};
    write_file_atomic(out_path(c, "psd.csv"), psd_csv(psd));
    write_file_atomic(out_path(c, "psd_analytic.csv"), analytic_psd_csv(cs, c.psd.f_max, c.psd.points));
    write_summary(c, summary, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out << std::setprecision(6) << "frames=" << psd.frames << " max in-band deviation=" << max_dev
        << " dB  numeric power=" << numeric << "  closed form=" << closed << "\n";
    return kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig c = resolve_config(f);
    json summary{{"command", "report"}};
    const CoefficientSet cs = resolve_coefficients(c, summary, out);
    const json rep = coefficient_summary(cs, c.system.f_c);
    summary["containment"] = rep;
    write_file_atomic(out_path(c, "psd_analytic.csv"), analytic_psd_csv(cs, c.psd.f_max, c.psd.points));
    write_summary(c, summary, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out << std::setprecision(8) << "m_rx=" << c.system.m_rx << " gamma=" << rep["gamma"].get<double>()
        << " norm_sq=" << rep["norm_sq"].get<double>() << " eta=" << rep["eta"].get<double>()
        << " P=" << rep["total_power"].get<double>() << " inband=" << rep["inband_power"].get<double>()
        << "\n";
    return kExitOk;
}

std::string one_line(std::string s)
{
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"TI ZX waveform design and 1-bit MIMO link toolkit", "tizx"};
    app.require_subcommand(1);
    Flags f;

    auto* optimize = app.add_subcommand("optimize", "design a coefficient set");
    auto* validate = app.add_subcommand("validate-tables", "check the built-in coefficient tables");
    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER sweep");
    auto* psd = app.add_subcommand("psd", "empirical vs analytic PSD");
    auto* report = app.add_subcommand("report", "containment report and analytic PSD");
    for (auto* sub : {optimize, validate, ber, psd, report}) add_common(sub, f);
    ber->add_option("--snr", f.snr, "SNR grid in dB");
    ber->add_option("--min-bits", f.min_bits, "minimum simulated bits per point");
    ber->add_option("--min-errors", f.min_errors, "minimum bit errors per point");
    ber->add_flag("--no-feasibility-guard", f.no_guard, "simulate even if the set misses the constraints");
    ber->add_option("--chaining", f.chaining, "polarity chaining: raw | detected");
    ber->add_option("--dump-samples", f.dump_samples, "write pre-quantization samples of N frames");
    psd->add_option("--frames", f.frames, "number of frames to average");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*validate) return cmd_validate_tables(f, out);
        if (*optimize) return cmd_optimize(f, out);
        if (*ber) return cmd_ber(f, out);
        if (*psd) return cmd_psd(f, out);
        if (*report) return cmd_report(f, out);
    } catch (const ConfigError& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return kExitConfig;
    } catch (const InputError& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << one_line(e.what()) << "\n";
        return kExitInfeasible;
    } catch (const IoError& e) {
        err << "I/O error: " << one_line(e.what()) << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace tizx
