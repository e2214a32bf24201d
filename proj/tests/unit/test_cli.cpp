#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tizx/cli.hpp"
#include "tizx/config.hpp"
#include "tizx/errors.hpp"
#include "tizx/io.hpp"
#include "tizx/tables.hpp"

using namespace tizx;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path root;
    Scratch()
    {
        std::random_device rd;
        root = fs::temp_directory_path() / ("tizx_cli_" + std::to_string(rd()));
        fs::create_directories(root);
    }
    ~Scratch() { fs::remove_all(root); }
    std::string operator/(const std::string& name) const { return (root / name).string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& text)
{
    std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("config defaults and strict parsing")
{
    const RunConfig d = parse_run_config("{}");
    CHECK(d.system.m_rx == 3);
    CHECK(d.system.f_c == 0.65);
    CHECK(d.system.eta_min == 0.95);
    CHECK(d.system.n_t == 8);
    CHECK(d.system.n_u == 2);
    CHECK(d.resolved_bits_per_rail() == 60);
    CHECK(d.resolved_coeff_source() == "table5");
    CHECK(d.sweep.min_errors == 200);
    CHECK(d.sweep.snr_db.front() == 0.0);
    CHECK(d.sweep.snr_db.back() == 16.0);

    const RunConfig two = parse_run_config(R"({"system": {"m_rx": 2}})");
    CHECK(two.resolved_bits_per_rail() == 45);
    CHECK(two.resolved_coeff_source() == "table4");

    CHECK_THROWS_AS(parse_run_config(R"({"system": {"mrx": 2}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": {"m_rx": 4}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sweep": {"min_errors": 10}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sweep": {"chaining": "sideways"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"system": {"m_rx": 3}, "coeff_source": "table4"})"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/tizx.json"), ConfigError);
    CHECK_NOTHROW(parse_run_config("// note\n{\"jobs\": 2}"));
}

TEST_CASE("config round trip and summary replay")
{
    RunConfig c;
    c.system.m_rx = 2;
    c.system.n_t = 12;
    c.sweep.snr_db = {1, 3};
    c.sweep.chaining = PolarityChaining::Detected;
    c.sweep.feasibility_guard = false;
    c.search.restarts = 7;
    c.coeff_source = "optimize";
    c.master_seed = 99;
    c.output_dir = "x";
    const auto j = to_json(c);
    const RunConfig back = run_config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.sweep.chaining == PolarityChaining::Detected);
    CHECK(back.system.n_t == 12);

    const RunConfig replay = run_config_from_json(nlohmann::json{{"command", "ber"}, {"config", j}, {"runtime_s", 1.0}});
    CHECK(to_json(replay) == j);
}

TEST_CASE("validate-tables exit codes")
{
    Scratch s;
    const Run strict = run({"validate-tables"});
    CHECK(strict.code == kExitInfeasible);
    CHECK(strict.out.find("containment FAIL") != std::string::npos);
    CHECK(strict.out.find("norm ok, positive ok") != std::string::npos);

    const Run relaxed = run({"validate-tables", "--eta-min", "0.93", "--output-dir", s / "v"});
    CHECK(relaxed.code == kExitOk);
    CHECK(fs::exists(s / "v/tables.json"));
    const auto j = nlohmann::json::parse(read_file(s / "v/tables.json"));
    CHECK(j["tables"].size() == 2);

    CHECK(run({"validate-tables", "--m-rx", "3", "--eta-min", "0.94"}).code == kExitOk);
    CHECK(run({"validate-tables", "--m-rx", "2", "--eta-min", "0.94"}).code == kExitInfeasible);
}

TEST_CASE("argument and configuration errors")
{
    Scratch s;
    CHECK(run({"frobnicate"}).code == kExitConfig);
    CHECK(run({}).code == kExitConfig);
    CHECK(run({"report", "--config", s / "missing.json"}).code == kExitConfig);
    CHECK(run({"report", "--m-rx", "5"}).code == kExitConfig);
    CHECK(run({"report", "--m-rx", "3", "--coeffs", "table4", "--output-dir", s / "r"}).code == kExitConfig);
    CHECK(run({"ber", "--chaining", "sideways", "--output-dir", s / "r"}).code == kExitConfig);

    write(s / "g2.txt", format_coefficients(published_table(2)));
    const Run mismatch = run({"report", "--m-rx", "3", "--coeffs", s / "g2.txt", "--output-dir", s / "r"});
    CHECK(mismatch.code == kExitConfig);
    CHECK(mismatch.err.find("m_rx=2") != std::string::npos);

    write(s / "bad.json", "{\"system\": ");
    CHECK(run({"report", "--config", s / "bad.json"}).code == kExitConfig);
}

TEST_CASE("unwritable output directory")
{
    Scratch s;
    write(s / "file", "x");
    const Run r = run({"report", "--output-dir", s / "file/sub"});
    CHECK(r.code == kExitIo);
    CHECK_THROWS_AS(write_file_atomic(s / "file/sub/a.txt", "x"), IoError);
}

TEST_CASE("report and psd artifacts")
{
    Scratch s;
    const Run rep = run({"report", "--m-rx", "2", "--output-dir", s / "rep"});
    CHECK(rep.code == kExitOk);
    CHECK(fs::exists(s / "rep/psd_analytic.csv"));
    const auto summary = nlohmann::json::parse(read_file(s / "rep/summary.json"));
    CHECK(summary["containment"]["eta"].get<double>() == doctest::Approx(0.935663).epsilon(1e-5));
    CHECK(summary["config"]["system"]["m_rx"] == 2);

    const Run psd = run({"psd", "--frames", "200", "--output-dir", s / "psd"});
    CHECK(psd.code == kExitOk);
    CHECK(read_file(s / "psd/psd.csv").rfind("f_T,analytic_db,empirical_db\n", 0) == 0);
    const auto ps = nlohmann::json::parse(read_file(s / "psd/summary.json"));
    CHECK(ps["psd"]["frames"] == 200);

    // replaying the summary reproduces the run
    const Run again = run({"psd", "--config", s / "psd/summary.json", "--output-dir", s / "psd2"});
    CHECK(again.code == kExitOk);
    CHECK(read_file(s / "psd/psd.csv") == read_file(s / "psd2/psd.csv"));

    // nothing outside the output directories
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(s.root)) names.insert(e.path().filename().string());
    CHECK(names == std::set<std::string>{"psd", "psd2", "rep"});
    for (const auto& e : fs::recursive_directory_iterator(s.root))
        CHECK(e.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("ber subcommand and the feasibility guard")
{
    Scratch s;
    const std::vector<std::string> small{"--snr", "4", "--min-bits", "20000", "--min-errors", "100",
                                         "--jobs", "1"};
    auto with = [&](std::vector<std::string> a) {
        a.insert(a.end(), small.begin(), small.end());
        return run(a);
    };
    const Run guarded = with({"ber", "--output-dir", s / "g"});
    CHECK(guarded.code == kExitInfeasible);
    CHECK(guarded.err.find("infeasible") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "g/ber.csv"));

    const Run open = with({"ber", "--no-feasibility-guard", "--dump-samples", "2", "--output-dir", s / "o"});
    CHECK(open.code == kExitOk);
    const std::string csv = read_file(s / "o/ber.csv");
    CHECK(csv.rfind("snr_db,bits,errors,ber,ci_lo,ci_hi\n4,", 0) == 0);
    CHECK(fs::exists(s / "o/pre_quantization.csv"));
    const auto summary = nlohmann::json::parse(read_file(s / "o/summary.json"));
    CHECK(summary["frame"]["samples_per_rail"] == 90);
    CHECK(summary["points"].size() == 1);
    CHECK(summary["config"]["sweep"]["feasibility_guard"] == false);

    const Run relaxed = with({"ber", "--eta-min", "0.94", "--output-dir", s / "r"});
    CHECK(relaxed.code == kExitOk);
    CHECK(read_file(s / "r/ber.csv") == csv);
}

TEST_CASE("reference curves hold the acceptance targets")
{
    auto lookup = [](const std::string& name, double snr) {
        std::istringstream in(read_file(std::string(TIZX_SOURCE_DIR) + "/data/reference/" + name + ".csv"));
        std::string line;
        std::getline(in, line);
        REQUIRE(line == "snr_db,ber");
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (std::stod(line.substr(0, comma)) == snr) return std::stod(line.substr(comma + 1));
        }
        return -1.0;
    };
    CHECK(lookup("ber_mrx3_proposed", 0) == doctest::Approx(0.292).epsilon(1e-3));
    CHECK(lookup("ber_mrx3_proposed", 10) == doctest::Approx(0.0627).epsilon(1e-3));
    CHECK(lookup("ber_mrx3_proposed", 16) == doctest::Approx(3.43e-3).epsilon(2e-3));
    CHECK(lookup("ber_mrx2_proposed", 0) == doctest::Approx(0.260).epsilon(2e-3));
    CHECK(lookup("ber_mrx2_proposed", 10) == doctest::Approx(6.99e-3).epsilon(1e-3));
    for (const char* n : {"ber_mrx3_mmddt", "ber_mrx3_random_zx", "ber_mrx3_golay_zx"}) CHECK(lookup(n, 30) >= 0.0);
}
