// Acceptance checks. Usage: tizx_acceptance <criterion>
// Prints one "PASS <criterion> (...)" or "FAIL <criterion> (...)" line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "../unit/oracles.hpp"
#include "tizx/detector.hpp"
#include "tizx/harness.hpp"
#include "tizx/optimizer.hpp"
#include "tizx/spectrum.hpp"
#include "tizx/tables.hpp"

using namespace tizx;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [miss]");
    }
};

std::string num(double v, int prec = 6)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

Outcome table_feasibility()
{
    Outcome o;
    for (int m : {3, 2}) {
        const auto g = published_table(m);
        DesignProblem problem;
        problem.params = g.params();
        const auto r = verify_table(problem, g);
        const std::string tag = m == 3 ? "table5" : "table4";
        o.require(r.evaluation.norm_sq >= 0.999 && r.evaluation.norm_sq <= 1.001,
                  tag + " norm_sq=" + num(r.evaluation.norm_sq, 8));
        o.require(std::abs(r.min_entry - 0.1) < 1e-12, tag + " min=" + num(r.min_entry));
        o.require(r.evaluation.eta >= 0.95, tag + " eta=" + num(r.evaluation.eta) + " vs 0.95");
    }
    return o;
}

Outcome autocorrelation_oracle()
{
    Outcome o;
    for (int m : {3, 2}) {
        const auto g = published_table(m);
        const auto p = g.params();
        const auto ac = autocorrelation(build_machine(g), 4 * p.q);

        std::mt19937_64 rng(1000 + m);
        BitVector bits(static_cast<std::size_t>(1'000'000 / p.q) * p.bits_per_block);
        for (auto& b : bits) b = rng() & 1u;
        const auto stream = encode(bits, Polarity::Plus, g).coeffs;

        double worst = 0.0;
        for (int l = 0; l <= 4 * p.q; ++l)
            worst = std::max(worst, std::abs(ac.values[l] - oracle::time_average_lag(stream, l)));
        o.require(worst <= 1e-3, "m_rx=" + std::to_string(m) + " max|c_l - empirical|=" + num(worst, 3));
        if (m == 3) {
            const double d = std::abs(ac.values[0] - g.norm_sq() / 12.0);
            o.require(d <= 1e-12, "c0 closed form diff=" + num(d, 3));
        }
    }
    return o;
}

SweepConfig full_sweep(int m_rx)
{
    SweepConfig c = SweepConfig::for_oversampling(m_rx);
    c.min_bits = 2'000'000;
    c.min_errors = 200;
    c.max_bits = 100'000'000;
    c.jobs = 1;
    return c;
}

Outcome ber_reproduction()
{
    struct Ref {
        int m_rx;
        double snr;
        double ber;
        double tol;
    };
    const Ref refs[] = {{3, 0, 0.292, 0.05},  {3, 10, 0.0627, 0.10}, {3, 16, 3.43e-3, 0.15},
                        {2, 0, 0.260, 0.05},  {2, 10, 6.99e-3, 0.15}};
    Outcome o;
    std::size_t idx = 0;
    for (const auto& r : refs) {
        const SweepConfig c = full_sweep(r.m_rx);
        const BerPoint p = ber_point(c, published_table(r.m_rx), r.snr, idx++);
        const double rel = std::abs(p.ber - r.ber) / r.ber;
        o.require(rel <= r.tol && p.bits >= 2'000'000 && p.errors >= 200,
                  "m_rx=" + std::to_string(r.m_rx) + " " + num(r.snr) + "dB ber=" + num(p.ber, 4) +
                      " ref=" + num(r.ber, 4) + " rel=" + num(rel, 3));
    }
    return o;
}

Outcome ber_ordering()
{
    Outcome o;
    std::size_t idx = 0;
    for (double snr : {0.0, 4.0, 8.0, 12.0}) {
        double ber[4] = {};
        for (int m : {2, 3}) {
            SweepConfig c = full_sweep(m);
            c.min_bits = 1'000'000;
            const BerPoint p = ber_point(c, published_table(m), snr, idx++);
            ber[m] = p.ber;
        }
        o.require(ber[2] <= ber[3], num(snr) + "dB " + num(ber[2], 4) + "<=" + num(ber[3], 4));
    }
    return o;
}

Outcome psd_agreement()
{
    Outcome o;
    const auto g = published_table(3);
    std::mt19937_64 rng(20210607);
    const EmpiricalPsd psd = empirical_psd(g, 10'000, rng);
    double dev = 0.0;
    for (std::size_t i = 0; i < psd.freqs.size(); ++i)
        if (std::abs(psd.freqs[i]) <= 0.65) dev = std::max(dev, std::abs(psd.empirical_db[i] - psd.analytic_db[i]));
    o.require(dev <= 1.0, "max in-band deviation=" + num(dev, 3) + " dB");

    const auto ac = autocorrelation(build_machine(g));
    const double closed = ac.c0() * 3.0;
    const double numeric = numeric_power(psd);
    const double rel = std::abs(numeric - closed) / closed;
    o.require(rel <= 0.005, "numeric power=" + num(numeric) + " closed=" + num(closed) + " rel=" + num(rel, 3));
    return o;
}

Outcome optimizer_reproduction()
{
    Outcome o;
    DesignProblem problem;
    problem.params = ZxParams::for_oversampling(3);
    const auto t0 = std::chrono::steady_clock::now();
    const DesignSolution sol = solve(problem, SearchConfig{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sol.feasible, std::string(sol.feasible ? "feasible" : "infeasible") + " eta=" + num(sol.eta));
    o.require(sol.gamma >= 0.0999, "gamma=" + num(sol.gamma));
    o.require(secs <= 300.0, "runtime=" + num(secs, 3) + " s");
    return o;
}

Outcome noise_free_loopback()
{
    Outcome o;
    for (int m : {3, 2}) {
        SweepConfig c = SweepConfig::for_oversampling(m);
        c.noiseless = true;
        c.transmit.propagation = PropagationPath::Explicit;
        const std::uint64_t per_frame = 2ull * c.n_u * c.bits_per_rail;
        c.min_bits = c.max_bits = 10'000 * per_frame;
        c.min_errors = 100;
        const BerPoint p = ber_point(c, published_table(m), 0.0, 0);
        o.require(p.errors == 0 && p.frames >= 10'000,
                  "m_rx=" + std::to_string(m) + " frames=" + std::to_string(p.frames) +
                      " errors=" + std::to_string(p.errors));
    }
    return o;
}

Outcome detector_enumeration()
{
    Outcome o;
    for (int m : {3, 2}) {
        const auto t = oracle::table(m);
        const auto params = ZxParams::for_oversampling(m);
        int mismatches = 0;
        int blocks = 0;
        for (int rho : {1, -1}) {
            for (unsigned mask = 0; mask < (1u << t.q); ++mask) {
                SignVector block(t.q);
                for (int j = 0; j < t.q; ++j) block[j] = (mask >> j) & 1u ? -1 : 1;
                int best = -1, best_d = 1 << 30;
                bool valid = false;
                for (std::size_t r = 0; r < t.signs.size(); ++r) {
                    int d = 0;
                    for (int j = 0; j < t.q; ++j) d += block[j] != rho * t.signs[r][j];
                    valid = valid || d == 0;
                    if (d < best_d) {
                        best_d = d;
                        best = static_cast<int>(r);
                    }
                }
                const DetectionWindow w{polarity_of(rho), block};
                const auto a = detect_block(w, params);
                const auto b = detect_block(w, params);
                const bool ok = a.row == b.row && a.label == b.label && a.row == best &&
                                a.label == t.labels[best] && a.distance == best_d &&
                                (a.distance == 0) == valid;
                mismatches += !ok;
                ++blocks;
            }
        }
        o.require(mismatches == 0, "m_rx=" + std::to_string(m) + " blocks=" + std::to_string(blocks) +
                                       " mismatches=" + std::to_string(mismatches));
    }
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::map<std::string, std::function<Outcome()>> criteria{
        {"table-feasibility", table_feasibility},
        {"autocorrelation-oracle", autocorrelation_oracle},
        {"ber-reproduction", ber_reproduction},
        {"ber-ordering", ber_ordering},
        {"psd-agreement", psd_agreement},
        {"optimizer-reproduction", optimizer_reproduction},
        {"noise-free-loopback", noise_free_loopback},
        {"detector-enumeration", detector_enumeration},
    };
    if (argc != 2 || !criteria.count(argv[1])) {
        std::cerr << "usage: tizx_acceptance <criterion>\n";
        for (const auto& [name, fn] : criteria) std::cerr << "  " << name << "\n";
        return 2;
    }
    const std::string name = argv[1];
    try {
        Outcome o = criteria.at(name)();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail.str() << ")" << std::endl;
        return o.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cout << "FAIL " << name << " (exception: " << e.what() << ")" << std::endl;
        return 1;
    }
}
