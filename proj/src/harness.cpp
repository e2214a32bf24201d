#include "tizx/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include <fftw3.h>

#include "tizx/errors.hpp"

namespace tizx {

SweepConfig SweepConfig::for_oversampling(int m_rx)
{
    SweepConfig c;
    c.bits_per_rail = m_rx == 2 ? 45 : 60;
    if (m_rx != 2 && m_rx != 3)
        throw ConfigError("unsupported oversampling factor m_rx=" + std::to_string(m_rx));
    return c;
}

void SweepConfig::validate(const ZxParams& params) const
{
    if (n_u < 1 || n_t < n_u) throw ConfigError("need n_t >= n_u >= 1");
    if (bits_per_rail <= 0 || bits_per_rail % params.bits_per_block != 0)
        throw ConfigError("bits per rail (" + std::to_string(bits_per_rail) +
                          ") must be a positive multiple of " + std::to_string(params.bits_per_block));
    if (min_errors < 100) throw ConfigError("min_errors must be at least 100");
    if (max_bits < min_bits) throw ConfigError("max_bits is below min_bits");
    if (frames_per_batch < 1) throw ConfigError("frames_per_batch must be positive");
    if (!(t > 0.0 && f_c > 0.0 && energy_budget > 0.0))
        throw ConfigError("T, f_c and the energy budget must be positive");
}

std::size_t SweepConfig::samples_per_rail(const ZxParams& params) const
{
    return static_cast<std::size_t>(bits_per_rail / params.bits_per_block * params.q);
}

double SweepConfig::nyquist_intervals(const ZxParams& params) const
{
    return static_cast<double>(samples_per_rail(params)) / params.m_rx;
}

double SweepConfig::frame_energy(const ZxParams& params) const
{
    return 2.0 * static_cast<double>(samples_per_rail(params)) * energy_budget / params.m_coeff();
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z)
{
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

namespace {

Rng batch_rng(std::uint64_t master, std::size_t point, std::size_t batch)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(batch)};
    return Rng(seq);
}

void random_bits(Rng& rng, BitVector& bits)
{
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i % 64 == 0) word = rng();
        bits[i] = static_cast<std::uint8_t>(word & 1u);
        word >>= 1;
    }
}

struct Link {
    ZxParams params;
    std::size_t n_tot;
    double scale;
    NoiseSpec noise;
};

Link make_link(const SweepConfig& config, const CoefficientSet& coeffs, double snr_db)
{
    const ZxParams& params = coeffs.params();
    config.validate(params);
    Link link{params, config.samples_per_rail(params), 0.0, {}};
    const double e0 = config.frame_energy(params);
    const double c0 = coeffs.norm_sq() / params.m_coeff();
    link.scale = energy_scale(e0, link.n_tot, c0);
    if (!config.noiseless)
        link.noise = snr_to_n0(e0, snr_db, config.nyquist_intervals(params), config.t, config.f_c);
    return link;
}

struct BatchResult {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t frames = 0;
    std::size_t resamples = 0;
};

// Draws one frame: channel, user bits, encoding, transmission.
struct FrameDraw {
    std::vector<BitVector> bits;
    std::vector<ComplexFrame> tx;
    std::vector<ReceivedFrame> rx;
};

FrameDraw draw_frame(const SweepConfig& config, const CoefficientSet& coeffs, const Link& link,
                     Rng& rng, ChannelDiagnostics& diag, bool capture)
{
    FrameDraw f;
    const ChannelRealization ch = generate_channel(rng, config.n_u, config.n_t, &diag);
    f.bits.resize(config.n_u);
    f.tx.reserve(config.n_u);
    for (int u = 0; u < config.n_u; ++u) {
        f.bits[u].resize(2 * static_cast<std::size_t>(config.bits_per_rail));
        random_bits(rng, f.bits[u]);
        f.tx.push_back(encode_complex(f.bits[u], Polarity::Plus, Polarity::Plus, coeffs));
    }
    TransmitOptions opts = config.transmit;
    opts.capture = capture;
    f.rx = transmit_frame(f.tx, ch, link.noise, link.scale, rng, opts);
    return f;
}

BatchResult run_batch(const SweepConfig& config, const CoefficientSet& coeffs, const Link& link,
                      std::size_t point, std::size_t batch)
{
    Rng rng = batch_rng(config.master_seed, point, batch);
    ChannelDiagnostics diag;
    BatchResult r;
    for (int fr = 0; fr < config.frames_per_batch; ++fr) {
        const FrameDraw f = draw_frame(config, coeffs, link, rng, diag, false);
        for (int u = 0; u < config.n_u; ++u) {
            const BitVector det = detect_complex_frame(f.rx[u].re, f.rx[u].im, Polarity::Plus,
                                                       Polarity::Plus, link.params, config.chaining);
            for (std::size_t i = 0; i < det.size(); ++i) r.errors += det[i] != f.bits[u][i];
            r.bits += det.size();
        }
        ++r.frames;
    }
    r.resamples = diag.resampled;
    return r;
}

}  // namespace

BerPoint ber_point(const SweepConfig& config, const CoefficientSet& coeffs, double snr_db,
                   std::size_t point_index, std::size_t* channel_resamples)
{
    const auto start = std::chrono::steady_clock::now();
    const Link link = make_link(config, coeffs, snr_db);

    BerPoint p;
    p.snr_db = snr_db;
    auto done = [&] {
        return (p.bits >= config.min_bits && p.errors >= config.min_errors) || p.bits >= config.max_bits;
    };

    const std::size_t jobs = static_cast<std::size_t>(std::max(1, config.jobs));
    std::size_t next = 0;
    while (!done()) {
        std::vector<std::future<BatchResult>> pending;
        for (std::size_t j = 0; j < jobs; ++j, ++next)
            pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         run_batch, std::cref(config), std::cref(coeffs),
                                         std::cref(link), point_index, next));
        for (auto& fut : pending) {
            const BatchResult r = fut.get();
            if (done()) continue;  // keep results independent of jobs
            p.bits += r.bits;
            p.errors += r.errors;
            p.frames += r.frames;
            if (channel_resamples) *channel_resamples += r.resamples;
        }
    }
    p.ber = p.bits ? static_cast<double>(p.errors) / static_cast<double>(p.bits) : 0.0;
    const Interval ci = wilson_interval(p.errors, p.bits);
    p.ci_lo = ci.lo;
    p.ci_hi = ci.hi;
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return p;
}

BerCurve ber_sweep(const SweepConfig& config, const CoefficientSet& coeffs, const FeasibilityGuard& guard)
{
    config.validate(coeffs.params());
    if (guard.enforce) {
        DesignProblem problem;
        problem.params = coeffs.params();
        problem.energy_budget = config.energy_budget * (1.0 + 1e-3);
        problem.f_c = config.f_c;
        problem.eta_min = guard.eta_min;
        const Evaluation ev = evaluate(coeffs, problem);
        if (!ev.feasible) {
            std::ostringstream os;
            os << "coefficients are infeasible (eta=" << ev.eta << ", ||g||^2=" << ev.norm_sq
               << ", required eta>=" << guard.eta_min << ")";
            throw InfeasibleError(os.str());
        }
    }

    BerCurve curve;
    curve.m_rx = coeffs.params().m_rx;
    for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i)
        curve.points.push_back(ber_point(config, coeffs, config.snr_grid_db[i], i, &curve.channel_resamples));
    return curve;
}

std::string dump_pre_quantization(const SweepConfig& config, const CoefficientSet& coeffs,
                                  double snr_db, int frames)
{
    const Link link = make_link(config, coeffs, snr_db);
    Rng rng = batch_rng(config.master_seed, 0, 0);
    ChannelDiagnostics diag;
    std::ostringstream os;
    os.precision(10);
    os << "frame,user,n,re,im,sign_re,sign_im\n";
    for (int fr = 0; fr < frames; ++fr) {
        const FrameDraw f = draw_frame(config, coeffs, link, rng, diag, true);
        for (int u = 0; u < config.n_u; ++u)
            for (std::size_t n = 0; n < link.n_tot; ++n)
                os << fr << ',' << u << ',' << n << ',' << f.rx[u].pre_quantization[n].real() << ','
                   << f.rx[u].pre_quantization[n].imag() << ',' << int(f.rx[u].re[n]) << ','
                   << int(f.rx[u].im[n]) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

std::vector<double> averaged_periodogram(const std::vector<std::vector<std::complex<double>>>& frames)
{
    if (frames.empty()) throw InputError("no frames for the periodogram");
    const std::size_t n = frames.front().size();
    if (n == 0) throw InputError("empty frame");

    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);

    std::vector<double> acc(n, 0.0);
    for (const auto& f : frames) {
        if (f.size() != n) {
            fftw_destroy_plan(plan);
            fftw_free(in);
            fftw_free(out);
            throw InputError("frames have different lengths");
        }
        double power = 0.0;
        for (const auto& v : f) power += std::norm(v);
        power /= static_cast<double>(n);
        const double norm = power > 0.0 ? 1.0 / std::sqrt(power) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            in[i][0] = f[i].real() * norm;
            in[i][1] = f[i].imag() * norm;
        }
        fftw_execute(plan);
        for (std::size_t i = 0; i < n; ++i) acc[i] += out[i][0] * out[i][0] + out[i][1] * out[i][1];
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);

    // ascending bins k = -floor(n/2) .. n - 1 - floor(n/2)
    std::vector<double> shifted(n);
    const auto half = static_cast<long>(n / 2);
    const double scale = 1.0 / (static_cast<double>(frames.size()) * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const long k = static_cast<long>(i) - half;
        const auto idx = static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
        shifted[i] = acc[idx] * scale;
    }
    return shifted;
}

EmpiricalPsd empirical_psd(const CoefficientSet& coeffs, int n_frames, Rng& rng, int bits_per_rail)
{
    if (n_frames < 100) throw InputError("empirical PSD needs at least 100 frames");
    const ZxParams& params = coeffs.params();
    if (bits_per_rail == 0) bits_per_rail = SweepConfig::for_oversampling(params.m_rx).bits_per_rail;
    if (bits_per_rail < 0 || bits_per_rail % params.bits_per_block != 0)
        throw InputError("bits per rail must be a positive multiple of the block size");

    std::vector<std::vector<std::complex<double>>> frames(n_frames);
    BitVector bits(2 * static_cast<std::size_t>(bits_per_rail));
    double power = 0.0;
    std::size_t samples = 0;
    for (auto& x : frames) {
        random_bits(rng, bits);
        const ComplexFrame f = encode_complex(bits, Polarity::Plus, Polarity::Plus, coeffs);
        x.resize(f.re.coeffs.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = {f.re.coeffs[i], f.im.coeffs[i]};
            power += 0.5 * std::norm(x[i]);
        }
        samples += x.size();
    }

    EmpiricalPsd psd;
    psd.m_rx = params.m_rx;
    psd.frames = frames.size();
    psd.mean_sample_power = power / static_cast<double>(samples);
    psd.periodogram = averaged_periodogram(frames);

    const std::size_t n = psd.periodogram.size();
    const FilterSpec filter{params.m_rx};
    const Autocorrelation ac = autocorrelation(build_machine(coeffs));
    const auto half = static_cast<long>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(static_cast<long>(i) - half) * params.m_rx / static_cast<double>(n);
        const double env = filter.response_sq(f) / filter.width();
        psd.freqs.push_back(f);
        psd.empirical_db.push_back(10.0 * std::log10(psd.periodogram[i] * env));
        psd.analytic_db.push_back(10.0 * std::log10(transmit_psd(ac, filter, f) / ac.c0()));
    }
    return psd;
}

double numeric_power(const EmpiricalPsd& psd, int alias_terms, double t)
{
    const FilterSpec filter{psd.m_rx, t};
    const double n = static_cast<double>(psd.periodogram.size());
    const double span = psd.m_rx / t;
    double total = 0.0;
    for (std::size_t i = 0; i < psd.periodogram.size(); ++i) {
        const double px = span * psd.mean_sample_power * psd.periodogram[i];
        double g = 0.0;
        for (int k = -alias_terms; k <= alias_terms; ++k) g += filter.response_sq(psd.freqs[i] / t + k * span);
        total += (span / n) * px * g;
    }
    return total;
}

ContainmentReport containment_report(const CoefficientSet& coeffs, double f_c)
{
    const Autocorrelation ac = autocorrelation(build_machine(coeffs));
    const FilterSpec filter{coeffs.params().m_rx};
    ContainmentReport r;
    r.f_c = f_c;
    r.eta = containment(ac, filter, f_c);
    r.total_power = total_power(ac);
    r.inband_power = r.eta * r.total_power;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string ber_csv(const BerCurve& curve)
{
    std::string s = "snr_db,bits,errors,ber,ci_lo,ci_hi\n";
    for (const auto& p : curve.points)
        s += fmt(p.snr_db) + ',' + std::to_string(p.bits) + ',' + std::to_string(p.errors) + ',' +
             fmt(p.ber) + ',' + fmt(p.ci_lo) + ',' + fmt(p.ci_hi) + '\n';
    return s;
}

std::string psd_csv(const EmpiricalPsd& psd)
{
    std::string s = "f_T,analytic_db,empirical_db\n";
    for (std::size_t i = 0; i < psd.freqs.size(); ++i)
        s += fmt(psd.freqs[i]) + ',' + fmt(psd.analytic_db[i]) + ',' + fmt(psd.empirical_db[i]) + '\n';
    return s;
}

std::string analytic_psd_csv(const CoefficientSet& coeffs, double f_max, int points)
{
    const Autocorrelation ac = autocorrelation(build_machine(coeffs));
    const FilterSpec filter{coeffs.params().m_rx};
    const auto grid = symmetric_grid(f_max, points);
    const PsdCurve curve = analytic_psd(ac, filter, grid);
    const double peak = *std::max_element(curve.values.begin(), curve.values.end());
    const double floor = peak * 1e-30;  // spectral nulls sit exactly on the grid
    std::string s = "f_T,S_linear,S_norm_db\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = std::max(curve.values[i], 0.0);
        s += fmt(grid[i]) + ',' + fmt(v) + ',' + fmt(10.0 * std::log10(std::max(v, floor) / peak)) + '\n';
    }
    return s;
}

}  // namespace tizx
