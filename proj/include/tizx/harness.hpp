#pragma once

/**
 * @file harness.hpp
 * @brief Monte-Carlo BER sweeps and PSD estimation for the 1-bit ZF downlink.
 *
 * A frame carries I_b bits on each rail of every user; one channel is drawn per
 * frame. Work is split into fixed-size batches whose RNGs are seeded from
 * (master_seed, point, batch), and batches are reduced in index order, so the
 * counts do not depend on `jobs`.
 */

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tizx/detector.hpp"
#include "tizx/mimosim.hpp"
#include "tizx/optimizer.hpp"
#include "tizx/spectrum.hpp"
#include "tizx/zxmap.hpp"

namespace tizx {

struct SweepConfig {
    std::vector<double> snr_grid_db;
    int n_t = 8;
    int n_u = 2;
    int bits_per_rail = 60;  // I_b
    std::uint64_t min_bits = 2'000'000;
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 100'000'000;
    std::uint64_t master_seed = 1;
    int frames_per_batch = 128;
    int jobs = 1;
    double t = 1.0;
    double f_c = 0.65;
    double energy_budget = 1.0;  // m E0 / (2 N_tot)
    bool noiseless = false;
    PolarityChaining chaining = PolarityChaining::Raw;
    TransmitOptions transmit;

    /// Table defaults: I_b = 60 for m_rx = 3, 45 for m_rx = 2.
    static SweepConfig for_oversampling(int m_rx);

    /// Throws ConfigError; needs min_errors >= 100.
    void validate(const ZxParams& params) const;

    std::size_t samples_per_rail(const ZxParams& params) const;  // N_tot
    double nyquist_intervals(const ZxParams& params) const;     // N
    double frame_energy(const ZxParams& params) const;          // E0
};

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t frames = 0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double seconds = 0.0;
};

struct BerCurve {
    int m_rx = 3;
    std::vector<BerPoint> points;
    std::size_t channel_resamples = 0;
};

struct Interval {
    double lo;
    double hi;
};

/// 95% Wilson score interval.
Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

struct FeasibilityGuard {
    bool enforce = true;
    double eta_min = 0.95;
};

/// Throws InfeasibleError if the guard is enforced and the set fails the
/// design constraints (normalized to the sweep's energy budget).
BerCurve ber_sweep(const SweepConfig& config, const CoefficientSet& coeffs,
                   const FeasibilityGuard& guard = {});

/// One SNR point; `point_index` feeds the seed derivation.
BerPoint ber_point(const SweepConfig& config, const CoefficientSet& coeffs, double snr_db,
                   std::size_t point_index, std::size_t* channel_resamples = nullptr);

/// Pre-quantization samples of the first `frames` frames at one SNR as CSV
/// (frame, user, n, re, im, sign_re, sign_im).
std::string dump_pre_quantization(const SweepConfig& config, const CoefficientSet& coeffs,
                                  double snr_db, int frames);

struct EmpiricalPsd {
    int m_rx = 3;
    std::size_t frames = 0;
    std::vector<double> freqs;         // f T, ascending, -m_rx/2 .. m_rx/2 - step
    std::vector<double> periodogram;   // O_s^-1 E|F|^2 of unit-power frames
    std::vector<double> empirical_db;  // periodogram * sinc^2(f T / m_rx), dB
    std::vector<double> analytic_db;   // same normalization from c_l / c_0
    double mean_sample_power = 0.0;    // per rail, before normalization
};

/// Averaged |DFT|^2 / O_s of frames normalized to unit mean power, bins
/// shifted to ascending frequency. All frames must share a length.
std::vector<double> averaged_periodogram(const std::vector<std::vector<std::complex<double>>>& frames);

/// n_frames >= 100.
EmpiricalPsd empirical_psd(const CoefficientSet& coeffs, int n_frames, Rng& rng,
                           int bits_per_rail = 0);

/// Wide-band power of the empirical PSD: the periodogram is rescaled to the
/// measured sample power and integrated against |G_Tx(f)|^2 with `alias_terms`
/// spectral replicas on each side.
double numeric_power(const EmpiricalPsd& psd, int alias_terms = 2000, double t = 1.0);

struct ContainmentReport {
    double eta = 0.0;
    double total_power = 0.0;
    double inband_power = 0.0;
    double f_c = 0.0;
};

ContainmentReport containment_report(const CoefficientSet& coeffs, double f_c);

std::string ber_csv(const BerCurve& curve);
std::string psd_csv(const EmpiricalPsd& psd);

/// f_T, S_linear, S_norm_db over [-f_max, f_max].
std::string analytic_psd_csv(const CoefficientSet& coeffs, double f_max = 3.0, int points = 8192);

}  // namespace tizx
