#pragma once

/**
 * @file spectrum.hpp
 * @brief Analytic second-order statistics of TI ZX mapped sequences.
 *
 * Block correlation R^k = Gamma^T Pi Q^|k| Gamma, average autocorrelation c_l,
 * PSD S(f) = S_x(f) |G_Tx(f)|^2 with a unit-energy rectangular transmit pulse
 * of width T/m_rx, and the in-band power fraction eta over [-f_c, f_c].
 *
 * All frequencies are in units of 1/T with T = 1.
 */

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tizx/zxmap.hpp"

namespace tizx {

Eigen::MatrixXd block_correlation(const MooreMachine& machine, int kappa);

struct Autocorrelation {
    std::vector<double> values;  // c_0 .. c_{L-1}; c_{-l} = c_l
    int q = 0;
    int m_rx = 0;
    double truncation_eps = 0.0;

    int lag_count() const { return static_cast<int>(values.size()); }
    double at(int lag) const;  // zero beyond the stored range, even in lag
    double c0() const { return values.front(); }
};

struct AutocorrelationOptions {
    double truncation_eps = 1e-10;
    int max_blocks = 64;
};

/// Lags 0..l_max inclusive, computed exactly with no truncation.
Autocorrelation autocorrelation(const MooreMachine& machine, int l_max);

/// Lags up to the first block count whose block correlation magnitude
/// drops below truncation_eps relative to the lag-0 block (capped at max_blocks blocks).
Autocorrelation autocorrelation(const MooreMachine& machine, AutocorrelationOptions opts = {});

/// Unit-energy rectangular pulse of width T/m_rx.
struct FilterSpec {
    int m_rx = 3;
    double t = 1.0;

    double width() const { return t / m_rx; }
    /// |G_Tx(f)|^2 = (T/m_rx) sinc^2(f T / m_rx)
    double response_sq(double f) const;
};

/// PSD of the sample sequence, S_x(f) = (m_rx/T) sum_l c_l cos(2 pi l f T / m_rx).
double sequence_psd(const Autocorrelation& ac, double f, double t = 1.0);

/// S(f) = S_x(f) |G_Tx(f)|^2.
double transmit_psd(const Autocorrelation& ac, const FilterSpec& filter, double f);

/// Closed form c_0 m_rx / T (pulse autocorrelation vanishes at nonzero lags).
double total_power(const Autocorrelation& ac, double t = 1.0);

/// Composite Simpson rule on a uniform grid with an odd number of samples.
double simpson(std::span<const double> samples, double step);

/// Integral of S(f) over [-f_max, f_max] by Simpson quadrature.
double integrated_power(const Autocorrelation& ac, const FilterSpec& filter, double f_max,
                        int intervals);

struct PsdCurve {
    std::vector<double> freqs;   // f T
    std::vector<double> values;  // S(f)
    double total_power = 0.0;
    double containment = 0.0;    // eta at f_c, if requested
    double f_c = 0.0;
};

/// Evaluates S(f) on a grid symmetric about zero. Pass f_c > 0 to fill in eta.
PsdCurve analytic_psd(const Autocorrelation& ac, const FilterSpec& filter,
                      std::span<const double> freq_grid, double f_c = 0.0);

/// Uniform grid of `points` frequencies over [-f_max, f_max].
std::vector<double> symmetric_grid(double f_max, int points);

inline constexpr int kContainmentIntervals = 4096;

/// eta = (1/P) * integral_{-f_c}^{f_c} S(f) df.
double containment(const Autocorrelation& ac, const FilterSpec& filter, double f_c,
                   int intervals = kContainmentIntervals);

/// Convenience: eta of a coefficient set with default truncation.
double containment(const CoefficientSet& coeffs, double f_c,
                   int intervals = kContainmentIntervals);

/**
 * Simpson weights w_l such that integral_{-f_c}^{f_c} S(f) df = sum_l w_l c_l
 * (w_0 for lag 0, w_l for the pair +-l). Lets callers treat in-band power as
 * a linear functional of the autocorrelation.
 */
std::vector<double> inband_lag_weights(const FilterSpec& filter, double f_c, int lags,
                                       int intervals = kContainmentIntervals);

}  // namespace tizx
