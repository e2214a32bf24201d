#pragma once

/**
 * @file mimosim.hpp
 * @brief Multiuser downlink with spatial zero-forcing and 1-bit receivers.
 *
 * Frequency-flat channel H (N_u x N_t), precoder P_sp = c_zf H^H (H H^H)^-1,
 * c_zf = sqrt(N_u / tr((H H^H)^-1)). With unit-energy rectangular transmit and
 * receive pulses of width T/m_rx the waveform matrix is the identity, so each
 * user sees c_zf * s_k[n] + w[n] before the sign quantizer.
 */

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tizx/zxmap.hpp"

namespace tizx {

using Rng = std::mt19937_64;
using cdouble = std::complex<double>;

struct ChannelRealization {
    Eigen::MatrixXcd h;     // N_u x N_t
    Eigen::MatrixXcd p_sp;  // N_t x N_u
    double c_zf = 0.0;
};

/// Condition number above which H H^H is treated as singular.
inline constexpr double kSingularCondition = 1e12;

/// Zero-forcing precoder for a given channel. Throws InputError when
/// H H^H is numerically singular.
ChannelRealization zero_forcing(const Eigen::MatrixXcd& h);

struct ChannelDiagnostics {
    std::size_t resampled = 0;
};

/// i.i.d. CN(0,1) entries; singular draws are redrawn and counted.
ChannelRealization generate_channel(Rng& rng, int n_u, int n_t, ChannelDiagnostics* diag = nullptr);

struct NoiseSpec {
    double n0 = 0.0;                   // noise power spectral density
    double per_sample_variance = 0.0;  // complex variance after the receive filter
};

/// SNR = E0 / (N T N0 2 f_c).
NoiseSpec snr_to_n0(double e0, double snr_db, double n_intervals, double t, double f_c);

/// Sign of real and imaginary parts; exact zero maps to +1.
cdouble one_bit_quantize(cdouble x);
std::vector<cdouble> one_bit_quantize(std::span<const cdouble> x);

struct ReceivedFrame {
    SignVector re;
    SignVector im;
    std::vector<cdouble> pre_quantization;  // filled only when capture is requested
};

enum class PropagationPath {
    Collapsed,  // H P_sp = c_zf I applied directly
    Explicit,   // precode onto N_t antennas, then apply H
};

enum class NoisePath {
    Direct,         // i.i.d. complex samples with variance N0
    ToeplitzOracle, // white noise on a 3 N_tot grid filtered by the G_Rx matrix
};

struct TransmitOptions {
    PropagationPath propagation = PropagationPath::Collapsed;
    NoisePath noise = NoisePath::Direct;
    bool capture = false;
};

/// Amplitude scale per rail so that E{||complex frame||^2} = e0, given the
/// mapped sequence's mean per-sample power c0.
double energy_scale(double e0, std::size_t n_tot, double c0);

/// Noiseless per-user samples after precoding and the channel, (H P_sp S)^T.
Eigen::MatrixXcd propagate(std::span<const ComplexFrame> frames, const ChannelRealization& ch,
                           double scale, PropagationPath path);

std::vector<ReceivedFrame> transmit_frame(std::span<const ComplexFrame> frames,
                                          const ChannelRealization& channel, const NoiseSpec& noise,
                                          double scale, Rng& rng, const TransmitOptions& opts = {});

/**
 * Discrete receive (or transmit) filter matrix, N_tot x 3 N_tot, for the
 * unit-energy rectangular pulse sampled on the T/m_rx grid. Row n carries the
 * pulse samples starting at column n; taps that fall past the last column are
 * dropped.
 */
Eigen::MatrixXd rect_filter_matrix(std::size_t n_tot, int m_rx, double t = 1.0);

/// Complex Gaussian with variance `variance` split evenly over I and Q.
cdouble complex_gaussian(Rng& rng, double variance);

}  // namespace tizx
