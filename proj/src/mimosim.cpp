#include "tizx/mimosim.hpp"

#include <cmath>

#include "tizx/errors.hpp"

namespace tizx {

ChannelRealization zero_forcing(const Eigen::MatrixXcd& h)
{
    if (h.rows() > h.cols()) throw InputError("zero forcing needs n_t >= n_u");
    const Eigen::MatrixXcd gram = h * h.adjoint();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > kSingularCondition)
        throw InputError("channel Gram matrix is numerically singular");

    const Eigen::MatrixXcd inv = gram.inverse();
    ChannelRealization ch;
    ch.h = h;
    ch.c_zf = std::sqrt(static_cast<double>(h.rows()) / inv.trace().real());
    ch.p_sp = ch.c_zf * h.adjoint() * inv;
    return ch;
}

cdouble complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

ChannelRealization generate_channel(Rng& rng, int n_u, int n_t, ChannelDiagnostics* diag)
{
    if (n_u < 1 || n_t < n_u) throw InputError("need n_t >= n_u >= 1");
    for (;;) {
        Eigen::MatrixXcd h(n_u, n_t);
        for (int i = 0; i < n_u; ++i)
            for (int j = 0; j < n_t; ++j) h(i, j) = complex_gaussian(rng, 1.0);
        try {
            return zero_forcing(h);
        } catch (const InputError&) {
            if (diag) ++diag->resampled;
        }
    }
}

NoiseSpec snr_to_n0(double e0, double snr_db, double n_intervals, double t, double f_c)
{
    if (!(e0 > 0 && n_intervals > 0 && t > 0 && f_c > 0))
        throw InputError("SNR conversion needs positive E0, N, T and f_c");
    NoiseSpec ns;
    ns.n0 = e0 / (n_intervals * t * 2.0 * f_c * std::pow(10.0, snr_db / 10.0));
    ns.per_sample_variance = ns.n0;
    return ns;
}

cdouble one_bit_quantize(cdouble x)
{
    return {x.real() < 0.0 ? -1.0 : 1.0, x.imag() < 0.0 ? -1.0 : 1.0};
}

std::vector<cdouble> one_bit_quantize(std::span<const cdouble> x)
{
    std::vector<cdouble> out;
    out.reserve(x.size());
    for (const auto& v : x) out.push_back(one_bit_quantize(v));
    return out;
}

double energy_scale(double e0, std::size_t n_tot, double c0)
{
    if (!(e0 > 0 && c0 > 0 && n_tot > 0)) throw InputError("energy scaling needs positive inputs");
    return std::sqrt(e0 / (2.0 * static_cast<double>(n_tot) * c0));
}

namespace {

std::size_t frame_length(std::span<const ComplexFrame> frames)
{
    if (frames.empty()) throw InputError("no user frames");
    const std::size_t n = frames.front().re.coeffs.size();
    for (const auto& f : frames)
        if (f.re.coeffs.size() != n || f.im.coeffs.size() != n)
            throw InputError("user frames have different lengths");
    return n;
}

}  // namespace

Eigen::MatrixXcd propagate(std::span<const ComplexFrame> frames, const ChannelRealization& ch,
                           double scale, PropagationPath path)
{
    const std::size_t n_tot = frame_length(frames);
    const auto n_u = static_cast<Eigen::Index>(frames.size());
    if (ch.h.rows() != n_u) throw InputError("channel has " + std::to_string(ch.h.rows()) +
                                             " users but " + std::to_string(n_u) + " frames were given");

    Eigen::MatrixXcd s(n_u, static_cast<Eigen::Index>(n_tot));
    for (Eigen::Index k = 0; k < n_u; ++k)
        for (std::size_t n = 0; n < n_tot; ++n)
            s(k, n) = scale * cdouble(frames[k].re.coeffs[n], frames[k].im.coeffs[n]);

    if (path == PropagationPath::Collapsed) return ch.c_zf * s;
    const Eigen::MatrixXcd x = ch.p_sp * s;  // per-antenna transmit samples
    return ch.h * x;
}

Eigen::MatrixXd rect_filter_matrix(std::size_t n_tot, int m_rx, double t)
{
    const double dt = t / m_rx;
    const double a = std::sqrt(dt);
    const double height = std::sqrt(1.0 / dt);
    const std::size_t taps = 2 * n_tot + 3;  // t from -(N_tot+1) dt to +(N_tot+1) dt
    const auto cols = static_cast<Eigen::Index>(3 * n_tot);

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_tot), cols);
    for (std::size_t k = 0; k < taps; ++k) {
        const double x = static_cast<double>(k) - static_cast<double>(n_tot + 1);  // t / dt
        double rect = 0.0;
        if (std::abs(x) < 0.5) rect = 1.0;
        else if (std::abs(x) == 0.5) rect = 0.5;
        if (rect == 0.0) continue;
        for (std::size_t n = 0; n < n_tot; ++n) {
            const std::size_t col = n + k;
            if (col < static_cast<std::size_t>(cols)) g(n, col) = a * height * rect;
        }
    }
    return g;
}

std::vector<ReceivedFrame> transmit_frame(std::span<const ComplexFrame> frames,
                                          const ChannelRealization& channel, const NoiseSpec& noise,
                                          double scale, Rng& rng, const TransmitOptions& opts)
{
    const Eigen::MatrixXcd clean = propagate(frames, channel, scale, opts.propagation);
    const auto n_tot = static_cast<std::size_t>(clean.cols());
    const double var = noise.per_sample_variance;

    Eigen::MatrixXd g_rx;
    if (opts.noise == NoisePath::ToeplitzOracle) g_rx = rect_filter_matrix(n_tot, frames[0].re.m_rx);

    std::vector<ReceivedFrame> out(frames.size());
    Eigen::VectorXcd wide;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        auto& rx = out[k];
        rx.re.resize(n_tot);
        rx.im.resize(n_tot);
        if (opts.capture) rx.pre_quantization.resize(n_tot);

        Eigen::VectorXcd w(static_cast<Eigen::Index>(n_tot));
        if (var > 0.0) {
            if (opts.noise == NoisePath::ToeplitzOracle) {
                wide.resize(static_cast<Eigen::Index>(3 * n_tot));
                for (auto& v : wide) v = complex_gaussian(rng, var);
                w = g_rx.cast<cdouble>() * wide;
            } else {
                for (auto& v : w) v = complex_gaussian(rng, var);
            }
        } else {
            w.setZero();
        }

        for (std::size_t n = 0; n < n_tot; ++n) {
            const cdouble y = clean(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) +
                              w(static_cast<Eigen::Index>(n));
            const cdouble z = one_bit_quantize(y);
            rx.re[n] = static_cast<int8_t>(z.real());
            rx.im[n] = static_cast<int8_t>(z.imag());
            if (opts.capture) rx.pre_quantization[n] = y;
        }
    }
    return out;
}

}  // namespace tizx
