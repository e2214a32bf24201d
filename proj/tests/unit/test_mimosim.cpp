#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tizx/errors.hpp"
#include "tizx/mimosim.hpp"
#include "tizx/tables.hpp"

using namespace tizx;

namespace {

std::vector<ComplexFrame> random_frames(Rng& rng, const CoefficientSet& g, int users, int bits_per_rail)
{
    std::vector<ComplexFrame> out;
    for (int u = 0; u < users; ++u) {
        BitVector bits(2 * bits_per_rail);
        for (auto& b : bits) b = rng() & 1u;
        out.push_back(encode_complex(bits, Polarity::Plus, Polarity::Plus, g));
    }
    return out;
}

}  // namespace

TEST_CASE("zero forcing on diagonal channels")
{
    auto ch = zero_forcing(Eigen::MatrixXcd::Identity(2, 2));
    CHECK(ch.c_zf == doctest::Approx(1.0));
    CHECK((ch.p_sp - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);

    ch = zero_forcing(2.0 * Eigen::MatrixXcd::Identity(2, 2));
    // tr((H H^H)^-1) = 2 * 1/4 = 0.5
    CHECK(ch.c_zf == doctest::Approx(2.0));
    CHECK((ch.p_sp - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
    CHECK((ch.h * ch.p_sp - 2.0 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("zero forcing errors")
{
    Eigen::MatrixXcd h(2, 3);
    h << 1, 2, 3, 2, 4, 6;  // rank one
    CHECK_THROWS_AS(zero_forcing(h), InputError);
    CHECK_THROWS_AS(zero_forcing(Eigen::MatrixXcd::Ones(3, 2)), InputError);
    Rng rng(1);
    CHECK_THROWS_AS(generate_channel(rng, 3, 2), InputError);
    CHECK_THROWS_AS(generate_channel(rng, 0, 2), InputError);
}

TEST_CASE("random channels: ZF identity and normalization")
{
    Rng rng(42);
    ChannelDiagnostics diag;
    double power = 0.0, re2 = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        const auto ch = generate_channel(rng, 2, 8, &diag);
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
        CHECK((ch.h * ch.p_sp - ch.c_zf * eye).norm() < 1e-10 * ch.c_zf);
        // c_zf^2 = N_u / tr((H H^H)^-1), with the 2x2 inverse trace in closed form
        const Eigen::Matrix2cd a = ch.h * ch.h.adjoint();
        const double tr_inv = (a(0, 0) + a(1, 1)).real() / (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
        CHECK(ch.c_zf * ch.c_zf == doctest::Approx(2.0 / tr_inv).epsilon(1e-10));
        power += ch.h.squaredNorm();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 8; ++c) re2 += ch.h(r, c).real() * ch.h(r, c).real();
    }
    CHECK(diag.resampled == 0);
    CHECK(power / (draws * 16.0) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(re2 / (draws * 16.0) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("SNR to noise density")
{
    const auto ns = snr_to_n0(1.0, 0.0, 20.0, 1.0, 0.65);
    CHECK(ns.n0 == doctest::Approx(1.0 / 26.0).epsilon(1e-14));
    CHECK(ns.per_sample_variance == ns.n0);
    CHECK(snr_to_n0(1.0, 300.0, 20.0, 1.0, 0.65).n0 < 1e-30);
    const double a = snr_to_n0(1.0, 7.0, 30.0, 1.0, 0.65).n0;
    const double b = snr_to_n0(2.0, 7.0 + 10.0 * std::log10(2.0), 30.0, 1.0, 0.65).n0;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(10.0 * std::log10(2.0) == doctest::Approx(3.0103).epsilon(1e-5));
    CHECK_THROWS_AS(snr_to_n0(0.0, 0.0, 20.0, 1.0, 0.65), InputError);
    CHECK_THROWS_AS(snr_to_n0(1.0, 0.0, 20.0, 1.0, -0.65), InputError);
}

TEST_CASE("one-bit quantizer")
{
    CHECK(one_bit_quantize(cdouble(0.3, -2.0)) == cdouble(1, -1));
    CHECK(one_bit_quantize(cdouble(-1e-300, 1e-300)) == cdouble(-1, 1));
    CHECK(one_bit_quantize(cdouble(0.0, 0.0)) == cdouble(1, 1));
    CHECK(one_bit_quantize(cdouble(-0.0, -0.0)) == cdouble(1, 1));
    Rng rng(2);
    std::vector<cdouble> x(1000);
    for (auto& v : x) v = complex_gaussian(rng, 1.0);
    const auto once = one_bit_quantize(x);
    CHECK(one_bit_quantize(once) == once);
    for (const auto& v : once) CHECK((std::abs(v.real()) == 1.0 && std::abs(v.imag()) == 1.0));
}

TEST_CASE("noiseless transmission returns the encoded signs")
{
    Rng rng(5);
    for (int m : {2, 3}) {
        const auto g = published_table(m);
        for (auto path : {PropagationPath::Collapsed, PropagationPath::Explicit}) {
            for (int trial = 0; trial < 50; ++trial) {
                const auto frames = random_frames(rng, g, 2, m == 3 ? 60 : 45);
                const auto ch = generate_channel(rng, 2, 8);
                TransmitOptions opts;
                opts.propagation = path;
                const auto rx = transmit_frame(frames, ch, NoiseSpec{}, 1.0, rng, opts);
                for (int u = 0; u < 2; ++u) {
                    CHECK(rx[u].re == frames[u].re.signs);
                    CHECK(rx[u].im == frames[u].im.signs);
                }
            }
        }
    }
}

TEST_CASE("explicit precoding has no inter-user interference")
{
    Rng rng(6);
    const auto g = published_table_mrx3();
    for (int trial = 0; trial < 100; ++trial) {
        const auto frames = random_frames(rng, g, 2, 60);
        const auto ch = generate_channel(rng, 2, 8);
        const auto y = propagate(frames, ch, 0.9, PropagationPath::Explicit);
        const auto z = propagate(frames, ch, 0.9, PropagationPath::Collapsed);
        CHECK((y - z).cwiseAbs().maxCoeff() < 1e-10 * z.cwiseAbs().maxCoeff());
        for (int u = 0; u < 2; ++u)
            CHECK(std::abs(z(u, 7) - cdouble(0.9 * ch.c_zf * frames[u].re.coeffs[7],
                                             0.9 * ch.c_zf * frames[u].im.coeffs[7])) < 1e-12);
    }
    const auto frames = random_frames(rng, g, 3, 60);
    CHECK_THROWS_AS(propagate(frames, generate_channel(rng, 2, 8), 1.0, PropagationPath::Collapsed), InputError);
    std::vector<ComplexFrame> mixed{random_frames(rng, g, 1, 60)[0], random_frames(rng, g, 1, 30)[0]};
    CHECK_THROWS_AS(propagate(mixed, generate_channel(rng, 2, 8), 1.0, PropagationPath::Collapsed), InputError);
}

TEST_CASE("frame energy matches E0")
{
    Rng rng(8);
    for (int m : {2, 3}) {
        const auto g = published_table(m);
        const auto p = g.params();
        const std::size_t n_tot = 30 * m;
        const double e0 = 2.0 * n_tot / p.m_coeff();
        const double scale = energy_scale(e0, n_tot, g.norm_sq() / p.m_coeff());
        double acc = 0.0;
        const int frames = 10000;
        for (int i = 0; i < frames; ++i) {
            const auto f = random_frames(rng, g, 1, m == 3 ? 60 : 45)[0];
            for (std::size_t n = 0; n < n_tot; ++n)
                acc += scale * scale * (f.re.coeffs[n] * f.re.coeffs[n] + f.im.coeffs[n] * f.im.coeffs[n]);
        }
        CHECK(acc / frames == doctest::Approx(e0).epsilon(0.01));
    }
    CHECK_THROWS_AS(energy_scale(0.0, 90, 0.1), InputError);
}

TEST_CASE("noise calibration")
{
    Rng rng(9);
    const auto g = published_table_mrx3();
    const double n0 = 0.37;
    double acc = 0.0, acc_re = 0.0;
    std::size_t count = 0;
    TransmitOptions opts;
    opts.capture = true;
    while (count < 1000000) {
        const auto frames = random_frames(rng, g, 2, 60);
        const auto ch = generate_channel(rng, 2, 8);
        const auto rx = transmit_frame(frames, ch, NoiseSpec{n0, n0}, 0.0, rng, opts);
        for (const auto& r : rx)
            for (const auto& w : r.pre_quantization) {
                acc += std::norm(w);
                acc_re += w.real() * w.real();
                ++count;
            }
    }
    CHECK(acc / count == doctest::Approx(n0).epsilon(0.01));
    CHECK(acc_re / count == doctest::Approx(n0 / 2).epsilon(0.01));
}

TEST_CASE("sign flip rate follows the Gaussian tail")
{
    // one user, H = I, every sample +gamma on both rails
    const auto p = ZxParams::for_oversampling(3);
    const double gamma = 0.1;
    const CoefficientSet g(p, Eigen::MatrixXd::Constant(4, 3, gamma));
    const auto frame = encode_complex(BitVector(120, 0), Polarity::Plus, Polarity::Plus, g);
    const std::vector<ComplexFrame> frames{frame};
    const auto ch = zero_forcing(Eigen::MatrixXcd::Identity(1, 1));
    const double n0 = 0.02;
    Rng rng(10);
    std::size_t flips = 0, total = 0;
    while (total < 1000000) {
        const auto rx = transmit_frame(frames, ch, NoiseSpec{n0, n0}, 1.0, rng);
        for (auto s : rx[0].re) flips += s < 0;
        total += rx[0].re.size();
    }
    const double expected = oracle::q_function(gamma * std::sqrt(2.0) / std::sqrt(n0));
    const double sigma = std::sqrt(expected * (1 - expected) / total);
    CHECK(std::abs(static_cast<double>(flips) / total - expected) < 5 * sigma);
}

TEST_CASE("users with orthogonal channels see independent errors")
{
    const auto p = ZxParams::for_oversampling(3);
    const CoefficientSet g(p, Eigen::MatrixXd::Constant(4, 3, 0.1));
    const auto frame = encode_complex(BitVector(120, 0), Polarity::Plus, Polarity::Plus, g);
    const std::vector<ComplexFrame> frames{frame, frame};
    const auto ch = zero_forcing(Eigen::MatrixXcd::Identity(2, 2));
    Rng rng(11);
    double s1 = 0, s2 = 0, s12 = 0;
    std::size_t n = 0;
    while (n < 1000000) {
        const auto rx = transmit_frame(frames, ch, NoiseSpec{0.02, 0.02}, 1.0, rng);
        for (std::size_t i = 0; i < rx[0].re.size(); ++i) {
            const double e1 = rx[0].re[i] < 0, e2 = rx[1].re[i] < 0;
            s1 += e1;
            s2 += e2;
            s12 += e1 * e2;
            ++n;
        }
    }
    const double p1 = s1 / n, p2 = s2 / n;
    const double cov = s12 / n - p1 * p2;
    const double sigma = std::sqrt(p1 * (1 - p1) * p2 * (1 - p2) / n);
    CHECK(std::abs(cov) < 3 * sigma);
}

TEST_CASE("filter-matrix noise path")
{
    const auto g_rx = rect_filter_matrix(90, 3);
    CHECK(g_rx.rows() == 90);
    CHECK(g_rx.cols() == 270);
    CHECK((g_rx * g_rx.transpose() - Eigen::MatrixXd::Identity(90, 90)).cwiseAbs().maxCoeff() < 1e-12);
    const auto g2 = rect_filter_matrix(60, 2);
    CHECK((g2 * g2.transpose() - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);

    Rng rng(12);
    const auto g = published_table_mrx3();
    TransmitOptions opts;
    opts.noise = NoisePath::ToeplitzOracle;
    opts.capture = true;
    double acc = 0.0;
    std::size_t count = 0;
    while (count < 200000) {
        const auto frames = random_frames(rng, g, 2, 60);
        const auto rx = transmit_frame(frames, generate_channel(rng, 2, 8), NoiseSpec{0.5, 0.5}, 0.0, rng, opts);
        for (const auto& r : rx)
            for (const auto& w : r.pre_quantization) {
                acc += std::norm(w);
                ++count;
            }
    }
    CHECK(acc / count == doctest::Approx(0.5).epsilon(0.02));
}
