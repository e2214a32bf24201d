#include "tizx/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "tizx/errors.hpp"

namespace tizx {

namespace {

double sinc(double x)
{
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Accumulates c_l for one block lag k from R^k and R^{k+1}.
void append_block_lags(const Eigen::MatrixXd& rk, const Eigen::MatrixXd& rk1, int q,
                       std::vector<double>& out, std::size_t limit)
{
    for (int l = 0; l < q && out.size() < limit; ++l) {
        double acc = 0.0;
        for (int i = 0; i < q - l; ++i) acc += rk(i, l + i);
        for (int i = q - l; i < q; ++i) acc += rk1(i, l + i - q);
        out.push_back(acc / q);
    }
}

// Iterates Q^k Gamma so each block correlation costs one n_s x n_s x q product.
class BlockCorrelationSequence {
public:
    explicit BlockCorrelationSequence(const MooreMachine& mm)
        : left_(mm.gamma.transpose() * mm.pi.asDiagonal()), q_(mm.q_matrix), power_gamma_(mm.gamma)
    {
    }

    Eigen::MatrixXd current() const { return left_ * power_gamma_; }
    void advance() { power_gamma_ = q_ * power_gamma_; }

private:
    Eigen::MatrixXd left_;
    const Eigen::MatrixXd& q_;
    Eigen::MatrixXd power_gamma_;
};

}  // namespace

Eigen::MatrixXd block_correlation(const MooreMachine& machine, int kappa)
{
    BlockCorrelationSequence seq(machine);
    for (int k = 0; k < std::abs(kappa); ++k) seq.advance();
    return seq.current();
}

double Autocorrelation::at(int lag) const
{
    const auto l = static_cast<std::size_t>(std::abs(lag));
    return l < values.size() ? values[l] : 0.0;
}

Autocorrelation autocorrelation(const MooreMachine& machine, int l_max)
{
    const int q = machine.params.q;
    if (l_max < q) throw InputError("l_max must be at least q");

    Autocorrelation ac;
    ac.q = q;
    ac.m_rx = machine.params.m_rx;
    ac.values.reserve(l_max + 1);

    BlockCorrelationSequence seq(machine);
    Eigen::MatrixXd rk = seq.current();
    const auto limit = static_cast<std::size_t>(l_max) + 1;
    while (ac.values.size() < limit) {
        seq.advance();
        Eigen::MatrixXd rk1 = seq.current();
        append_block_lags(rk, rk1, q, ac.values, limit);
        rk = std::move(rk1);
    }
    return ac;
}

Autocorrelation autocorrelation(const MooreMachine& machine, AutocorrelationOptions opts)
{
    const int q = machine.params.q;
    Autocorrelation ac;
    ac.q = q;
    ac.m_rx = machine.params.m_rx;
    ac.truncation_eps = opts.truncation_eps;

    BlockCorrelationSequence seq(machine);
    Eigen::MatrixXd rk = seq.current();
    const double threshold = opts.truncation_eps * rk.cwiseAbs().maxCoeff();
    for (int k = 0; k < opts.max_blocks; ++k) {
        seq.advance();
        Eigen::MatrixXd rk1 = seq.current();
        append_block_lags(rk, rk1, q, ac.values, ac.values.size() + q);
        if (rk1.cwiseAbs().maxCoeff() < threshold) break;
        rk = std::move(rk1);
    }
    return ac;
}

double FilterSpec::response_sq(double f) const
{
    const double s = sinc(f * width());
    return width() * s * s;
}

double sequence_psd(const Autocorrelation& ac, double f, double t)
{
    const double theta = 2.0 * std::numbers::pi * f * t / ac.m_rx;
    // cos(l theta) by the Chebyshev recurrence
    const double c1 = std::cos(theta);
    double prev = 1.0, cur = c1;
    double acc = ac.values[0];
    for (int l = 1; l < ac.lag_count(); ++l) {
        acc += 2.0 * ac.values[l] * cur;
        const double next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
    }
    return acc * ac.m_rx / t;
}

double transmit_psd(const Autocorrelation& ac, const FilterSpec& filter, double f)
{
    return sequence_psd(ac, f, filter.t) * filter.response_sq(f);
}

double total_power(const Autocorrelation& ac, double t)
{
    return ac.c0() * ac.m_rx / t;
}

double simpson(std::span<const double> samples, double step)
{
    const std::size_t n = samples.size();
    if (n < 3 || n % 2 == 0) throw InputError("Simpson rule needs an odd number (>= 3) of samples");
    double acc = samples[0] + samples[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * samples[i];
    return acc * step / 3.0;
}

double integrated_power(const Autocorrelation& ac, const FilterSpec& filter, double f_max,
                        int intervals)
{
    if (intervals < 2 || intervals % 2) throw InputError("interval count must be even");
    const double h = 2.0 * f_max / intervals;
    std::vector<double> s(intervals + 1);
    for (int i = 0; i <= intervals; ++i) s[i] = transmit_psd(ac, filter, -f_max + i * h);
    return simpson(s, h);
}

std::vector<double> symmetric_grid(double f_max, int points)
{
    if (points < 2) throw InputError("grid needs at least two points");
    std::vector<double> f(points);
    for (int i = 0; i < points; ++i) {
        // mirror explicitly so the grid is exactly symmetric
        const int j = points - 1 - i;
        f[i] = i <= j ? -f_max + 2.0 * f_max * i / (points - 1) : -f[j];
    }
    return f;
}

PsdCurve analytic_psd(const Autocorrelation& ac, const FilterSpec& filter,
                      std::span<const double> freq_grid, double f_c)
{
    const std::size_t n = freq_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = freq_grid[i], b = freq_grid[n - 1 - i];
        if (std::abs(a + b) > 1e-9 * std::max(1.0, std::abs(a)))
            throw InputError("frequency grid is not symmetric about zero");
    }
    PsdCurve curve;
    curve.freqs.assign(freq_grid.begin(), freq_grid.end());
    curve.values.reserve(n);
    for (double f : freq_grid) curve.values.push_back(transmit_psd(ac, filter, f));
    curve.total_power = total_power(ac, filter.t);
    if (f_c > 0.0) {
        curve.f_c = f_c;
        curve.containment = containment(ac, filter, f_c);
    }
    return curve;
}

double containment(const Autocorrelation& ac, const FilterSpec& filter, double f_c, int intervals)
{
    if (!(f_c > 0.0)) throw InputError("critical frequency must be positive");
    return integrated_power(ac, filter, f_c, intervals) / total_power(ac, filter.t);
}

double containment(const CoefficientSet& coeffs, double f_c, int intervals)
{
    const auto ac = autocorrelation(build_machine(coeffs));
    return containment(ac, FilterSpec{coeffs.params().m_rx}, f_c, intervals);
}

std::vector<double> inband_lag_weights(const FilterSpec& filter, double f_c, int lags, int intervals)
{
    if (!(f_c > 0.0)) throw InputError("critical frequency must be positive");
    if (intervals < 2 || intervals % 2) throw InputError("interval count must be even");
    const double h = 2.0 * f_c / intervals;
    std::vector<double> w(lags, 0.0);
    for (int i = 0; i <= intervals; ++i) {
        const double f = -f_c + i * h;
        const double simpson_w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        // S(f) = |G|^2 (m/T) (c_0 + 2 sum c_l cos(...))
        const double base = simpson_w * h / 3.0 * filter.response_sq(f) * filter.m_rx / filter.t;
        const double theta = 2.0 * std::numbers::pi * f * filter.t / filter.m_rx;
        for (int l = 0; l < lags; ++l)
            w[l] += base * (l == 0 ? 1.0 : 2.0 * std::cos(l * theta));
    }
    return w;
}

}  // namespace tizx
