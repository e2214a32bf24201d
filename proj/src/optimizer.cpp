#include "tizx/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "tizx/errors.hpp"
#include "tizx/spectrum.hpp"

namespace tizx {

void DesignProblem::validate() const
{
    if (!(energy_budget > 0.0)) throw InputError("energy budget must be positive");
    if (!(eta_min >= 0.0 && eta_min < 1.0)) throw InputError("eta_min must lie in [0, 1)");
    if (!(f_c > 0.0)) throw InputError("critical frequency must be positive");
}

Evaluation evaluate(const CoefficientSet& candidate, const DesignProblem& problem)
{
    if (!(candidate.matrix().array() > 0.0).all())
        throw InputError("candidate coefficients must be strictly positive");
    if (!(candidate.params() == problem.params))
        throw InputError("candidate shape does not match the design problem");

    Evaluation ev;
    ev.gamma = candidate.min_entry();
    ev.norm_sq = candidate.norm_sq();
    ev.eta = containment(candidate, problem.f_c);
    ev.feasible = ev.norm_sq <= problem.energy_budget * (1.0 + 1e-12) && ev.eta >= problem.eta_min;
    return ev;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kFormBlocks = 64;

Eigen::MatrixXd unflatten(const ZxParams& params, const Eigen::VectorXd& g)
{
    Eigen::MatrixXd m(params.patterns, params.q);
    for (int i = 0; i < params.patterns; ++i)
        for (int j = 0; j < params.q; ++j) m(i, j) = g(i * params.q + j);
    return m;
}

}  // namespace

ContainmentForm::ContainmentForm(const ZxParams& params, double f_c)
    : params_(params), f_c_(f_c)
{
    const int lags = kFormBlocks * params.q;
    weights_ = inband_lag_weights(FilterSpec{params.m_rx}, f_c, lags);

    const int m = params.m_coeff();
    Eigen::VectorXd diag(m);
    for (int i = 0; i < m; ++i) diag(i) = inband(Eigen::VectorXd::Unit(m, i));

    a_.resize(m, m);
    for (int i = 0; i < m; ++i) {
        a_(i, i) = diag(i);
        for (int j = i + 1; j < m; ++j) {
            const Eigen::VectorXd e = Eigen::VectorXd::Unit(m, i) + Eigen::VectorXd::Unit(m, j);
            a_(i, j) = a_(j, i) = 0.5 * (inband(e) - diag(i) - diag(j));
        }
    }

    const auto ac = autocorrelation(build_machine(params, Eigen::MatrixXd::Ones(params.patterns, params.q)),
                                    params.q);
    kappa_ = total_power(ac) / m;
}

double ContainmentForm::inband(const Eigen::VectorXd& g) const
{
    const auto ac = autocorrelation(build_machine(params_, unflatten(params_, g)),
                                    static_cast<int>(weights_.size()) - 1);
    double acc = 0.0;
    for (std::size_t l = 0; l < weights_.size(); ++l) acc += weights_[l] * ac.values[l];
    return acc;
}

double ContainmentForm::eta(const Eigen::VectorXd& g) const
{
    return g.dot(a_ * g) / (kappa_ * g.squaredNorm());
}

// ---------------------------------------------------------------------------

namespace {

// Point on {g >= gamma, ||g||^2 = budget} along direction d >= 0: g = gamma + alpha d.
Eigen::VectorXd lift(const Eigen::VectorXd& d, double gamma, double budget)
{
    const double a = d.squaredNorm();
    const double b = 2.0 * gamma * d.sum();
    const double c = d.size() * gamma * gamma - budget;
    const double alpha = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
    return Eigen::VectorXd::Constant(d.size(), gamma) + alpha * d;
}

struct RestartResult {
    double eta = -1.0;
    Eigen::VectorXd g;
    std::size_t evaluations = 0;
};

RestartResult coordinate_ascent(const ContainmentForm& form, Eigen::VectorXd d, double gamma,
                                double budget, const SearchConfig& search)
{
    RestartResult r;
    if (d.norm() <= 0.0) d = Eigen::VectorXd::Ones(d.size());
    d /= d.norm();
    Eigen::VectorXd g = lift(d, gamma, budget);
    double best = form.eta(g);
    ++r.evaluations;

    for (double step = search.coarse_step; step >= search.fine_step * 0.999; step *= 0.5) {
        for (int sweep = 0; sweep < search.max_sweeps_per_step; ++sweep) {
            bool moved = false;
            for (int i = 0; i < d.size(); ++i) {
                for (double dir : {1.0, -1.0}) {
                    Eigen::VectorXd trial = d;
                    trial(i) = std::max(0.0, d(i) + dir * step);
                    if (trial(i) == d(i)) continue;
                    const double n = trial.norm();
                    if (n <= 0.0) continue;
                    trial /= n;
                    const Eigen::VectorXd gt = lift(trial, gamma, budget);
                    const double e = form.eta(gt);
                    ++r.evaluations;
                    if (e > best + 1e-15) {
                        best = e;
                        d = std::move(trial);
                        g = gt;
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) break;
        }
    }
    r.eta = best;
    r.g = std::move(g);
    return r;
}

Eigen::VectorXd random_direction(int m, uint64_t seed, int restart)
{
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd d(m);
    for (int i = 0; i < m; ++i) d(i) = u(rng);
    return d;
}

}  // namespace

FeasibilityProbe probe_gamma(const ContainmentForm& form, const DesignProblem& problem,
                             double gamma, const SearchConfig& search,
                             const Eigen::VectorXd* warm_start, std::size_t* evaluations)
{
    const int m = problem.params.m_coeff();
    if (m * gamma * gamma > problem.energy_budget * (1.0 + 1e-12))
        throw InputError("gamma is above the uniform point of the energy budget");

    // restart 0: warm start (or uniform), restart 1: dominant eigenvector, rest random
    std::vector<Eigen::VectorXd> starts;
    starts.reserve(search.restarts);
    if (warm_start)
        starts.push_back((warm_start->array() - gamma).cwiseMax(0.0).matrix());
    else
        starts.push_back(Eigen::VectorXd::Ones(m));
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form.matrix());
        starts.push_back(es.eigenvectors().col(m - 1).cwiseAbs());
    }
    for (int r = static_cast<int>(starts.size()); r < search.restarts; ++r)
        starts.push_back(random_direction(m, search.seed, r));

    std::vector<RestartResult> results(starts.size());
    const int jobs = std::max(1, search.jobs);
    for (std::size_t base = 0; base < starts.size(); base += jobs) {
        std::vector<std::future<RestartResult>> pending;
        for (std::size_t r = base; r < std::min(starts.size(), base + jobs); ++r) {
            pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         [&, r] {
                                             return coordinate_ascent(form, starts[r], gamma,
                                                                      problem.energy_budget, search);
                                         }));
        }
        for (std::size_t k = 0; k < pending.size(); ++k) results[base + k] = pending[k].get();
    }

    FeasibilityProbe best;
    best.eta = -1.0;
    for (auto& r : results) {
        if (evaluations) *evaluations += r.evaluations;
        if (r.eta > best.eta) {
            best.eta = r.eta;
            best.g = r.g;
        }
    }
    return best;
}

DesignSolution solve(const DesignProblem& problem, const SearchConfig& search)
{
    problem.validate();
    const ContainmentForm form(problem.params, problem.f_c);
    const int m = problem.params.m_coeff();
    const double gamma_max = std::sqrt(problem.energy_budget / m);
    // feasibility is decided on the quadratic form; keep a margin for the
    // round-off gap to the quadrature path used by evaluate()
    constexpr double kMargin = 1e-9;
    const double eta_needed = problem.eta_min + kMargin;

    DesignSolution sol;
    auto finish = [&](const Eigen::VectorXd& g) {
        CoefficientSet cs = CoefficientSet::from_flat(problem.params, g);
        const Evaluation ev = evaluate(cs, problem);
        sol.coeffs = std::move(cs);
        sol.gamma = ev.gamma;
        sol.eta = ev.eta;
        sol.norm_sq = ev.norm_sq;
        sol.feasible = ev.feasible;
        return sol;
    };

    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(m, gamma_max);
    const double uniform_eta = form.eta(uniform);
    ++sol.log.evaluations;
    sol.log.trace.push_back({gamma_max, uniform_eta, uniform_eta >= eta_needed});
    if (uniform_eta >= eta_needed) {
        sol.log.bracket_lo = sol.log.bracket_hi = gamma_max;
        return finish(uniform);
    }

    double lo = 1e-4 * gamma_max;
    double hi = gamma_max;
    FeasibilityProbe best = probe_gamma(form, problem, lo, search, nullptr, &sol.log.evaluations);
    sol.log.trace.push_back({lo, best.eta, best.eta >= eta_needed});
    if (best.eta < eta_needed) {
        sol.log.bracket_lo = 0.0;
        sol.log.bracket_hi = lo;
        return finish(best.g);
    }

    while (hi - lo > search.gamma_tolerance) {
        const double mid = 0.5 * (lo + hi);
        FeasibilityProbe p = probe_gamma(form, problem, mid, search, &best.g, &sol.log.evaluations);
        const bool ok = p.eta >= eta_needed;
        sol.log.trace.push_back({mid, p.eta, ok});
        if (ok) {
            lo = mid;
            best = std::move(p);
        } else {
            hi = mid;
        }
    }
    sol.log.bracket_lo = lo;
    sol.log.bracket_hi = hi;
    return finish(best.g);
}

TableReport verify_table(const DesignProblem& problem, const CoefficientSet& table)
{
    TableReport r;
    r.evaluation = evaluate(table, problem);
    r.min_entry = table.min_entry();
    r.positive = r.min_entry > 0.0;
    r.norm_ok = std::abs(r.evaluation.norm_sq - problem.energy_budget) <= 1e-3 * problem.energy_budget;
    r.containment_ok = r.evaluation.eta >= problem.eta_min;
    return r;
}

}  // namespace tizx
