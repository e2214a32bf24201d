#pragma once

/**
 * @file optimizer.hpp
 * @brief Offline max-min waveform coefficient design.
 *
 *   maximize   gamma
 *   subject to g >= gamma (entrywise), ||g||^2 <= energy_budget,
 *              eta(g, f_c) >= eta_min
 *
 * Only the positive rows are searched; the negative set is -G.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tizx/zxmap.hpp"

namespace tizx {

struct DesignProblem {
    ZxParams params = ZxParams::for_oversampling(3);
    double energy_budget = 1.0;  // m E0 / (2 N_tot)
    double f_c = 0.65;
    double eta_min = 0.95;

    void validate() const;
};

struct Evaluation {
    double gamma = 0.0;
    double eta = 0.0;
    double norm_sq = 0.0;
    bool feasible = false;
};

/// Checks a candidate against the design constraints using the full
/// spectrum path (machine -> autocorrelation -> Simpson containment).
Evaluation evaluate(const CoefficientSet& candidate, const DesignProblem& problem);

/**
 * In-band power as a quadratic form: eta(g) = g^T A g / (kappa ||g||^2).
 * c_l is quadratic in g, so A is assembled once by polarization through
 * the regular spectrum path on the same Simpson grid.
 */
class ContainmentForm {
public:
    ContainmentForm(const ZxParams& params, double f_c);

    double eta(const Eigen::VectorXd& g) const;
    const Eigen::MatrixXd& matrix() const { return a_; }

private:
    double inband(const Eigen::VectorXd& g) const;

    ZxParams params_;
    double f_c_;
    std::vector<double> weights_;
    Eigen::MatrixXd a_;
    double kappa_ = 0.0;  // total power per unit ||g||^2
};

struct SearchConfig {
    int restarts = 64;
    double coarse_step = 0.01;
    double fine_step = 1e-4;
    double gamma_tolerance = 1e-5;
    int max_sweeps_per_step = 400;
    uint64_t seed = 20210607;
    int jobs = 1;
};

struct BisectionStep {
    double gamma;
    double best_eta;
    bool feasible;
};

struct SearchLog {
    std::size_t evaluations = 0;
    double bracket_lo = 0.0;   // largest gamma shown feasible
    double bracket_hi = 0.0;   // smallest gamma shown infeasible
    std::vector<BisectionStep> trace;
};

struct DesignSolution {
    std::optional<CoefficientSet> coeffs;  // absent only if no positive iterate exists
    double gamma = 0.0;
    double eta = 0.0;
    double norm_sq = 0.0;
    bool feasible = false;  // false: coeffs is the best infeasible iterate
    SearchLog log;
};

/**
 * gamma bisection with a multi-start projected coordinate ascent on eta as
 * the feasibility test. Deterministic for a fixed SearchConfig (restarts are
 * seeded by index and reduced in index order, whatever `jobs` is).
 */
DesignSolution solve(const DesignProblem& problem, const SearchConfig& search = {});

/// Best eta found over {g >= gamma, ||g||^2 = budget}; exposed for tests.
struct FeasibilityProbe {
    double eta = 0.0;
    Eigen::VectorXd g;
};
FeasibilityProbe probe_gamma(const ContainmentForm& form, const DesignProblem& problem,
                             double gamma, const SearchConfig& search,
                             const Eigen::VectorXd* warm_start = nullptr,
                             std::size_t* evaluations = nullptr);

struct TableReport {
    Evaluation evaluation;
    bool norm_ok = false;  // within 0.1% of the budget
    bool positive = false;
    bool containment_ok = false;
    double min_entry = 0.0;
};

TableReport verify_table(const DesignProblem& problem, const CoefficientSet& table);

}  // namespace tizx
