#pragma once

// Power optimization by successive convex approximation.
//
// On the active subcarriers fixed by Stage 1, log2(1 + L) is replaced by
// the minorant alpha * log2(L) + beta, tight at the current SINR. In the
// log-power variables q = log2(p) each surrogate rate
//     alpha * (q_n + log2 g_n - log2(sigma^2 + sum_k c_k 2^{q_k})) + beta
// is affine minus log-sum-exp, hence concave, and the budget
// sum_n 2^{q_n} <= P is convex. Each convex subproblem is solved with a
// primal-dual interior-point method.
//
// Objectives and rates in this module are spectral efficiencies (bps/Hz):
// the bps figure divided by the system bandwidth.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mnoma/rate.hpp"
#include "mnoma/stage1.hpp"

namespace mnoma {

struct BoundCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
};

// alpha = L / (1 + L), beta = log2(1 + L) - alpha * log2(L). Throws
// std::invalid_argument for L <= 0 or non-finite L.
BoundCoefficients bound_coefficients(double sinr);

// Surrogate sum rate over the active subcarriers of a SIC-ordered problem.
// Variables are laid out user by user in decoding order, so the interferers
// of user i occupy the contiguous tail starting at the first variable of
// user i + 1.
class Surrogate {
public:
    struct Var {
        std::size_t user = 0;
        std::size_t subcarrier = 0;
    };

    // Active set: x[i][n] != 0. Requires problem.model == kSicOrdered.
    Surrogate(const Problem& problem, const std::vector<std::vector<double>>& x);

    std::size_t size() const { return vars_.size(); }
    std::size_t num_users() const { return blocks_.size(); }
    const std::vector<Var>& vars() const { return vars_; }
    std::size_t user_begin(std::size_t user) const { return blocks_[user].begin; }
    std::size_t user_end(std::size_t user) const { return blocks_[user].end; }
    double budget(std::size_t user) const { return blocks_[user].budget; }

    // Expand the bound at the true SINR of 2^q.
    void set_expansion_point(std::span<const double> q);
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }

    // True SINR of every variable at powers 2^q.
    std::vector<double> true_sinr(std::span<const double> q) const;
    // True spectral efficiency of 2^q (full rate model, all users).
    double true_objective(std::span<const double> q) const;
    std::vector<double> true_user_rates(std::span<const double> q) const;

    // Surrogate objective and per-user surrogate rates at q.
    double objective(std::span<const double> q) const;
    std::vector<double> user_rates(std::span<const double> q) const;

    struct Derivatives {
        double objective = 0.0;
        Eigen::VectorXd rates;                  // per user
        Eigen::VectorXd gradient;               // of the objective
        std::vector<Eigen::VectorXd> rate_gradients;  // per user, full length
    };
    Derivatives derivatives(std::span<const double> q) const;

    // -Hessian of user i's surrogate rate scaled by `weight`, accumulated
    // into the lower triangle of `h`.
    void accumulate_neg_rate_hessian(std::span<const double> q, std::size_t user, double weight,
                                     Eigen::MatrixXd& h) const;

    // Full (symmetric) Hessian of the objective; for tests and diagnostics.
    Eigen::MatrixXd objective_hessian(std::span<const double> q) const;

    // p = 2^q scattered into a full allocation (x from the active set).
    Allocation to_allocation(std::span<const double> q) const;

private:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    struct UserBlock {
        std::size_t begin = 0;
        std::size_t end = 0;
        double budget = 0.0;
        double weight = 0.0;             // 1 / N_i
        std::vector<double> log2_gain;   // per active subcarrier
        RowMatrix coef;                  // (end - begin) x (size - end)
    };

    // Interference-plus-noise of user i's active subcarriers.
    void interference(std::span<const double> p, std::size_t user, double* out) const;

    Problem problem_;
    std::vector<Var> vars_;
    std::vector<UserBlock> blocks_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

// Infeasible-start primal-dual interior point with Mehrotra
// predictor-corrector steps and a backtracking search on the KKT residual.
struct SolverOptions {
    double gap_tolerance = 1e-10;          // s^T z, bps/Hz
    double stationarity_tolerance = 1e-9;  // ||grad L||_inf / max(1, ||grad f||_inf)
    double feasibility_tolerance = 1e-12;  // ||g + s||_inf
    double initial_slack = 1e-2;
    double step_fraction = 0.99;
    int max_iterations = 200;
};

struct SubproblemResult {
    std::vector<double> q;
    double objective = 0.0;
    double start_objective = 0.0;
    double stationarity = 0.0;     // ||grad L||_inf / max(1, ||grad f||_inf)
    double primal_residual = 0.0;  // max relative budget / rate violation
    double duality_gap = 0.0;      // s^T z
    std::vector<double> budget_duals;  // multipliers of sum 2^q <= P
    std::vector<double> rate_duals;    // multipliers of rate >= floor
    int newton_steps = 0;
    bool converged = false;
};

// Maximize the surrogate subject to per-user budgets and, for users with a
// finite entry in `rate_floors`, surrogate rate >= floor (bps/Hz). q_start
// must be feasible to 1e-9. Returns q_start unchanged if the solve would
// end below its objective.
SubproblemResult solve_subproblem(const Surrogate& surrogate, std::span<const double> q_start,
                                  std::span<const double> rate_floors,
                                  const SolverOptions& options = {});

struct ScaOptions {
    double epsilon = 1e-6;  // stop when SE(t) - SE(t-1) < epsilon, bps/Hz
    int max_iterations = 100;
    double power_floor = 1e-12;  // active powers >= power_floor * P_i
    double rate_slack = 1e-9;    // bps/Hz kept between a relaxed floor and the start rate
    SolverOptions solver;
};

struct Stage2Result {
    Allocation alloc;
    std::vector<double> trace;  // true SE after each outer iteration; [0] is the start
    int iterations = 0;
    bool converged = false;
    bool cap_hit = false;
    // Some user could not be brought to r_min from the start point; its
    // floor was held at its current rate instead.
    bool rmin_infeasible = false;
    std::vector<bool> rmin_relaxed_users;
    int newton_steps = 0;
    double max_stationarity = 0.0;
    double max_primal_residual = 0.0;
};

Stage2Result sca_power_allocation(const Problem& problem, const Allocation& stage1,
                                  const ScaOptions& options = {});

}  // namespace mnoma
