#include "mnoma/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mnoma/kernels.hpp"

namespace mnoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<double> exp2_all(std::span<const double> q) {
    std::vector<double> p(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) p[k] = std::exp2(q[k]);
    return p;
}

}  // namespace

BoundCoefficients bound_coefficients(double sinr) {
    if (!(sinr > 0.0) || !std::isfinite(sinr)) {
        throw std::invalid_argument("bound_coefficients: SINR must be positive and finite");
    }
    BoundCoefficients b;
    b.alpha = sinr / (1.0 + sinr);
    b.beta = std::log2(1.0 + sinr) - b.alpha * std::log2(sinr);
    return b;
}

Surrogate::Surrogate(const Problem& problem, const std::vector<std::vector<double>>& x)
    : problem_(problem) {
    const auto& cfg = problem.cfg;
    if (problem.model != InterferenceModel::kSicOrdered) {
        throw std::invalid_argument("surrogate: only the SIC-ordered model is supported");
    }
    if (x.size() != cfg.num_users()) throw std::invalid_argument("surrogate: x has wrong user count");
    blocks_.resize(cfg.num_users());
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        auto& b = blocks_[i];
        b.begin = vars_.size();
        b.budget = cfg.users[i].power_budget;
        b.weight = 1.0 / cfg.numerology(i).n_sc;
        const auto& g = problem.channels.users[i].gain;
        if (x[i].size() != g.size()) throw std::invalid_argument("surrogate: x has wrong length");
        for (std::size_t n = 0; n < x[i].size(); ++n) {
            if (x[i][n] == 0.0) continue;
            if (!(g[n] > 0.0)) throw std::invalid_argument("surrogate: active subcarrier with zero gain");
            vars_.push_back({i, n});
            b.log2_gain.push_back(std::log2(g[n]));
        }
        b.end = vars_.size();
    }
    for (auto& b : blocks_) {
        const std::size_t rows = b.end - b.begin;
        const std::size_t cols = vars_.size() - b.end;
        b.coef = RowMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        if (rows == 0 || cols == 0) continue;
        const std::size_t victim = vars_[b.begin].user;
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& v = vars_[b.end + k];
            const auto& c = problem.table.coefficients(victim, v.user);
            for (std::size_t t = 0; t < rows; ++t) {
                b.coef(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
                    c(vars_[b.begin + t].subcarrier, v.subcarrier);
            }
        }
    }
    alpha_.assign(vars_.size(), 1.0);
    beta_.assign(vars_.size(), 0.0);
}

void Surrogate::interference(std::span<const double> p, std::size_t user, double* out) const {
    const auto& b = blocks_[user];
    const std::size_t rows = b.end - b.begin;
    std::fill(out, out + rows, problem_.cfg.noise_var);
    if (b.coef.cols() == 0) return;
    kernels::active().gemv_accumulate(b.coef.data(), rows, static_cast<std::size_t>(b.coef.cols()),
                                      static_cast<std::size_t>(b.coef.cols()), p.data() + b.end, out);
}

std::vector<double> Surrogate::true_sinr(std::span<const double> q) const {
    const auto p = exp2_all(q);
    std::vector<double> out(vars_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        interference(p, i, out.data() + b.begin);
        for (std::size_t t = b.begin; t < b.end; ++t) {
            out[t] = std::exp2(q[t] + b.log2_gain[t - b.begin]) / out[t];
        }
    }
    return out;
}

std::vector<double> Surrogate::true_user_rates(std::span<const double> q) const {
    const auto s = true_sinr(q);
    std::vector<double> rates(blocks_.size(), 0.0);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        for (std::size_t t = blocks_[i].begin; t < blocks_[i].end; ++t) {
            rates[i] += blocks_[i].weight * std::log2(1.0 + s[t]);
        }
    }
    return rates;
}

double Surrogate::true_objective(std::span<const double> q) const {
    double total = 0.0;
    for (double r : true_user_rates(q)) total += r;
    return total;
}

void Surrogate::set_expansion_point(std::span<const double> q) {
    const auto s = true_sinr(q);
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto c = bound_coefficients(s[t]);
        alpha_[t] = c.alpha;
        beta_[t] = c.beta;
    }
}

std::vector<double> Surrogate::user_rates(std::span<const double> q) const {
    const auto p = exp2_all(q);
    std::vector<double> rates(blocks_.size(), 0.0);
    std::vector<double> ipn;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        ipn.resize(b.end - b.begin);
        interference(p, i, ipn.data());
        for (std::size_t t = b.begin; t < b.end; ++t) {
            const double l2 = q[t] + b.log2_gain[t - b.begin] - std::log2(ipn[t - b.begin]);
            rates[i] += b.weight * (alpha_[t] * l2 + beta_[t]);
        }
    }
    return rates;
}

double Surrogate::objective(std::span<const double> q) const {
    double total = 0.0;
    for (double r : user_rates(q)) total += r;
    return total;
}

Surrogate::Derivatives Surrogate::derivatives(std::span<const double> q) const {
    const auto n = static_cast<Eigen::Index>(vars_.size());
    const auto p = exp2_all(q);
    Derivatives d;
    d.rates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks_.size()));
    d.gradient = Eigen::VectorXd::Zero(n);
    d.rate_gradients.assign(blocks_.size(), Eigen::VectorXd::Zero(n));
    Eigen::VectorXd ipn;
    Eigen::VectorXd r;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        const auto rows = static_cast<Eigen::Index>(b.end - b.begin);
        if (rows == 0) continue;
        ipn.resize(rows);
        interference(p, i, ipn.data());
        r.resize(rows);
        auto& g = d.rate_gradients[i];
        double rate = 0.0;
        for (Eigen::Index t = 0; t < rows; ++t) {
            const std::size_t v = b.begin + static_cast<std::size_t>(t);
            const double l2 = q[v] + b.log2_gain[static_cast<std::size_t>(t)] - std::log2(ipn[t]);
            rate += b.weight * (alpha_[v] * l2 + beta_[v]);
            g[static_cast<Eigen::Index>(v)] = b.weight * alpha_[v];
            r[t] = b.weight * alpha_[v] / ipn[t];
        }
        d.rates[static_cast<Eigen::Index>(i)] = rate;
        d.objective += rate;
        const auto cols = b.coef.cols();
        if (cols > 0) {
            const Eigen::Map<const Eigen::VectorXd> tail(p.data() + b.end, cols);
            g.tail(cols) = -(b.coef.transpose() * r).cwiseProduct(tail);
        }
        d.gradient += g;
    }
    return d;
}

void Surrogate::accumulate_neg_rate_hessian(std::span<const double> q, std::size_t user,
                                            double weight, Eigen::MatrixXd& h) const {
    const auto& b = blocks_[user];
    const auto rows = static_cast<Eigen::Index>(b.end - b.begin);
    const auto cols = b.coef.cols();
    if (rows == 0 || cols == 0 || weight == 0.0) return;
    std::vector<double> p(static_cast<std::size_t>(cols));
    for (Eigen::Index k = 0; k < cols; ++k) p[static_cast<std::size_t>(k)] = std::exp2(q[b.end + static_cast<std::size_t>(k)]);
    std::vector<double> full(vars_.size(), 0.0);
    std::copy(p.begin(), p.end(), full.begin() + static_cast<std::ptrdiff_t>(b.end));
    Eigen::VectorXd ipn(rows);
    interference(full, user, ipn.data());

    // pi(t, k) = c(t, k) p_k / I_t; -Hessian = ln2 sum_t w a_t (diag pi_t - pi_t pi_t^T).
    const Eigen::Map<const Eigen::RowVectorXd> pk(p.data(), cols);
    Eigen::VectorXd wa(rows);
    for (Eigen::Index t = 0; t < rows; ++t) wa[t] = b.weight * alpha_[b.begin + static_cast<std::size_t>(t)];
    Eigen::MatrixXd pi = (b.coef.array().rowwise() * pk.array()).colwise() / ipn.array();
    const Eigen::VectorXd diag = pi.transpose() * wa;
    const Eigen::MatrixXd u = pi.transpose() * wa.cwiseSqrt().asDiagonal();
    auto block = h.bottomRightCorner(cols, cols);
    block.diagonal() += (weight * kLn2) * diag;
    block.template selfadjointView<Eigen::Lower>().rankUpdate(u, -weight * kLn2);
}

Eigen::MatrixXd Surrogate::objective_hessian(std::span<const double> q) const {
    const auto n = static_cast<Eigen::Index>(vars_.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < blocks_.size(); ++i) accumulate_neg_rate_hessian(q, i, 1.0, h);
    Eigen::MatrixXd full = h.selfadjointView<Eigen::Lower>();
    return -full;
}

Allocation Surrogate::to_allocation(std::span<const double> q) const {
    Allocation a = Allocation::zeros(problem_.cfg);
    for (std::size_t t = 0; t < vars_.size(); ++t) {
        a.x[vars_[t].user][vars_[t].subcarrier] = 1.0;
        a.p[vars_[t].user][vars_[t].subcarrier] = std::exp2(q[t]);
    }
    return a;
}

namespace {

// Constraint values and derivatives of the subproblem at one point. The
// constraints are g_j(q) <= 0 with slack s_j = -g_j(q):
//   budget of user i: ln(sum_n 2^{q_n} / P_i)
//   rate of user i:   floor_i - h_i(q)
class Constraints {
public:
    Constraints(const Surrogate& s, std::span<const double> floors) : s_(s) {
        for (std::size_t i = 0; i < s.num_users(); ++i) {
            if (s.user_end(i) > s.user_begin(i)) budget_users_.push_back(i);
        }
        for (std::size_t i = 0; i < s.num_users(); ++i) {
            if (std::isfinite(floors[i]) && s.user_end(i) > s.user_begin(i)) {
                rate_users_.push_back(i);
                floors_.push_back(floors[i]);
            }
        }
    }

    std::size_t size() const { return budget_users_.size() + rate_users_.size(); }
    std::size_t budgets() const { return budget_users_.size(); }
    std::size_t budget_user(std::size_t k) const { return budget_users_[k]; }
    std::size_t rate_user(std::size_t k) const { return rate_users_[k]; }
    double floor(std::size_t k) const { return floors_[k]; }

    double power(std::span<const double> q, std::size_t user) const {
        double total = 0.0;
        for (std::size_t t = s_.user_begin(user); t < s_.user_end(user); ++t) total += std::exp2(q[t]);
        return total;
    }

    void values(std::span<const double> q, Eigen::VectorXd& out) const {
        out.resize(static_cast<Eigen::Index>(size()));
        Eigen::Index j = 0;
        for (std::size_t i : budget_users_) out[j++] = std::log(power(q, i) / s_.budget(i));
        if (rate_users_.empty()) return;
        const auto rates = s_.user_rates(q);
        for (std::size_t k = 0; k < rate_users_.size(); ++k) out[j++] = floors_[k] - rates[rate_users_[k]];
    }

    // Budget excess relative to P_i; rate shortfall relative to max(1, |floor|).
    double relative_violation(const Eigen::VectorXd& g) const {
        double worst = 0.0;
        for (std::size_t k = 0; k < budget_users_.size(); ++k) {
            worst = std::max(worst, std::expm1(g[static_cast<Eigen::Index>(k)]));
        }
        for (std::size_t k = 0; k < rate_users_.size(); ++k) {
            const double v = g[static_cast<Eigen::Index>(budget_users_.size() + k)];
            worst = std::max(worst, v / std::max(1.0, std::abs(floors_[k])));
        }
        return std::max(worst, 0.0);
    }

    // Gradients of g_j as dense columns.
    Eigen::MatrixXd jacobian(std::span<const double> q, const Surrogate::Derivatives& d) const {
        const auto n = static_cast<Eigen::Index>(s_.size());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(size()));
        Eigen::Index j = 0;
        for (std::size_t i : budget_users_) {
            const double total = power(q, i);
            for (std::size_t t = s_.user_begin(i); t < s_.user_end(i); ++t) {
                a(static_cast<Eigen::Index>(t), j) = kLn2 * std::exp2(q[t]) / total;
            }
            ++j;
        }
        for (std::size_t i : rate_users_) a.col(j++) = -d.rate_gradients[i];
        return a;
    }

private:
    const Surrogate& s_;
    std::vector<std::size_t> budget_users_;
    std::vector<std::size_t> rate_users_;
    std::vector<double> floors_;
};

// Solve m dx = rhs for the lower-triangular m, Jacobi scaled, with a
// growing ridge if the factorization fails. m is overwritten.
bool solve_spd(Eigen::MatrixXd& m, Eigen::LLT<Eigen::MatrixXd, Eigen::Lower>& llt, Eigen::VectorXd& scale) {
    const auto n = m.rows();
    scale.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double dk = m(k, k);
        scale[k] = dk > 0.0 ? 1.0 / std::sqrt(dk) : 1.0;
    }
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = c; r < n; ++r) m(r, c) *= scale[r] * scale[c];
    }
    double ridge = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        if (ridge > 0.0) m.diagonal().array() += ridge;
        llt.compute(m);
        if (llt.info() == Eigen::Success) return true;
        if (ridge > 0.0) m.diagonal().array() -= ridge;
        ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
    }
    return false;
}

// Largest step in (0, 1] keeping v + a * dv >= (1 - fraction) * v.
double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double fraction) {
    double a = 1.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (dv[k] < 0.0) a = std::min(a, -fraction * v[k] / dv[k]);
    }
    return a;
}

}  // namespace

SubproblemResult solve_subproblem(const Surrogate& surrogate, std::span<const double> q_start,
                                  std::span<const double> rate_floors, const SolverOptions& options) {
    if (q_start.size() != surrogate.size()) throw std::invalid_argument("subproblem: q_start has wrong length");
    if (rate_floors.size() != surrogate.num_users()) {
        throw std::invalid_argument("subproblem: rate_floors has wrong length");
    }
    SubproblemResult result;
    result.q.assign(q_start.begin(), q_start.end());
    result.start_objective = surrogate.objective(q_start);
    result.objective = result.start_objective;
    result.budget_duals.assign(surrogate.num_users(), 0.0);
    result.rate_duals.assign(surrogate.num_users(), 0.0);
    if (surrogate.size() == 0) {
        result.converged = true;
        return result;
    }

    const Constraints cons(surrogate, rate_floors);
    const auto n = static_cast<Eigen::Index>(surrogate.size());
    const auto m = static_cast<Eigen::Index>(cons.size());
    std::vector<double> q(q_start.begin(), q_start.end());
    Eigen::VectorXd g;
    cons.values(q, g);
    if (cons.relative_violation(g) > 1e-9) throw std::invalid_argument("subproblem: starting point is infeasible");

    // Infeasible-start slacks s (g + s -> 0) kept away from zero, duals from
    // a least-squares fit of the objective gradient on each budget block.
    Eigen::VectorXd s = (-g).cwiseMax(options.initial_slack);
    Eigen::VectorXd z(m);
    {
        const auto d = surrogate.derivatives(q);
        const Eigen::MatrixXd a = cons.jacobian(q, d);
        for (Eigen::Index j = 0; j < m; ++j) {
            double fit = 0.0;
            if (static_cast<std::size_t>(j) < cons.budgets()) {
                const double nn = a.col(j).squaredNorm();
                fit = nn > 0.0 ? a.col(j).dot(d.gradient) / nn : 0.0;
            }
            z[j] = std::max(fit, options.initial_slack);
        }
    }

    Eigen::MatrixXd mat(n, n);
    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(n);
    Eigen::VectorXd scale, rd, rp, rhs, dq_aff, dz_aff, ds_aff, dq, dz, ds;
    std::vector<double> weights(surrogate.num_users());
    for (;;) {
        const auto d = surrogate.derivatives(q);
        const Eigen::MatrixXd a = cons.jacobian(q, d);
        cons.values(q, g);
        rd = -d.gradient + a * z;
        rp = g + s;
        const double gap = s.dot(z);
        result.stationarity = rd.lpNorm<Eigen::Infinity>() / std::max(1.0, d.gradient.lpNorm<Eigen::Infinity>());
        result.primal_residual = cons.relative_violation(g);
        result.duality_gap = gap;
        if (result.stationarity <= options.stationarity_tolerance && gap <= options.gap_tolerance &&
            rp.lpNorm<Eigen::Infinity>() <= options.feasibility_tolerance) {
            result.converged = true;
            break;
        }
        if (result.newton_steps >= options.max_iterations) break;
        ++result.newton_steps;

        // -Hess f + sum_j z_j Hess g_j + sum_j (z_j / s_j) a_j a_j^T
        mat.setZero();
        std::fill(weights.begin(), weights.end(), 1.0);
        for (std::size_t k = 0; k + cons.budgets() < cons.size(); ++k) {
            weights[cons.rate_user(k)] += z[static_cast<Eigen::Index>(cons.budgets() + k)];
        }
        for (std::size_t i = 0; i < surrogate.num_users(); ++i) {
            surrogate.accumulate_neg_rate_hessian(q, i, weights[i], mat);
        }
        for (std::size_t k = 0; k < cons.budgets(); ++k) {
            const std::size_t i = cons.budget_user(k);
            const auto b = static_cast<Eigen::Index>(surrogate.user_begin(i));
            const auto len = static_cast<Eigen::Index>(surrogate.user_end(i)) - b;
            const auto j = static_cast<Eigen::Index>(k);
            // Hess g = ln2 diag(a) - a a^T on the block, a = ln2 sigma.
            const Eigen::VectorXd aj = a.col(j).segment(b, len);
            auto block = mat.block(b, b, len, len);
            block.diagonal() += (z[j] * kLn2) * aj;
            block.template selfadjointView<Eigen::Lower>().rankUpdate(aj, z[j] / s[j] - z[j]);
        }
        for (Eigen::Index j = static_cast<Eigen::Index>(cons.budgets()); j < m; ++j) {
            mat.selfadjointView<Eigen::Lower>().rankUpdate(a.col(j), z[j] / s[j]);
        }
        if (!solve_spd(mat, llt, scale)) break;
        // ds = -rp - a^T dq;  dz = (-rc - z ds) / s
        auto solve = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& out_q, Eigen::VectorXd& out_z,
                         Eigen::VectorXd& out_s) {
            rhs = -rd + a * (rc - z.cwiseProduct(rp)).cwiseQuotient(s);
            out_q = scale.cwiseProduct(llt.solve(scale.cwiseProduct(rhs)));
            out_s = -rp - a.transpose() * out_q;
            out_z = (-rc - z.cwiseProduct(out_s)).cwiseQuotient(s);
        };

        // Predictor, then Mehrotra corrector with centering sigma.
        const double mu = gap / static_cast<double>(m);
        solve(s.cwiseProduct(z), dq_aff, dz_aff, ds_aff);
        const double a_aff = std::min(step_to_boundary(s, ds_aff, 1.0), step_to_boundary(z, dz_aff, 1.0));
        const double mu_aff = (s + a_aff * ds_aff).dot(z + a_aff * dz_aff) / static_cast<double>(m);
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        const Eigen::VectorXd rc =
            (s.cwiseProduct(z) + ds_aff.cwiseProduct(dz_aff)).array() - sigma * mu;
        solve(rc, dq, dz, ds);
        if (!dq.allFinite() || !dz.allFinite() || !ds.allFinite()) break;

        // Backtrack on the norm of the centered KKT residual: the constraint
        // linearization can overshoot badly where the objective is flat.
        const double target = sigma * mu;
        auto merit = [&](std::span<const double> qt, const Eigen::VectorXd& st, const Eigen::VectorXd& zt) {
            const auto dt = surrogate.derivatives(qt);
            Eigen::VectorXd gt;
            cons.values(qt, gt);
            const double r1 = (-dt.gradient + cons.jacobian(qt, dt) * zt).squaredNorm();
            const double r2 = (gt + st).squaredNorm();
            const double r3 = (st.cwiseProduct(zt).array() - target).matrix().squaredNorm();
            return std::sqrt(r1 + r2 + r3);
        };
        const double merit0 = std::sqrt(rd.squaredNorm() + rp.squaredNorm() +
                                        (s.cwiseProduct(z).array() - target).matrix().squaredNorm());
        double step = std::min(step_to_boundary(s, ds, options.step_fraction),
                               step_to_boundary(z, dz, options.step_fraction));
        std::vector<double> q_trial(q.size());
        for (int halving = 0; halving < 30; ++halving) {
            for (std::size_t k = 0; k < q.size(); ++k) q_trial[k] = q[k] + step * dq[static_cast<Eigen::Index>(k)];
            const double mt = merit(q_trial, s + step * ds, z + step * dz);
            if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * step) * merit0) break;
            step *= 0.5;
        }
        for (std::size_t k = 0; k < q.size(); ++k) q[k] += step * dq[static_cast<Eigen::Index>(k)];
        s += step * ds;
        z += step * dz;
    }

    // Remove round-off budget excess.
    for (std::size_t k = 0; k < cons.budgets(); ++k) {
        const std::size_t i = cons.budget_user(k);
        const double excess = std::log2(cons.power(q, i) / surrogate.budget(i));
        if (excess > 0.0) {
            for (std::size_t t = surrogate.user_begin(i); t < surrogate.user_end(i); ++t) q[t] -= excess;
        }
    }
    cons.values(q, g);
    result.primal_residual = cons.relative_violation(g);

    for (std::size_t k = 0; k < cons.size(); ++k) {
        const auto j = static_cast<Eigen::Index>(k);
        if (k < cons.budgets()) {
            const std::size_t i = cons.budget_user(k);
            result.budget_duals[i] = z[j] / cons.power(q, i);
        } else {
            result.rate_duals[cons.rate_user(k - cons.budgets())] = z[j];
        }
    }
    const double obj = surrogate.objective(q);
    if (obj >= result.start_objective) {
        result.q = std::move(q);
        result.objective = obj;
    }
    return result;
}


Stage2Result sca_power_allocation(const Problem& problem, const Allocation& stage1, const ScaOptions& options) {
    const auto& cfg = problem.cfg;
    Surrogate surrogate(problem, stage1.x);
    Stage2Result result;
    result.rmin_relaxed_users.assign(cfg.num_users(), false);

    // Start point: p0 on the active sets, floored and pulled strictly inside
    // the budgets.
    std::vector<double> q(surrogate.size());
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        const std::size_t b = surrogate.user_begin(i);
        const std::size_t e = surrogate.user_end(i);
        const double budget = surrogate.budget(i);
        double total = 0.0;
        for (std::size_t t = b; t < e; ++t) {
            const auto& v = surrogate.vars()[t];
            q[t] = std::max(stage1.p[v.user][v.subcarrier], options.power_floor * budget);
            total += q[t];
        }
        const double cap = budget * (1.0 - 1e-12);
        const double shrink = total > cap ? cap / total : 1.0;
        for (std::size_t t = b; t < e; ++t) q[t] = std::log2(q[t] * shrink);
    }

    double previous = surrogate.true_objective(q);
    result.trace.push_back(previous);
    std::vector<double> floors(cfg.num_users());
    for (int it = 1; it <= options.max_iterations && surrogate.size() > 0; ++it) {
        surrogate.set_expansion_point(q);
        const auto rates = surrogate.true_user_rates(q);
        for (std::size_t i = 0; i < cfg.num_users(); ++i) {
            // A user below r_min keeps its current rate as the floor.
            const bool constrained = cfg.r_min > 0.0 && surrogate.user_end(i) > surrogate.user_begin(i);
            floors[i] = constrained ? std::min(cfg.r_min, rates[i] - options.rate_slack)
                                    : std::numeric_limits<double>::quiet_NaN();
        }
        const auto sub = solve_subproblem(surrogate, q, floors, options.solver);
        result.newton_steps += sub.newton_steps;
        result.max_stationarity = std::max(result.max_stationarity, sub.stationarity);
        result.max_primal_residual = std::max(result.max_primal_residual, sub.primal_residual);
        q = sub.q;
        const double current = surrogate.true_objective(q);
        result.trace.push_back(current);
        result.iterations = it;
        if (current - previous < options.epsilon) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    if (surrogate.size() == 0) result.converged = true;
    result.cap_hit = !result.converged;

    if (cfg.r_min > 0.0) {
        const auto final_rates = surrogate.true_user_rates(q);
        for (std::size_t i = 0; i < cfg.num_users(); ++i) {
            if (final_rates[i] < cfg.r_min) {
                result.rmin_relaxed_users[i] = true;
                result.rmin_infeasible = true;
            }
        }
    }
    result.alloc = surrogate.to_allocation(q);
    return result;
}

}  // namespace mnoma
