#include "mnoma/rate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mnoma/kernels.hpp"

namespace mnoma {

Allocation Allocation::zeros(const SystemConfig& cfg) {
    Allocation a;
    for (const auto& u : cfg.users) {
        a.x.emplace_back(static_cast<std::size_t>(u.numerology.n_sc), 0.0);
        a.p.emplace_back(static_cast<std::size_t>(u.numerology.n_sc), 0.0);
    }
    return a;
}

Allocation Allocation::all_assigned(const SystemConfig& cfg) {
    Allocation a = zeros(cfg);
    for (auto& xi : a.x) std::fill(xi.begin(), xi.end(), 1.0);
    return a;
}

void check_allocation(const Allocation& alloc, const SystemConfig& cfg, double budget_tol) {
    if (alloc.x.size() != cfg.num_users() || alloc.p.size() != cfg.num_users()) {
        throw std::invalid_argument("allocation: wrong user count");
    }
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        const auto n = static_cast<std::size_t>(cfg.numerology(i).n_sc);
        if (alloc.x[i].size() != n || alloc.p[i].size() != n) {
            throw std::invalid_argument("allocation: wrong length for user " + std::to_string(i));
        }
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = alloc.x[i][k];
            const double p = alloc.p[i][k];
            if (x != 0.0 && x != 1.0) throw std::invalid_argument("allocation: x not binary");
            if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("allocation: bad power");
            if (p > 0.0 && x == 0.0) throw std::invalid_argument("allocation: power on unassigned subcarrier");
            total += p;
        }
        if (total > cfg.users[i].power_budget * (1.0 + budget_tol)) {
            throw std::invalid_argument("allocation: budget exceeded for user " + std::to_string(i));
        }
    }
}

std::vector<double> interference_plus_noise(const Problem& problem, const Allocation& alloc,
                                            std::size_t user) {
    const auto& cfg = problem.cfg;
    std::vector<double> out(static_cast<std::size_t>(cfg.numerology(user).n_sc), cfg.noise_var);
    std::vector<double> xp;
    for (std::size_t j = 0; j < cfg.num_users(); ++j) {
        if (!problem.interferes(user, j)) continue;
        xp.resize(alloc.p[j].size());
        kernels::active().multiply(alloc.x[j].data(), alloc.p[j].data(), xp.size(), xp.data());
        problem.table.coefficients(user, j).accumulate(xp, out);
    }
    return out;
}

double sinr(const Problem& problem, const Allocation& alloc, std::size_t user, std::size_t n) {
    const double signal = alloc.x[user][n] * alloc.p[user][n];
    if (signal == 0.0) return 0.0;
    const auto ipn = interference_plus_noise(problem, alloc, user);
    return signal * problem.channels.users[user].gain[n] / ipn[n];
}

double subcarrier_rate(double sinr_value, double bandwidth_hz, int n_sc) {
    return bandwidth_hz / n_sc * std::log2(1.0 + sinr_value);
}

double rate_per_subcarrier(const Problem& problem, const Allocation& alloc, std::size_t user,
                           std::size_t n) {
    return subcarrier_rate(sinr(problem, alloc, user, n), problem.cfg.bandwidth_hz,
                           problem.cfg.numerology(user).n_sc);
}

RateReport sum_rate(const Problem& problem, const Allocation& alloc) {
    const auto& cfg = problem.cfg;
    RateReport r;
    r.per_subcarrier.resize(cfg.num_users());
    r.per_user.assign(cfg.num_users(), 0.0);
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        const int n_sc = cfg.numerology(i).n_sc;
        const auto ipn = interference_plus_noise(problem, alloc, i);
        const auto& gain = problem.channels.users[i].gain;
        auto& rates = r.per_subcarrier[i];
        rates.assign(static_cast<std::size_t>(n_sc), 0.0);
        for (int n = 0; n < n_sc; ++n) {
            const double s = alloc.x[i][n] * alloc.p[i][n] * gain[n];
            if (s > 0.0) rates[n] = subcarrier_rate(s / ipn[n], cfg.bandwidth_hz, n_sc);
            r.per_user[i] += rates[n];
        }
        r.sum_rate += r.per_user[i];
    }
    r.spectral_efficiency = r.sum_rate / cfg.bandwidth_hz;
    return r;
}

}  // namespace mnoma
