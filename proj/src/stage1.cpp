#include "mnoma/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mnoma {

namespace {

template <typename Pred>
std::vector<int> count_occupancy(const SystemConfig& cfg, Pred occupied) {
    std::vector<int> occ(static_cast<std::size_t>(cfg.base_size()), 0);
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        const int step = cfg.grid_step(i);
        for (int o = 0; o < cfg.numerology(i).n_sc; ++o) {
            if (occupied(i, static_cast<std::size_t>(o))) ++occ[static_cast<std::size_t>(o * step)];
        }
    }
    return occ;
}

struct Candidate {
    double loss = std::numeric_limits<double>::infinity();
    std::size_t user = 0;
    int base_index = 0;
    int subcarrier = -1;
};

// Lower loss wins; ties go to the lower user index, then the lower base index.
bool better(const Candidate& a, const Candidate& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    if (a.user != b.user) return a.user < b.user;
    return a.base_index < b.base_index;
}

}  // namespace

std::vector<int> power_occupancy(const SystemConfig& cfg, const Allocation& alloc) {
    return count_occupancy(cfg, [&](std::size_t i, std::size_t o) {
        return alloc.x[i][o] != 0.0 && alloc.p[i][o] > kOccupancyPowerThreshold;
    });
}

std::vector<int> assignment_occupancy(const SystemConfig& cfg, const Allocation& alloc) {
    return count_occupancy(cfg, [&](std::size_t i, std::size_t o) { return alloc.x[i][o] != 0.0; });
}

double rate_loss(const Problem& problem, const Allocation& alloc, std::size_t user, std::size_t n) {
    if (alloc.x.at(user).at(n) == 0.0) {
        throw std::invalid_argument("rate_loss: subcarrier not allocated");
    }
    Allocation without = alloc;
    without.x[user][n] = 0.0;
    return sum_rate(problem, alloc).sum_rate - sum_rate(problem, without).sum_rate;
}

Stage1Result greedy_subcarrier_allocation(const Problem& problem, const Stage1Options& options) {
    const auto& cfg = problem.cfg;
    if (cfg.u_limit < 1) throw std::invalid_argument("greedy allocation: U must be >= 1");
    const std::size_t k_users = cfg.num_users();
    const double bw = cfg.bandwidth_hz;

    Stage1Result result;
    Allocation alloc = Allocation::all_assigned(cfg);
    for (int occ : assignment_occupancy(cfg, alloc)) {
        result.initial_over_occupancy += std::max(0, occ - cfg.u_limit);
    }

    std::vector<std::vector<double>> ipn(k_users);
    std::vector<std::vector<double>> signal(k_users);
    for (;;) {
        auto iwf = iterative_waterfill(problem, alloc.x, options.iwf, &alloc);
        alloc = std::move(iwf.alloc);
        ++result.rounds;
        result.iwf_sweeps += iwf.sweeps;
        result.iwf_cap_hit = result.iwf_cap_hit || !iwf.converged;

        const auto occ = power_occupancy(cfg, alloc);
        const int u_max = *std::max_element(occ.begin(), occ.end());
        result.u_max_trace.push_back(u_max);
        if (u_max <= cfg.u_limit) break;

        for (std::size_t i = 0; i < k_users; ++i) {
            ipn[i] = interference_plus_noise(problem, alloc, i);
            const auto& g = problem.channels.users[i].gain;
            signal[i].resize(g.size());
            for (std::size_t o = 0; o < g.size(); ++o) signal[i][o] = alloc.x[i][o] * alloc.p[i][o] * g[o];
        }

        // Rate loss of removing (i, o): its own rate minus the gains of the
        // users it interferes with, each computed in closed form from the
        // reduced interference I - C * p.
        Candidate best;
        for (int n = 0; n < cfg.base_size(); ++n) {
            if (occ[static_cast<std::size_t>(n)] <= cfg.u_limit) continue;
            for (std::size_t i = 0; i < k_users; ++i) {
                const int step = cfg.grid_step(i);
                if (n % step != 0) continue;
                const auto o = static_cast<std::size_t>(n / step);
                const double pio = alloc.p[i][o];
                if (alloc.x[i][o] == 0.0 || !(pio > kOccupancyPowerThreshold)) continue;

                Candidate c;
                c.user = i;
                c.base_index = n;
                c.subcarrier = static_cast<int>(o);
                double loss = subcarrier_rate(signal[i][o] / ipn[i][o], bw, cfg.numerology(i).n_sc);
                for (std::size_t v = 0; v < k_users; ++v) {
                    if (!problem.interferes(v, i)) continue;
                    const auto& coef = problem.table.coefficients(v, i);
                    const double scale = bw / cfg.numerology(v).n_sc / std::numbers::ln2;
                    double gain = 0.0;
                    for (std::size_t m = 0; m < coef.rows(); ++m) {
                        const double s = signal[v][m];
                        const double delta = coef(m, o) * pio;
                        if (s == 0.0 || delta == 0.0) continue;
                        const double before = ipn[v][m];
                        const double after = std::max(before - delta, cfg.noise_var);
                        gain += std::log1p(s * (before - after) / ((before + s) * after));
                    }
                    loss -= scale * gain;
                }
                c.loss = loss;
                if (better(c, best)) best = c;
            }
        }
        if (best.subcarrier < 0) break;  // unreachable: an overloaded subcarrier has occupants
        alloc.x[best.user][static_cast<std::size_t>(best.subcarrier)] = 0.0;
        alloc.p[best.user][static_cast<std::size_t>(best.subcarrier)] = 0.0;
        result.removals.push_back({best.user, best.subcarrier, best.base_index, best.loss});
    }

    for (std::size_t i = 0; i < k_users; ++i) {
        for (std::size_t o = 0; o < alloc.x[i].size(); ++o) {
            if (!(alloc.p[i][o] > kOccupancyPowerThreshold)) {
                alloc.x[i][o] = 0.0;
                alloc.p[i][o] = 0.0;
            }
        }
    }
    const auto final_occ = assignment_occupancy(cfg, alloc);
    result.occupancy_histogram.assign(k_users + 1, 0);
    for (int occ : final_occ) ++result.occupancy_histogram[static_cast<std::size_t>(occ)];
    result.alloc = std::move(alloc);
    return result;
}

}  // namespace mnoma
