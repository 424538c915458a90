#include "mnoma/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mnoma {

double water_level(std::span<const double> gains, double budget) {
    if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");
    std::vector<double> floors;
    floors.reserve(gains.size());
    for (double g : gains) {
        if (g > 0.0) floors.push_back(1.0 / g);
    }
    if (floors.empty()) throw std::invalid_argument("waterfill: empty active set");
    std::sort(floors.begin(), floors.end());
    // Largest k whose level stays above the k-th floor.
    double prefix = 0.0;
    double level = 0.0;
    for (std::size_t k = 0; k < floors.size(); ++k) {
        prefix += floors[k];
        const double candidate = (budget + prefix) / static_cast<double>(k + 1);
        if (k > 0 && candidate <= floors[k]) break;
        level = candidate;
    }
    return level;
}

std::vector<double> waterfill_single_user(std::span<const double> gains, double budget) {
    const double level = water_level(gains, budget);
    std::vector<double> p(gains.size(), 0.0);
    for (std::size_t n = 0; n < gains.size(); ++n) {
        if (gains[n] > 0.0) p[n] = std::max(0.0, level - 1.0 / gains[n]);
    }
    return p;
}

IwfResult iterative_waterfill(const Problem& problem, const std::vector<std::vector<double>>& x,
                              const IwfOptions& options, const Allocation* warm_start) {
    const auto& cfg = problem.cfg;
    if (x.size() != cfg.num_users()) throw std::invalid_argument("iwf: x has wrong user count");
    IwfResult result;
    result.alloc = Allocation::zeros(cfg);
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        if (x[i].size() != result.alloc.x[i].size()) {
            throw std::invalid_argument("iwf: x has wrong length");
        }
        result.alloc.x[i] = x[i];
        if (warm_start != nullptr) {
            for (std::size_t n = 0; n < x[i].size(); ++n) {
                result.alloc.p[i][n] = x[i][n] != 0.0 ? warm_start->p[i][n] : 0.0;
            }
        }
    }
    auto& alloc = result.alloc;
    std::vector<double> gains;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t i = 0; i < cfg.num_users(); ++i) {
            const auto ipn = interference_plus_noise(problem, alloc, i);
            const auto& g = problem.channels.users[i].gain;
            gains.assign(ipn.size(), 0.0);
            bool any = false;
            for (std::size_t n = 0; n < ipn.size(); ++n) {
                if (alloc.x[i][n] != 0.0 && g[n] > 0.0) {
                    gains[n] = g[n] / ipn[n];
                    any = true;
                }
            }
            std::vector<double> next(ipn.size(), 0.0);
            if (any) next = waterfill_single_user(gains, cfg.users[i].power_budget);
            for (std::size_t n = 0; n < next.size(); ++n) {
                change = std::max(change, std::abs(next[n] - alloc.p[i][n]));
            }
            alloc.p[i] = std::move(next);
        }
        result.sweeps = sweep + 1;
        if (change < options.tolerance_w) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace mnoma
