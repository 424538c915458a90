#pragma once

// Greedy subcarrier de-allocation with iterative water-filling power
// initialization under the U-users-per-subcarrier limit.

#include <cstddef>
#include <vector>

#include "mnoma/rate.hpp"
#include "mnoma/waterfill.hpp"

namespace mnoma {

// A user occupies a base subcarrier when it holds more than this power there.
inline constexpr double kOccupancyPowerThreshold = 1e-12;

// Occupants per base subcarrier: users i in K_n with x = 1 and
// p > kOccupancyPowerThreshold.
std::vector<int> power_occupancy(const SystemConfig& cfg, const Allocation& alloc);

// Users i in K_n with x = 1, regardless of power.
std::vector<int> assignment_occupancy(const SystemConfig& cfg, const Allocation& alloc);

// R(x, p) - R(x without (user, n), p), bps, by full recomputation. May be
// negative. Throws std::invalid_argument if x[user][n] == 0.
double rate_loss(const Problem& problem, const Allocation& alloc, std::size_t user, std::size_t n);

struct Removal {
    std::size_t user = 0;
    int subcarrier = 0;  // user's own index
    int base_index = 0;
    double loss_bps = 0.0;
};

struct Stage1Options {
    IwfOptions iwf;
};

struct Stage1Result {
    // X* and p0. Assignments left with no power are cleared, so x also
    // satisfies the occupancy limit.
    Allocation alloc;
    std::vector<Removal> removals;
    int rounds = 0;                  // IWF runs
    int initial_over_occupancy = 0;  // sum_n max(0, |K_n| - U)
    std::vector<int> u_max_trace;    // max occupancy seen by each round
    std::vector<int> occupancy_histogram;  // [k] = base subcarriers with k occupants
    int iwf_sweeps = 0;
    bool iwf_cap_hit = false;
};

Stage1Result greedy_subcarrier_allocation(const Problem& problem, const Stage1Options& options = {});

}  // namespace mnoma
