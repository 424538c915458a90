#pragma once

#include <span>
#include <vector>

#include "mnoma/rate.hpp"

namespace mnoma {

// p_n = max(0, nu - 1/gain_n) with sum_n p_n = budget. Entries with
// gain <= 0 get zero power. Throws std::invalid_argument when no entry has
// positive gain or budget <= 0.
std::vector<double> waterfill_single_user(std::span<const double> gains, double budget);

// Water level nu of the solution above.
double water_level(std::span<const double> gains, double budget);

struct IwfOptions {
    double tolerance_w = 1e-6;  // max per-subcarrier power change in a sweep
    int max_sweeps = 100;
};

struct IwfResult {
    Allocation alloc;
    int sweeps = 0;
    bool converged = false;
};

// Round-robin water-filling in decoding order, each user against the
// interference-plus-noise implied by the current powers of the users that
// interfere with it under problem.model. `x` fixes the assignment; the
// initial powers come from `warm_start` (masked by x) or are zero.
IwfResult iterative_waterfill(const Problem& problem, const std::vector<std::vector<double>>& x,
                              const IwfOptions& options = {},
                              const Allocation* warm_start = nullptr);

}  // namespace mnoma
