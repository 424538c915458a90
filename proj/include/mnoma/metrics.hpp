#pragma once

#include <span>
#include <string>
#include <vector>

#include "mnoma/results.hpp"

namespace mnoma {

// (sum r)^2 / (K sum r^2). Throws std::invalid_argument for an empty
// vector, negative rates, or all rates zero.
double jain_fairness(std::span<const double> rates);

struct Summary {
    std::string scheme;
    std::string sweep_var;
    double sweep_value = 0.0;
    int trials = 0;
    double mean_se = 0.0;
    double stderr_se = 0.0;  // sample standard deviation / sqrt(n); 0 for one trial
    double mean_fairness = 0.0;
    double stderr_fairness = 0.0;
    double mean_sca_iters = 0.0;
    int rmin_infeasible = 0;
    int iwf_cap = 0;
    int sca_cap = 0;
};

// Mean / standard error of a sample.
double mean(std::span<const double> v);
double standard_error(std::span<const double> v);

// One summary per (scheme, sweep_var, sweep_value), sorted by that key.
// Throws std::invalid_argument for an empty list.
std::vector<Summary> aggregate(const std::vector<TrialResult>& trials);

}  // namespace mnoma
