#pragma once

// Invariant checks on random small systems, run by `mnoma validate`.

#include <cstdint>
#include <string>
#include <vector>

#include "mnoma/harness.hpp"

namespace mnoma {

// K uniform in [min_users, max_users], mu uniform in {0, 1, 2} with at
// least two distinct values when K >= 2, random decoding order, SNR uniform
// in [0, 20] dB, U = 2, R_min = 0.5.
TrialSetup random_instance(std::uint64_t seed, int min_users, int max_users, int reference_fft = 64);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, int instances);

}  // namespace mnoma
