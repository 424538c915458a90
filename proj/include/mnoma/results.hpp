#pragma once

// Per-trial result records and their CSV form.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mnoma {

enum TrialFlag : unsigned {
    kFlagNone = 0,
    kFlagRminInfeasible = 1u << 0,
    kFlagIwfCap = 1u << 1,
    kFlagScaCap = 1u << 2,
};

// "none" or names joined by '|': rmin_infeasible, iwf_cap, sca_cap.
std::string flags_to_string(unsigned flags);
unsigned flags_from_string(const std::string& text);

struct TrialResult {
    std::string scheme;
    std::string sweep_var;
    double sweep_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double se_bps_hz = 0.0;
    double fairness = 0.0;
    double sum_rate_bps = 0.0;
    unsigned flags = kFlagNone;
    int sca_iters = 0;
    double ms = 0.0;
    std::vector<double> user_rates_bps;  // not written to CSV
};

inline constexpr const char* kResultsHeader =
    "scheme,sweep_var,sweep_value,trial,seed,se_bps_hz,fairness,sum_rate_bps,flags,sca_iters,ms";

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Throws std::invalid_argument for empty results.
void write_results(std::ostream& os, const std::vector<TrialResult>& results);
void write_results(const std::string& path, const std::vector<TrialResult>& results);

// Inverse of write_results; throws std::runtime_error on malformed input.
std::vector<TrialResult> read_results(std::istream& is);

}  // namespace mnoma
