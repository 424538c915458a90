#pragma once

// Monte Carlo experiment runner: plan file, per-trial system draw, and the
// three schemes evaluated on the same channels and decoding order.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mnoma/channel.hpp"
#include "mnoma/numerology.hpp"
#include "mnoma/results.hpp"
#include "mnoma/stage2.hpp"

namespace mnoma {

enum class Scheme { kProposed, kIwfGreedy, kMnOma };
enum class SweepVar { kSnrDb, kUsers };
enum class DecodingOrder { kRandom, kById };

const char* scheme_name(Scheme s);
const char* sweep_name(SweepVar v);
// Throw ConfigError on unknown names.
Scheme parse_scheme(const std::string& name);
SweepVar parse_sweep(const std::string& name);

struct ExperimentPlan {
    SweepVar sweep = SweepVar::kSnrDb;
    std::vector<double> values{0.0, 5.0, 10.0, 15.0, 20.0};
    int trials = 100;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes{Scheme::kProposed, Scheme::kIwfGreedy, Scheme::kMnOma};
    std::vector<int> mix{0, 1, 2};  // user id u gets mu = mix[u % mix.size()]
    int users = 6;                  // fixed K for an SNR sweep
    double snr_db = 10.0;           // fixed SNR for a user sweep
    int reference_fft = 128;
    double reference_spacing_hz = 15e3;
    double cp_fraction = 0.07;
    double power_per_subcarrier_w = 1.0;  // P_i = N_i * this
    int u_limit = 2;
    double r_min = 0.5;
    DecodingOrder order = DecodingOrder::kRandom;
    int threads = 1;
    bool record_timing = false;  // off keeps the CSV bitwise reproducible
    std::string out = "results.csv";
    std::string channel_dump;    // empty: no dump
    ScaOptions sca;

    // Throws ConfigError.
    void validate() const;
};

// "key = value" lines, '#' comments, comma-separated lists. Throws
// ConfigError on unknown keys or malformed values.
ExperimentPlan parse_plan(std::istream& is);
ExperimentPlan load_plan(const std::string& path);
// Round-trippable text form of every plan field.
void write_plan(std::ostream& os, const ExperimentPlan& plan);

struct TrialSetup {
    std::uint64_t seed = 0;
    SystemConfig cfg;  // users in decoding order
    ChannelRealization channels;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, int trial);

TrialSetup make_trial(const ExperimentPlan& plan, std::size_t sweep_index, int trial);

// One row per scheme of the plan, in plan order.
std::vector<TrialResult> run_trial(const ExperimentPlan& plan, const TrialSetup& setup,
                                   std::size_t sweep_index, int trial);

// All rows sorted by (scheme, sweep value, trial), independent of the
// thread count. Channel taps of every trial go to channel_dump if given.
std::vector<TrialResult> run_experiment(const ExperimentPlan& plan, std::ostream* channel_dump = nullptr);

}  // namespace mnoma
