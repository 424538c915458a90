#include "mnoma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "mnoma/baselines.hpp"
#include "mnoma/ini.hpp"
#include "mnoma/metrics.hpp"
#include "mnoma/rate.hpp"
#include "mnoma/stage1.hpp"

namespace mnoma {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("plan: bad value for " + key + ": '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("plan: bad boolean for " + key + ": '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(parse_value<T>(key, item));
    return out;
}

// Uniform integer in [0, n) by rejection, identical on every platform.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r < limit) return r % n;
    }
}

int users_at(const ExperimentPlan& plan, std::size_t sweep_index) {
    return plan.sweep == SweepVar::kUsers ? static_cast<int>(plan.values[sweep_index]) : plan.users;
}

double snr_at(const ExperimentPlan& plan, std::size_t sweep_index) {
    return plan.sweep == SweepVar::kSnrDb ? plan.values[sweep_index] : plan.snr_db;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kProposed: return "proposed";
        case Scheme::kIwfGreedy: return "iwf_greedy";
        case Scheme::kMnOma: return "mn_oma";
    }
    return "?";
}

const char* sweep_name(SweepVar v) { return v == SweepVar::kSnrDb ? "snr_db" : "users"; }

Scheme parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::kProposed, Scheme::kIwfGreedy, Scheme::kMnOma}) {
        if (name == scheme_name(s)) return s;
    }
    throw ConfigError("plan: unknown scheme '" + name + "'");
}

SweepVar parse_sweep(const std::string& name) {
    if (name == "snr_db") return SweepVar::kSnrDb;
    if (name == "users") return SweepVar::kUsers;
    throw ConfigError("plan: unknown sweep '" + name + "'");
}

void ExperimentPlan::validate() const {
    if (trials < 1) throw ConfigError("plan: trials must be >= 1");
    if (schemes.empty()) throw ConfigError("plan: no schemes");
    if (values.empty()) throw ConfigError("plan: no sweep values");
    if (mix.empty()) throw ConfigError("plan: empty numerology mix");
    if (threads < 1) throw ConfigError("plan: threads must be >= 1");
    for (int mu : mix) {
        if (mu < 0 || mu > 6) throw ConfigError("plan: numerology out of range");
    }
    std::vector<int> counts;
    if (sweep == SweepVar::kUsers) {
        for (double v : values) {
            if (v < 1.0 || v != std::floor(v)) throw ConfigError("plan: user counts must be positive integers");
            counts.push_back(static_cast<int>(v));
        }
    } else {
        counts.push_back(users);
    }
    for (int k : counts) {
        if (k < 1) throw ConfigError("plan: users must be >= 1");
        if (k % static_cast<int>(mix.size()) != 0) {
            throw ConfigError("plan: user count must be a multiple of the numerology count");
        }
    }
    if (sca.max_iterations < 1 || !(sca.epsilon > 0.0)) throw ConfigError("plan: bad SCA settings");
    // Build one system per user count to surface numerology errors early.
    for (int k : counts) {
        SystemParams sp;
        sp.reference_fft = reference_fft;
        sp.reference_spacing_hz = reference_spacing_hz;
        sp.cp_fraction = cp_fraction;
        sp.power_per_subcarrier = power_per_subcarrier_w;
        sp.u_limit = u_limit;
        sp.r_min = r_min;
        for (int u = 0; u < k; ++u) sp.user_mu.push_back(mix[static_cast<std::size_t>(u) % mix.size()]);
        (void)build_system(sp);
    }
}

ExperimentPlan parse_plan(std::istream& is) {
    ExperimentPlan plan;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("plan: line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "sweep") plan.sweep = parse_sweep(value);
        else if (key == "values") plan.values = parse_list<double>(key, value);
        else if (key == "trials") plan.trials = parse_value<int>(key, value);
        else if (key == "seed") plan.seed = parse_value<std::uint64_t>(key, value);
        else if (key == "schemes") {
            plan.schemes.clear();
            for (const auto& s : split_list(value)) plan.schemes.push_back(parse_scheme(s));
        }
        else if (key == "mix") plan.mix = parse_list<int>(key, value);
        else if (key == "users") plan.users = parse_value<int>(key, value);
        else if (key == "snr_db") plan.snr_db = parse_value<double>(key, value);
        else if (key == "reference_fft") plan.reference_fft = parse_value<int>(key, value);
        else if (key == "subcarrier_spacing_hz") plan.reference_spacing_hz = parse_value<double>(key, value);
        else if (key == "cp_fraction") plan.cp_fraction = parse_value<double>(key, value);
        else if (key == "power_per_subcarrier_w") plan.power_per_subcarrier_w = parse_value<double>(key, value);
        else if (key == "u_limit") plan.u_limit = parse_value<int>(key, value);
        else if (key == "r_min") plan.r_min = parse_value<double>(key, value);
        else if (key == "decoding_order") {
            if (value == "random") plan.order = DecodingOrder::kRandom;
            else if (value == "by_id") plan.order = DecodingOrder::kById;
            else throw ConfigError("plan: decoding_order must be random or by_id");
        }
        else if (key == "threads") plan.threads = parse_value<int>(key, value);
        else if (key == "record_timing") plan.record_timing = parse_bool(key, value);
        else if (key == "out") plan.out = value;
        else if (key == "channel_dump") plan.channel_dump = value;
        else if (key == "sca_epsilon") plan.sca.epsilon = parse_value<double>(key, value);
        else if (key == "sca_max_iterations") plan.sca.max_iterations = parse_value<int>(key, value);
        else throw ConfigError("plan: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("plan: cannot open " + path);
    return parse_plan(is);
}

void write_plan(std::ostream& os, const ExperimentPlan& plan) {
    auto join = [](const auto& v, auto fmt) {
        std::string out;
        for (const auto& x : v) {
            if (!out.empty()) out += ", ";
            out += fmt(x);
        }
        return out;
    };
    os << "# per-user power budget P_i = N_i * power_per_subcarrier_w\n";
    os << "sweep = " << sweep_name(plan.sweep) << '\n';
    os << "values = " << join(plan.values, format_double) << '\n';
    os << "trials = " << plan.trials << '\n';
    os << "seed = " << plan.seed << '\n';
    os << "schemes = " << join(plan.schemes, [](Scheme s) { return std::string(scheme_name(s)); }) << '\n';
    os << "mix = " << join(plan.mix, [](int m) { return std::to_string(m); }) << '\n';
    os << "users = " << plan.users << '\n';
    os << "snr_db = " << format_double(plan.snr_db) << '\n';
    os << "reference_fft = " << plan.reference_fft << '\n';
    os << "subcarrier_spacing_hz = " << format_double(plan.reference_spacing_hz) << '\n';
    os << "cp_fraction = " << format_double(plan.cp_fraction) << '\n';
    os << "power_per_subcarrier_w = " << format_double(plan.power_per_subcarrier_w) << '\n';
    os << "u_limit = " << plan.u_limit << '\n';
    os << "r_min = " << format_double(plan.r_min) << '\n';
    os << "decoding_order = " << (plan.order == DecodingOrder::kRandom ? "random" : "by_id") << '\n';
    os << "threads = " << plan.threads << '\n';
    os << "record_timing = " << (plan.record_timing ? "true" : "false") << '\n';
    os << "out = " << plan.out << '\n';
    if (!plan.channel_dump.empty()) os << "channel_dump = " << plan.channel_dump << '\n';
    os << "sca_epsilon = " << format_double(plan.sca.epsilon) << '\n';
    os << "sca_max_iterations = " << plan.sca.max_iterations << '\n';
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, int trial) {
    return derive_seed(derive_seed(master, sweep_index), static_cast<std::uint64_t>(trial));
}

TrialSetup make_trial(const ExperimentPlan& plan, std::size_t sweep_index, int trial) {
    TrialSetup setup;
    setup.seed = trial_seed(plan.seed, sweep_index, trial);
    const int k = users_at(plan, sweep_index);
    std::vector<int> order(static_cast<std::size_t>(k));
    for (int u = 0; u < k; ++u) order[static_cast<std::size_t>(u)] = u;
    if (plan.order == DecodingOrder::kRandom) {
        std::mt19937_64 rng(derive_seed(setup.seed, 0x6f72646572ULL));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
    }
    SystemParams sp;
    sp.reference_fft = plan.reference_fft;
    sp.reference_spacing_hz = plan.reference_spacing_hz;
    sp.cp_fraction = plan.cp_fraction;
    sp.power_per_subcarrier = plan.power_per_subcarrier_w;
    sp.snr_db = snr_at(plan, sweep_index);
    sp.u_limit = plan.u_limit;
    sp.r_min = plan.r_min;
    for (int id : order) {
        sp.user_ids.push_back(id);
        sp.user_mu.push_back(plan.mix[static_cast<std::size_t>(id) % plan.mix.size()]);
    }
    setup.cfg = build_system(sp);
    setup.channels = realize_all_users(setup.cfg, setup.seed);
    return setup;
}

std::vector<TrialResult> run_trial(const ExperimentPlan& plan, const TrialSetup& setup,
                                   std::size_t sweep_index, int trial) {
    const auto& cfg = setup.cfg;
    const IniTable table = build_ini_table(cfg, setup.channels);
    const Problem noma{cfg, setup.channels, table, InterferenceModel::kSicOrdered};

    auto row = [&](Scheme s, const Problem& problem, const Allocation& alloc) {
        TrialResult r;
        r.scheme = scheme_name(s);
        r.sweep_var = sweep_name(plan.sweep);
        r.sweep_value = plan.values[sweep_index];
        r.trial = trial;
        r.seed = setup.seed;
        const auto report = sum_rate(problem, alloc);
        r.se_bps_hz = report.spectral_efficiency;
        r.sum_rate_bps = report.sum_rate;
        r.user_rates_bps = report.per_user;
        r.fairness = jain_fairness(report.per_user);
        return r;
    };

    const bool need_stage1 = std::any_of(plan.schemes.begin(), plan.schemes.end(), [](Scheme s) {
        return s == Scheme::kProposed || s == Scheme::kIwfGreedy;
    });
    const auto t0 = std::chrono::steady_clock::now();
    Stage1Result s1;
    if (need_stage1) s1 = greedy_subcarrier_allocation(noma);
    const double stage1_ms = elapsed_ms(t0);

    std::vector<TrialResult> rows;
    for (Scheme s : plan.schemes) {
        const auto start = std::chrono::steady_clock::now();
        TrialResult r;
        if (s == Scheme::kIwfGreedy) {
            r = row(s, noma, s1.alloc);
            if (s1.iwf_cap_hit) r.flags |= kFlagIwfCap;
            if (plan.record_timing) r.ms = stage1_ms;
        } else if (s == Scheme::kProposed) {
            const auto s2 = sca_power_allocation(noma, s1.alloc, plan.sca);
            r = row(s, noma, s2.alloc);
            r.sca_iters = s2.iterations;
            if (s1.iwf_cap_hit) r.flags |= kFlagIwfCap;
            if (s2.cap_hit) r.flags |= kFlagScaCap;
            if (s2.rmin_infeasible) r.flags |= kFlagRminInfeasible;
            if (plan.record_timing) r.ms = stage1_ms + elapsed_ms(start);
        } else {
            const auto oma = mn_oma(cfg, setup.channels, table);
            const Problem all_pairs{cfg, setup.channels, table, InterferenceModel::kAllPairs};
            r = row(s, all_pairs, oma.alloc);
            if (oma.iwf_cap_hit) r.flags |= kFlagIwfCap;
            if (plan.record_timing) r.ms = elapsed_ms(start);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<TrialResult> run_experiment(const ExperimentPlan& plan, std::ostream* channel_dump) {
    plan.validate();
    const std::size_t points = plan.values.size();
    const std::size_t units = points * static_cast<std::size_t>(plan.trials);
    std::vector<std::vector<TrialResult>> slots(units);
    std::vector<std::string> dumps(channel_dump != nullptr ? units : 0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t u = next.fetch_add(1);
            if (u >= units) return;
            try {
                const std::size_t sweep_index = u / static_cast<std::size_t>(plan.trials);
                const int trial = static_cast<int>(u % static_cast<std::size_t>(plan.trials));
                const auto setup = make_trial(plan, sweep_index, trial);
                slots[u] = run_trial(plan, setup, sweep_index, trial);
                if (channel_dump != nullptr) {
                    std::ostringstream os;
                    write_channel_dump(os,
                                       std::string(sweep_name(plan.sweep)) + "=" +
                                           format_double(plan.values[sweep_index]) + ";trial=" +
                                           std::to_string(trial),
                                       setup.channels);
                    dumps[u] = os.str();
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(units);
                return;
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(plan.threads, static_cast<int>(units)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    if (channel_dump != nullptr) {
        for (const auto& d : dumps) *channel_dump << d;
    }
    std::vector<TrialResult> rows;
    rows.reserve(units * plan.schemes.size());
    for (auto& s : slots) {
        for (auto& r : s) rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TrialResult& a, const TrialResult& b) {
        if (a.scheme != b.scheme) return a.scheme < b.scheme;
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        return a.trial < b.trial;
    });
    return rows;
}

}  // namespace mnoma
