// mnoma: run experiment plans, check invariants, export INI tables.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mnoma/harness.hpp"
#include "mnoma/ini.hpp"
#include "mnoma/metrics.hpp"
#include "mnoma/validation.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
    std::string plan;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> trials;
    std::optional<int> threads;
};

mnoma::ExperimentPlan resolve_plan(const Overrides& o) {
    mnoma::ExperimentPlan plan = o.plan.empty() ? mnoma::ExperimentPlan{} : mnoma::load_plan(o.plan);
    if (o.seed) plan.seed = *o.seed;
    if (o.out) plan.out = *o.out;
    if (o.trials) plan.trials = *o.trials;
    if (o.threads) plan.threads = *o.threads;
    plan.validate();
    return plan;
}

void print_summary(const std::vector<mnoma::TrialResult>& rows) {
    std::printf("%-11s %-7s %8s %7s %10s %9s %10s %9s %6s %6s\n", "scheme", "sweep", "value", "trials",
                "mean_se", "se_err", "fairness", "f_err", "rmin", "capped");
    for (const auto& s : mnoma::aggregate(rows)) {
        std::printf("%-11s %-7s %8g %7d %10.5f %9.5f %10.5f %9.5f %6d %6d\n", s.scheme.c_str(),
                    s.sweep_var.c_str(), s.sweep_value, s.trials, s.mean_se, s.stderr_se, s.mean_fairness,
                    s.stderr_fairness, s.rmin_infeasible, s.sca_cap + s.iwf_cap);
    }
}

int cmd_run(const Overrides& o) {
    const auto plan = resolve_plan(o);
    std::ofstream dump;
    if (!plan.channel_dump.empty()) {
        dump.open(plan.channel_dump);
        if (!dump) throw std::runtime_error("cannot open channel dump " + plan.channel_dump);
    }
    const auto rows = mnoma::run_experiment(plan, plan.channel_dump.empty() ? nullptr : &dump);
    mnoma::write_results(plan.out, rows);
    std::ofstream meta(plan.out + ".plan");
    if (!meta) throw std::runtime_error("cannot write " + plan.out + ".plan");
    mnoma::write_plan(meta, plan);
    print_summary(rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), plan.out.c_str());
    return 0;
}

int cmd_validate(const Overrides& o) {
    const std::uint64_t seed = o.seed.value_or(1);
    const int instances = o.trials.value_or(20);
    if (instances < 1) throw mnoma::ConfigError("--trials must be >= 1");
    bool ok = true;
    for (const auto& c : mnoma::run_invariant_suite(seed, instances)) {
        std::printf("%s  %s (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        ok = ok && c.passed;
    }
    return ok ? 0 : kExitRuntime;
}

int cmd_ini_dump(const Overrides& o) {
    auto plan = resolve_plan(o);
    const std::string out = o.out.value_or("ini_table.csv");
    const auto setup = mnoma::make_trial(plan, 0, 0);
    const auto table = mnoma::build_ini_table(setup.cfg, setup.channels);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out);
    mnoma::write_ini_table_csv(os, setup.cfg, table);
    std::printf("wrote INI table for %zu users (seed %llu) to %s\n", setup.cfg.num_users(),
                static_cast<unsigned long long>(setup.seed), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-numerology NOMA resource allocation"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&](CLI::App* sub, bool plan_required) {
        auto* plan = sub->add_option("--plan", o.plan, "plan file (key = value)");
        if (plan_required) plan->required();
        plan->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output path");
        sub->add_option("--trials", o.trials, "trials per sweep point (validate: instances)");
        sub->add_option("--threads", o.threads, "worker threads");
    };
    auto* run = app.add_subcommand("run", "run a plan and write the results CSV");
    add_common(run, true);
    auto* validate = app.add_subcommand("validate", "run the invariant suite on random small systems");
    add_common(validate, false);
    auto* ini = app.add_subcommand("ini-dump", "export the INI coefficient table of trial 0");
    add_common(ini, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(o);
        if (validate->parsed()) return cmd_validate(o);
        if (ini->parsed()) return cmd_ini_dump(o);
    } catch (const mnoma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
