#include "mnoma/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace mnoma {

double jain_fairness(std::span<const double> rates) {
    if (rates.empty()) throw std::invalid_argument("jain_fairness: no users");
    double sum = 0.0;
    double sq = 0.0;
    for (double r : rates) {
        if (!(r >= 0.0)) throw std::invalid_argument("jain_fairness: negative rate");
        sum += r;
        sq += r * r;
    }
    if (sq == 0.0) throw std::invalid_argument("jain_fairness: all rates zero");
    return sum * sum / (static_cast<double>(rates.size()) * sq);
}

double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

std::vector<Summary> aggregate(const std::vector<TrialResult>& trials) {
    if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
    using Key = std::tuple<std::string, std::string, double>;
    std::map<Key, std::vector<const TrialResult*>> groups;
    for (const auto& t : trials) groups[{t.scheme, t.sweep_var, t.sweep_value}].push_back(&t);
    std::vector<Summary> out;
    for (const auto& [key, members] : groups) {
        Summary s;
        std::tie(s.scheme, s.sweep_var, s.sweep_value) = key;
        s.trials = static_cast<int>(members.size());
        std::vector<double> se, fair;
        double iters = 0.0;
        for (const auto* t : members) {
            se.push_back(t->se_bps_hz);
            fair.push_back(t->fairness);
            iters += t->sca_iters;
            s.rmin_infeasible += (t->flags & kFlagRminInfeasible) != 0;
            s.iwf_cap += (t->flags & kFlagIwfCap) != 0;
            s.sca_cap += (t->flags & kFlagScaCap) != 0;
        }
        s.mean_se = mean(se);
        s.stderr_se = standard_error(se);
        s.mean_fairness = mean(fair);
        s.stderr_fairness = standard_error(fair);
        s.mean_sca_iters = iters / static_cast<double>(members.size());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace mnoma
