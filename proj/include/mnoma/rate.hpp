#pragma once

#include <cstddef>
#include <vector>

#include "mnoma/channel.hpp"
#include "mnoma/ini.hpp"
#include "mnoma/numerology.hpp"

namespace mnoma {

// Who interferes with whom. With SIC a user only sees users decoded after
// it; without SIC (OMA) every other user interferes.
enum class InterferenceModel { kSicOrdered, kAllPairs };

struct Allocation {
    std::vector<std::vector<double>> x;  // 0/1 per user subcarrier
    std::vector<std::vector<double>> p;  // W per user subcarrier

    static Allocation zeros(const SystemConfig& cfg);
    // x = 1 everywhere, p = 0.
    static Allocation all_assigned(const SystemConfig& cfg);
};

// Throws std::invalid_argument if shapes, binarity, non-negativity, the
// p > 0 => x = 1 rule, or the per-user budgets (relative tolerance
// budget_tol) fail.
void check_allocation(const Allocation& alloc, const SystemConfig& cfg, double budget_tol = 1e-9);

struct Problem {
    const SystemConfig& cfg;
    const ChannelRealization& channels;
    const IniTable& table;
    InterferenceModel model = InterferenceModel::kSicOrdered;

    bool interferes(std::size_t victim, std::size_t interferer) const {
        if (victim == interferer) return false;
        return model == InterferenceModel::kAllPairs || interferer > victim;
    }
};

// sigma^2 + sum over interferers of gamma^(i <- j), length N_i.
std::vector<double> interference_plus_noise(const Problem& problem, const Allocation& alloc,
                                            std::size_t user);

double sinr(const Problem& problem, const Allocation& alloc, std::size_t user, std::size_t n);

// (B / n_sc) log2(1 + sinr), bps.
double subcarrier_rate(double sinr_value, double bandwidth_hz, int n_sc);

double rate_per_subcarrier(const Problem& problem, const Allocation& alloc, std::size_t user,
                           std::size_t n);

struct RateReport {
    std::vector<std::vector<double>> per_subcarrier;  // bps
    std::vector<double> per_user;                     // bps
    double sum_rate = 0.0;                            // bps
    double spectral_efficiency = 0.0;                 // bps/Hz
};

RateReport sum_rate(const Problem& problem, const Allocation& alloc);

}  // namespace mnoma
