#include "mnoma/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mnoma {

Allocation iwf_greedy_noma(const Problem& problem, const Stage1Options& options) {
    return greedy_subcarrier_allocation(problem, options).alloc;
}

std::vector<std::pair<int, int>> oma_partition(const SystemConfig& cfg) {
    const std::size_t k_users = cfg.num_users();
    int block = 1;
    for (std::size_t i = 0; i < k_users; ++i) block = std::max(block, cfg.grid_step(i));
    const int blocks = cfg.base_size() / block;
    if (static_cast<int>(k_users) > blocks) {
        throw std::invalid_argument("mn_oma: more users than bandwidth-part blocks");
    }
    std::vector<std::size_t> by_id(k_users);
    std::iota(by_id.begin(), by_id.end(), 0);
    std::stable_sort(by_id.begin(), by_id.end(),
                     [&](std::size_t a, std::size_t b) { return cfg.users[a].id < cfg.users[b].id; });
    std::vector<std::pair<int, int>> parts(k_users);
    const int share = blocks / static_cast<int>(k_users);
    const int extra = blocks % static_cast<int>(k_users);
    int cursor = 0;
    for (std::size_t r = 0; r < k_users; ++r) {
        const int count = share + (static_cast<int>(r) < extra ? 1 : 0);
        parts[by_id[r]] = {cursor * block, (cursor + count) * block};
        cursor += count;
    }
    // The last part absorbs base subcarriers left over by the block size.
    if (k_users > 0) parts[by_id.back()].second = std::max(parts[by_id.back()].second, cfg.base_size());
    return parts;
}

OmaResult mn_oma(const SystemConfig& cfg, const ChannelRealization& channels, const IniTable& table,
                 const IwfOptions& options) {
    OmaResult result;
    result.parts = oma_partition(cfg);
    std::vector<std::vector<double>> x(cfg.num_users());
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        const int step = cfg.grid_step(i);
        x[i].assign(static_cast<std::size_t>(cfg.numerology(i).n_sc), 0.0);
        for (int o = 0; o < cfg.numerology(i).n_sc; ++o) {
            const int n = o * step;
            if (n >= result.parts[i].first && n < result.parts[i].second) x[i][static_cast<std::size_t>(o)] = 1.0;
        }
    }
    const Problem problem{cfg, channels, table, InterferenceModel::kAllPairs};
    auto iwf = iterative_waterfill(problem, x, options);
    result.alloc = std::move(iwf.alloc);
    result.iwf_sweeps = iwf.sweeps;
    result.iwf_cap_hit = !iwf.converged;
    return result;
}

}  // namespace mnoma
