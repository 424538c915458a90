#pragma once

// Benchmark schemes: greedy + IWF NOMA without power refinement, and
// guardband-free multi-numerology OMA.

#include <utility>
#include <vector>

#include "mnoma/rate.hpp"
#include "mnoma/stage1.hpp"
#include "mnoma/waterfill.hpp"

namespace mnoma {

// Stage 1 output used as the final allocation.
Allocation iwf_greedy_noma(const Problem& problem, const Stage1Options& options = {});

// Contiguous bandwidth parts in base-subcarrier units, [begin, end) per
// entry of cfg.users. Parts are laid out in ascending user id and built
// from blocks of (largest grid step) base subcarriers so every boundary
// falls on every user's grid; the remainder blocks go to the lowest ids.
// Throws std::invalid_argument if there are more users than blocks.
std::vector<std::pair<int, int>> oma_partition(const SystemConfig& cfg);

struct OmaResult {
    Allocation alloc;
    std::vector<std::pair<int, int>> parts;
    int iwf_sweeps = 0;
    bool iwf_cap_hit = false;
};

// Powers by IWF with every other user interfering (no SIC).
OmaResult mn_oma(const SystemConfig& cfg, const ChannelRealization& channels, const IniTable& table,
                 const IwfOptions& options = {});

}  // namespace mnoma
