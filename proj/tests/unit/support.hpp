#pragma once

// Small fixtures shared by the unit tests.

#include <cstdint>
#include <vector>

#include "mnoma/channel.hpp"
#include "mnoma/ini.hpp"
#include "mnoma/numerology.hpp"
#include "mnoma/rate.hpp"

namespace mnoma::test {

inline SystemConfig small_system(std::vector<int> mus, int fft = 64, double snr_db = 10.0,
                                 int u_limit = 2, double r_min = 0.0) {
    SystemParams params;
    params.reference_fft = fft;
    params.user_mu = std::move(mus);
    params.snr_db = snr_db;
    params.u_limit = u_limit;
    params.r_min = r_min;
    return build_system(params);
}

// Impulse channel (|h_n|^2 = 1 on every subcarrier) for every user.
inline ChannelRealization flat_channels(const SystemConfig& cfg) {
    ChannelRealization ch;
    for (const auto& u : cfg.users) {
        ch.users.push_back(make_user_channel(u.id, {cd(1.0, 0.0)}, u.numerology));
    }
    return ch;
}

// Owns everything a Problem refers to.
struct Instance {
    SystemConfig cfg;
    ChannelRealization channels;
    IniTable table;
    InterferenceModel model = InterferenceModel::kSicOrdered;

    Problem problem() const { return Problem{cfg, channels, table, model}; }

    static Instance random(SystemConfig cfg, std::uint64_t seed) {
        Instance inst;
        inst.channels = realize_all_users(cfg, seed);
        inst.table = build_ini_table(cfg, inst.channels);
        inst.cfg = std::move(cfg);
        return inst;
    }
    static Instance zero_ini(SystemConfig cfg, std::uint64_t seed) {
        Instance inst;
        inst.channels = realize_all_users(cfg, seed);
        inst.table = IniTable::zeros(cfg);
        inst.cfg = std::move(cfg);
        return inst;
    }
    static Instance flat(SystemConfig cfg) {
        Instance inst;
        inst.channels = flat_channels(cfg);
        inst.table = build_ini_table(cfg, inst.channels);
        inst.cfg = std::move(cfg);
        return inst;
    }
};

}  // namespace mnoma::test
