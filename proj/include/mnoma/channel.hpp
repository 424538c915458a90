#pragma once

// Random multipath channels with the EVA power-delay profile.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mnoma/numerology.hpp"
#include "mnoma/sigops.hpp"

namespace mnoma {

struct PowerDelayProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
};

// 3GPP Extended Vehicular A.
const PowerDelayProfile& eva_profile();

// Profile powers binned to the nearest sample index at sample_rate_hz and
// normalized to unit sum. Length is the last occupied index + 1.
std::vector<double> sampled_profile(const PowerDelayProfile& pdp, double sample_rate_hz);

// One draw of sample-spaced taps: tap l ~ CN(0, sampled_profile[l]).
std::vector<cd> draw_eva_channel(std::uint64_t seed, double sample_rate_hz);

struct UserChannel {
    int user_id = 0;
    std::vector<cd> taps;
    CVector response;          // length N_i
    std::vector<double> gain;  // |response|^2
};

// users[k] belongs to cfg.users[k].
struct ChannelRealization {
    std::uint64_t seed = 0;
    std::vector<UserChannel> users;
};

// SplitMix64 mix of two words; used for every derived seed.
std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b);

// Channels for every user; user with id u is drawn from derive_seed(seed, u),
// so a user's channel does not depend on where it sits in decoding order.
ChannelRealization realize_all_users(const SystemConfig& cfg, std::uint64_t seed);

// Rebuild responses after editing taps.
UserChannel make_user_channel(int user_id, std::vector<cd> taps, const Numerology& numerology);

// Text dump, one line per user: label,user_id,L,re0,im0,re1,im1,...
void write_channel_dump(std::ostream& os, const std::string& label, const ChannelRealization& ch);

}  // namespace mnoma
