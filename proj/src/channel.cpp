#include "mnoma/channel.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace mnoma {

const PowerDelayProfile& eva_profile() {
    static const PowerDelayProfile pdp{
        {0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0},
        {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}};
    return pdp;
}

std::vector<double> sampled_profile(const PowerDelayProfile& pdp, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
    if (pdp.delays_ns.size() != pdp.powers_db.size() || pdp.delays_ns.empty()) {
        throw std::invalid_argument("malformed power-delay profile");
    }
    std::vector<double> bins;
    double total = 0.0;
    for (std::size_t k = 0; k < pdp.delays_ns.size(); ++k) {
        const auto idx =
            static_cast<std::size_t>(std::llround(pdp.delays_ns[k] * 1e-9 * sample_rate_hz));
        if (idx >= bins.size()) bins.resize(idx + 1, 0.0);
        const double p = std::pow(10.0, pdp.powers_db[k] / 10.0);
        bins[idx] += p;
        total += p;
    }
    for (double& b : bins) b /= total;
    return bins;
}

std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<cd> draw_eva_channel(std::uint64_t seed, double sample_rate_hz) {
    const auto profile = sampled_profile(eva_profile(), sample_rate_hz);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cd> taps(profile.size());
    for (std::size_t l = 0; l < profile.size(); ++l) {
        const double s = std::sqrt(profile[l] / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        taps[l] = {s * re, s * im};
    }
    return taps;
}

UserChannel make_user_channel(int user_id, std::vector<cd> taps, const Numerology& numerology) {
    UserChannel u;
    u.user_id = user_id;
    u.taps = std::move(taps);
    u.response = diag_channel_response(u.taps, numerology.n_sc);
    u.gain.resize(static_cast<std::size_t>(numerology.n_sc));
    for (int n = 0; n < numerology.n_sc; ++n) u.gain[n] = std::norm(u.response(n));
    return u;
}

ChannelRealization realize_all_users(const SystemConfig& cfg, std::uint64_t seed) {
    ChannelRealization ch;
    ch.seed = seed;
    // All numerologies span the band, so every user samples at B.
    const double fs = cfg.bandwidth_hz;
    for (const auto& u : cfg.users) {
        auto taps = draw_eva_channel(derive_seed(seed, static_cast<std::uint64_t>(u.id)), fs);
        ch.users.push_back(make_user_channel(u.id, std::move(taps), u.numerology));
    }
    return ch;
}

void write_channel_dump(std::ostream& os, const std::string& label, const ChannelRealization& ch) {
    os << std::setprecision(17);
    for (const auto& u : ch.users) {
        os << label << ',' << u.user_id << ',' << u.taps.size();
        for (const auto& t : u.taps) os << ',' << t.real() << ',' << t.imag();
        os << '\n';
    }
}

}  // namespace mnoma
