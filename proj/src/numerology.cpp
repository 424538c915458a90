#include "mnoma/numerology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mnoma {

namespace {

Rational reduce(std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

Rational operator*(const Rational& a, const Rational& b) {
    return reduce(a.num * b.num, a.den * b.den);
}

Rational delta_ratio(const Numerology& i, const Numerology& j) { return reduce(i.q, j.q); }

int reference_cp_length(int reference_fft, int max_mu, double cp_fraction) {
    if (reference_fft <= 0 || max_mu < 0 || cp_fraction <= 0.0) {
        throw ConfigError("reference_cp_length: invalid arguments");
    }
    const int step = 1 << max_mu;
    const double target = cp_fraction * reference_fft;
    const int blocks = std::max(1, static_cast<int>(std::lround(target / step)));
    return blocks * step;
}

Numerology make_numerology(int mu, int reference_fft, int reference_cp,
                           double reference_spacing_hz) {
    if (mu < 0 || mu > 16) throw ConfigError("numerology exponent out of range");
    const int q = 1 << mu;
    if (reference_fft % q != 0 || reference_cp % q != 0) {
        throw ConfigError("numerology mu=" + std::to_string(mu) +
                          " does not divide the reference DFT/CP sizes");
    }
    Numerology n;
    n.mu = mu;
    n.q = q;
    n.delta_f = reference_spacing_hz * q;
    n.n_sc = reference_fft / q;
    n.n_cp = reference_cp / q;
    return n;
}

double noise_var_from_snr_db(double snr_db, double power_per_subcarrier) {
    return power_per_subcarrier / std::pow(10.0, snr_db / 10.0);
}

void validate(const SystemConfig& cfg) {
    if (cfg.users.empty()) throw ConfigError("system has no users");
    if (cfg.u_limit < 1) throw ConfigError("u_limit must be >= 1");
    if (!(cfg.noise_var > 0.0) || !std::isfinite(cfg.noise_var)) {
        throw ConfigError("noise variance must be positive");
    }
    if (cfg.r_min < 0.0) throw ConfigError("r_min must be non-negative");
    const int span = cfg.base.q * cfg.base.n_tot();
    std::set<int> ids;
    for (const auto& u : cfg.users) {
        const auto& n = u.numerology;
        if (!ids.insert(u.id).second) throw ConfigError("duplicate user id " + std::to_string(u.id));
        if (n.q != (1 << n.mu)) throw ConfigError("q != 2^mu");
        if (n.q < cfg.base.q) throw ConfigError("user spacing below the base numerology");
        if (n.n_sc * (n.q / cfg.base.q) != cfg.base.n_sc) {
            throw ConfigError("n_sc != N_base / q");
        }
        if (n.n_cp <= 0 || n.n_cp >= n.n_sc) throw ConfigError("CP length must be in (0, n_sc)");
        if (n.q * n.n_tot() != span) throw ConfigError("numerology symbols are not time aligned");
        if (std::abs(n.n_sc * n.delta_f - cfg.bandwidth_hz) > 1e-6 * cfg.bandwidth_hz) {
            throw ConfigError("user does not span the full band");
        }
        if (!(u.power_budget > 0.0)) throw ConfigError("power budget must be positive");
    }
    if (!is_power_of_two(cfg.base.q)) throw ConfigError("base q must be a power of two");
}

SystemConfig build_system(const SystemParams& params) {
    if (params.user_mu.empty()) throw ConfigError("user_mu is empty");
    if (!params.user_ids.empty() && params.user_ids.size() != params.user_mu.size()) {
        throw ConfigError("user_ids and user_mu differ in length");
    }
    if (!is_power_of_two(params.reference_fft)) throw ConfigError("reference_fft must be 2^k");
    if (params.power_per_subcarrier <= 0.0) throw ConfigError("power_per_subcarrier must be > 0");
    const auto [min_mu, max_mu] =
        std::minmax_element(params.user_mu.begin(), params.user_mu.end());
    if (*min_mu < 0) throw ConfigError("negative numerology exponent");
    const int ref_cp = params.reference_cp > 0
                           ? params.reference_cp
                           : reference_cp_length(params.reference_fft, *max_mu, params.cp_fraction);

    SystemConfig cfg;
    cfg.bandwidth_hz = params.reference_fft * params.reference_spacing_hz;
    cfg.base = make_numerology(*min_mu, params.reference_fft, ref_cp, params.reference_spacing_hz);
    cfg.noise_var = noise_var_from_snr_db(params.snr_db, params.power_per_subcarrier);
    cfg.u_limit = params.u_limit;
    cfg.r_min = params.r_min;
    for (std::size_t k = 0; k < params.user_mu.size(); ++k) {
        UserSpec u;
        u.id = params.user_ids.empty() ? static_cast<int>(k) : params.user_ids[k];
        u.numerology = make_numerology(params.user_mu[k], params.reference_fft, ref_cp,
                                       params.reference_spacing_hz);
        u.power_budget = u.numerology.n_sc * params.power_per_subcarrier;
        cfg.users.push_back(u);
    }
    validate(cfg);
    return cfg;
}

std::vector<SubcarrierUser> base_subcarrier_users(int n, const SystemConfig& cfg) {
    if (n < 0 || n >= cfg.base_size()) {
        throw std::out_of_range("base subcarrier index " + std::to_string(n) + " out of range");
    }
    std::vector<SubcarrierUser> out;
    for (std::size_t i = 0; i < cfg.users.size(); ++i) {
        const int step = cfg.grid_step(i);
        if (n % step == 0) out.push_back({i, n / step});
    }
    return out;
}

SystemConfig reorder_users(const SystemConfig& cfg, const std::vector<std::size_t>& order) {
    if (order.size() != cfg.users.size()) throw ConfigError("reorder: size mismatch");
    SystemConfig out = cfg;
    std::vector<bool> seen(order.size(), false);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k] >= order.size() || seen[order[k]]) throw ConfigError("reorder: not a permutation");
        seen[order[k]] = true;
        out.users[k] = cfg.users[order[k]];
    }
    return out;
}

}  // namespace mnoma
