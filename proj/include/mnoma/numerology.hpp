#pragma once

// Numerology parameters and the cross-numerology subcarrier index algebra.
//
// A numerology with exponent mu has subcarrier spacing base_spacing * 2^mu,
// DFT size N = B / spacing and CP length scaled by the same factor, so that
// q * (N + N_cp) is identical for every numerology of one system.
//
// "User index" below always means the position of a user in SIC decoding
// order (0 is decoded first). The stable label of a user is its id.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnoma {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Numerology {
    int mu = 0;
    int q = 1;              // 2^mu
    double delta_f = 0.0;   // subcarrier spacing, Hz
    int n_sc = 0;           // DFT size
    int n_cp = 0;           // CP length, samples

    int n_tot() const { return n_sc + n_cp; }
    friend bool operator==(const Numerology&, const Numerology&) = default;
};

struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator*(const Rational& a, const Rational& b);

// q_i / q_j in lowest terms.
Rational delta_ratio(const Numerology& i, const Numerology& j);

struct UserSpec {
    int id = 0;
    Numerology numerology;
    double power_budget = 0.0;  // W, summed over the user's subcarriers
};

struct SystemConfig {
    double bandwidth_hz = 0.0;
    Numerology base;               // smallest spacing present
    std::vector<UserSpec> users;   // SIC decoding order
    double noise_var = 1.0;        // per sample == per subcarrier (unitary DFT)
    int u_limit = 2;
    double r_min = 0.0;            // bps/Hz, applied as R_i >= r_min * B

    std::size_t num_users() const { return users.size(); }
    int base_size() const { return base.n_sc; }
    const Numerology& numerology(std::size_t user) const { return users.at(user).numerology; }
    // Stride of user `user` on the base subcarrier grid.
    int grid_step(std::size_t user) const { return users.at(user).numerology.q / base.q; }
};

// Throws ConfigError on any broken invariant.
void validate(const SystemConfig& cfg);

struct SystemParams {
    int reference_fft = 512;            // DFT size of mu = 0
    double reference_spacing_hz = 15e3; // spacing of mu = 0
    double cp_fraction = 0.07;
    int reference_cp = 0;               // 0 -> derived from cp_fraction
    std::vector<int> user_mu;           // one per user, in decoding order
    std::vector<int> user_ids;          // empty -> 0..K-1
    double power_per_subcarrier = 1.0;  // W; P_i = N_i * this
    double snr_db = 10.0;               // per-subcarrier SNR at power_per_subcarrier
    int u_limit = 2;
    double r_min = 0.5;
};

// CP length of the mu = 0 numerology: cp_fraction * fft rounded to the
// nearest positive multiple of 2^max_mu, so every scaled CP is an integer.
int reference_cp_length(int reference_fft, int max_mu, double cp_fraction);

Numerology make_numerology(int mu, int reference_fft, int reference_cp,
                           double reference_spacing_hz);

SystemConfig build_system(const SystemParams& params);

double noise_var_from_snr_db(double snr_db, double power_per_subcarrier);

struct SubcarrierUser {
    std::size_t user = 0;  // decoding-order index
    int own_index = 0;     // the user's own subcarrier index
};

// Users whose subcarrier grid contains base index n (n mod q_i == 0).
std::vector<SubcarrierUser> base_subcarrier_users(int n, const SystemConfig& cfg);

// Same config with users permuted: new position k holds old user order[k].
SystemConfig reorder_users(const SystemConfig& cfg, const std::vector<std::size_t>& order);

}  // namespace mnoma
