#pragma once

// Inter-numerology interference.
//
// For a victim user i and an interferer j the interference on victim
// subcarrier n is gamma_n = sum_o C(n, o) * x_j[o] * p_j[o], where the
// unit-power coefficient C(n, o) = |Gamma(n, o)|^2 is taken from the
// interference matrix built with x = 1, p = 1:
//   - narrow victim (spacing_i <= spacing_j): the victim symbol overlaps
//     Delta = q_j / q_i interferer symbols carrying independent data, so the
//     coefficients of the Delta column blocks are summed;
//   - wide victim (spacing_i > spacing_j): Delta = q_i / q_j victim symbols
//     sit inside one interferer symbol, and the coefficients of the Delta
//     window positions are averaged.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mnoma/channel.hpp"
#include "mnoma/numerology.hpp"
#include "mnoma/sigops.hpp"

namespace mnoma {

// Gamma = F_i R_i H_j [I_Delta (x) (A_j F_j^H diag(x_j) diag(sqrt p_j))],
// H_j spanning the victim symbol (Delta * N_T,j samples). N_i x Delta*N_j.
CMatrix interference_matrix_narrow_victim(const Numerology& victim, const Numerology& interferer,
                                          std::span<const cd> taps, std::span<const double> x,
                                          std::span<const double> p);

// Gamma_m = F_i R_i C_m H_j A_j F_j^H diag(x_j) diag(sqrt p_j), 1 <= m <= Delta.
CMatrix interference_matrix_wide_victim(const Numerology& victim, const Numerology& interferer,
                                        int m, std::span<const cd> taps,
                                        std::span<const double> x, std::span<const double> p);

// diag(Gamma Gamma^H).
std::vector<double> mse_vector(const CMatrix& gamma);

class CoefficientMatrix {
public:
    CoefficientMatrix() = default;
    CoefficientMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    std::span<const double> values() const { return data_; }

    // out[n] += sum_o C(n, o) * v[o]
    void accumulate(std::span<const double> v, std::span<double> out) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Unit-power coefficients for every ordered pair of distinct users. Pairs
// whose victims share a numerology share storage.
class IniTable {
public:
    IniTable() = default;
    explicit IniTable(std::size_t num_users);

    std::size_t num_users() const { return num_users_; }
    bool empty() const { return num_users_ < 2; }
    const CoefficientMatrix& coefficients(std::size_t victim, std::size_t interferer) const;
    void set(std::size_t victim, std::size_t interferer,
             std::shared_ptr<const CoefficientMatrix> coefficients);

    // gamma^(victim <- interferer) for the given x_j, p_j.
    std::vector<double> interference(std::size_t victim, std::size_t interferer,
                                     std::span<const double> x, std::span<const double> p) const;

    // Same shapes, all coefficients zero.
    static IniTable zeros(const SystemConfig& cfg);

private:
    std::size_t num_users_ = 0;
    std::vector<std::shared_ptr<const CoefficientMatrix>> blocks_;
};

// Unit-power coefficients of interferer (numerology, taps) seen by a victim
// numerology.
CoefficientMatrix unit_coefficients(const Numerology& victim, const Numerology& interferer,
                                    std::span<const cd> taps);

IniTable build_ini_table(const SystemConfig& cfg, const ChannelRealization& channels);

// Time-domain simulation of the interferer -> victim chain with i.i.d.
// unit-power QPSK data; returns the empirical per-subcarrier interference
// power at the victim DFT output (averaged over window positions for a wide
// victim). Shares no code with the matrix route above.
std::vector<double> monte_carlo_ini_oracle(const Numerology& victim, const Numerology& interferer,
                                           std::span<const cd> taps, std::span<const double> x,
                                           std::span<const double> p, int n_draws,
                                           std::uint64_t seed);

// CSV dump of every coefficient: victim_id,interferer_id,n,o,coefficient
void write_ini_table_csv(std::ostream& os, const SystemConfig& cfg, const IniTable& table);

}  // namespace mnoma
