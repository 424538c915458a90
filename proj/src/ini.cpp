#include "mnoma/ini.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "mnoma/kernels.hpp"

namespace mnoma {

namespace {

using RowMajorCMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_vectors(const Numerology& interferer, std::span<const double> x,
                   std::span<const double> p) {
    const auto n = static_cast<std::size_t>(interferer.n_sc);
    if (x.size() != n || p.size() != n) {
        throw std::invalid_argument("interferer x/p vectors must have length N_j");
    }
}

// A_j F_j^H diag(x) diag(sqrt p)
CMatrix modulator(const Numerology& j, std::span<const double> x, std::span<const double> p) {
    CMatrix m = cp_add_matrix(j.n_sc, j.n_cp) * dft_matrix(j.n_sc).adjoint();
    for (int o = 0; o < j.n_sc; ++o) m.col(o) *= x[o] * std::sqrt(p[o]);
    return m;
}

// exp(j 2 pi k / n) / sqrt(n), k reduced first.
cd subcarrier_sample(long long k, int n) {
    const long long r = ((k % n) + n) % n;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / n;
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    return {s * std::cos(angle), s * std::sin(angle)};
}

// Received samples [first, first + count) of the CP-OFDM waveform of
// interferer subcarrier o (unit amplitude) starting at sample `offset`,
// after the causal channel with zero initial state.
void received_segment(const Numerology& j, int o, int offset, std::span<const cd> taps, int first,
                      int count, cd* out) {
    const int ntot = j.n_tot();
    for (int k = 0; k < count; ++k) {
        const int t = first + k;
        cd acc = 0.0;
        for (std::size_t l = 0; l < taps.size(); ++l) {
            const int u = t - static_cast<int>(l) - offset;
            if (u < 0 || u >= ntot) continue;
            acc += taps[l] * subcarrier_sample(static_cast<long long>(o) * (u - j.n_cp), j.n_sc);
        }
        out[k] = acc;
    }
}

}  // namespace

CMatrix interference_matrix_narrow_victim(const Numerology& victim, const Numerology& interferer,
                                          std::span<const cd> taps, std::span<const double> x,
                                          std::span<const double> p) {
    if (victim.q > interferer.q) {
        throw std::invalid_argument("narrow-victim formula needs spacing_i <= spacing_j");
    }
    check_vectors(interferer, x, p);
    const int delta = interferer.q / victim.q;
    const int span = delta * interferer.n_tot();
    if (span != victim.n_tot()) throw std::invalid_argument("numerologies are not time aligned");

    const CMatrix mod = modulator(interferer, x, p);
    CMatrix stacked = CMatrix::Zero(span, static_cast<Eigen::Index>(delta) * interferer.n_sc);
    for (int m = 0; m < delta; ++m) {
        stacked.block(m * interferer.n_tot(), m * interferer.n_sc, interferer.n_tot(),
                      interferer.n_sc) = mod;
    }
    return dft_matrix(victim.n_sc) * cp_remove_matrix(victim.n_sc, victim.n_cp) *
           toeplitz_channel(taps, span) * stacked;
}

CMatrix interference_matrix_wide_victim(const Numerology& victim, const Numerology& interferer,
                                        int m, std::span<const cd> taps,
                                        std::span<const double> x, std::span<const double> p) {
    if (victim.q < interferer.q) {
        throw std::invalid_argument("wide-victim formula needs spacing_i >= spacing_j");
    }
    check_vectors(interferer, x, p);
    const int delta = victim.q / interferer.q;
    if (m < 1 || m > delta) throw std::invalid_argument("symbol position m out of range");
    if (delta * victim.n_tot() != interferer.n_tot()) {
        throw std::invalid_argument("numerologies are not time aligned");
    }
    return dft_matrix(victim.n_sc) * cp_remove_matrix(victim.n_sc, victim.n_cp) *
           window_selector(m, victim.n_tot(), delta) *
           toeplitz_channel(taps, interferer.n_tot()) * modulator(interferer, x, p);
}

std::vector<double> mse_vector(const CMatrix& gamma) {
    std::vector<double> out(static_cast<std::size_t>(gamma.rows()), 0.0);
    for (Eigen::Index r = 0; r < gamma.rows(); ++r) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < gamma.cols(); ++c) acc += std::norm(gamma(r, c));
        out[r] = acc;
    }
    return out;
}

void CoefficientMatrix::accumulate(std::span<const double> v, std::span<double> out) const {
    if (v.size() != cols_ || out.size() != rows_) {
        throw std::invalid_argument("CoefficientMatrix::accumulate: shape mismatch");
    }
    kernels::active().gemv_accumulate(data_.data(), rows_, cols_, cols_, v.data(), out.data());
}

IniTable::IniTable(std::size_t num_users)
    : num_users_(num_users), blocks_(num_users * num_users) {}

const CoefficientMatrix& IniTable::coefficients(std::size_t victim, std::size_t interferer) const {
    if (victim >= num_users_ || interferer >= num_users_ || victim == interferer) {
        throw std::out_of_range("IniTable: invalid user pair");
    }
    const auto& block = blocks_[victim * num_users_ + interferer];
    if (!block) throw std::logic_error("IniTable: pair not populated");
    return *block;
}

void IniTable::set(std::size_t victim, std::size_t interferer,
                   std::shared_ptr<const CoefficientMatrix> coefficients) {
    if (victim >= num_users_ || interferer >= num_users_ || victim == interferer) {
        throw std::out_of_range("IniTable: invalid user pair");
    }
    blocks_[victim * num_users_ + interferer] = std::move(coefficients);
}

std::vector<double> IniTable::interference(std::size_t victim, std::size_t interferer,
                                           std::span<const double> x,
                                           std::span<const double> p) const {
    const auto& c = coefficients(victim, interferer);
    if (x.size() != c.cols() || p.size() != c.cols()) {
        throw std::invalid_argument("IniTable::interference: vector length mismatch");
    }
    std::vector<double> xp(c.cols());
    kernels::active().multiply(x.data(), p.data(), xp.size(), xp.data());
    std::vector<double> out(c.rows(), 0.0);
    c.accumulate(xp, out);
    return out;
}

IniTable IniTable::zeros(const SystemConfig& cfg) {
    IniTable t(cfg.num_users());
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        for (std::size_t j = 0; j < cfg.num_users(); ++j) {
            if (i == j) continue;
            t.set(i, j,
                  std::make_shared<CoefficientMatrix>(cfg.numerology(i).n_sc,
                                                      cfg.numerology(j).n_sc));
        }
    }
    return t;
}

CoefficientMatrix unit_coefficients(const Numerology& victim, const Numerology& interferer,
                                    std::span<const cd> taps) {
    if (taps.empty()) throw std::invalid_argument("unit_coefficients: no taps");
    const int ni = victim.n_sc;
    const int nj = interferer.n_sc;
    CoefficientMatrix coef(ni, nj);
    const CMatrix f = dft_matrix(ni);
    const auto& k = kernels::active();

    if (victim.q <= interferer.q) {
        const int delta = interferer.q / victim.q;
        if (delta * interferer.n_tot() != victim.n_tot()) {
            throw std::invalid_argument("numerologies are not time aligned");
        }
        if (static_cast<int>(taps.size()) > victim.n_tot()) {
            throw std::invalid_argument("taps longer than the victim symbol");
        }
        // Post-CP-removal victim samples, one column per (symbol m, subcarrier o).
        CMatrix t(ni, static_cast<Eigen::Index>(delta) * nj);
        std::vector<cd> seg(static_cast<std::size_t>(ni));
        for (int m = 0; m < delta; ++m) {
            for (int o = 0; o < nj; ++o) {
                received_segment(interferer, o, m * interferer.n_tot(), taps, victim.n_cp, ni,
                                 seg.data());
                t.col(m * nj + o) = Eigen::Map<const CVector>(seg.data(), ni);
            }
        }
        const RowMajorCMatrix gamma = f * t;
        for (int n = 0; n < ni; ++n) {
            for (int m = 0; m < delta; ++m) {
                k.accumulate_abs2(gamma.row(n).data() + static_cast<std::ptrdiff_t>(m) * nj, nj,
                                  1.0, coef.row(n));
            }
        }
    } else {
        const int delta = victim.q / interferer.q;
        if (delta * victim.n_tot() != interferer.n_tot()) {
            throw std::invalid_argument("numerologies are not time aligned");
        }
        if (static_cast<int>(taps.size()) > interferer.n_tot()) {
            throw std::invalid_argument("taps longer than the interferer symbol");
        }
        const double weight = 1.0 / delta;
        CMatrix t(ni, nj);
        std::vector<cd> seg(static_cast<std::size_t>(ni));
        for (int m = 0; m < delta; ++m) {
            for (int o = 0; o < nj; ++o) {
                received_segment(interferer, o, 0, taps, m * victim.n_tot() + victim.n_cp, ni,
                                 seg.data());
                t.col(o) = Eigen::Map<const CVector>(seg.data(), ni);
            }
            const RowMajorCMatrix gamma = f * t;
            for (int n = 0; n < ni; ++n) k.accumulate_abs2(gamma.row(n).data(), nj, weight, coef.row(n));
        }
    }
    return coef;
}

IniTable build_ini_table(const SystemConfig& cfg, const ChannelRealization& channels) {
    const std::size_t k = cfg.num_users();
    if (channels.users.size() != k) {
        throw std::invalid_argument("build_ini_table: one channel per user required");
    }
    IniTable table(k);
    if (k < 2) return table;
    for (std::size_t j = 0; j < k; ++j) {
        // Coefficients depend on the victim only through its numerology.
        std::map<int, std::shared_ptr<const CoefficientMatrix>> by_mu;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == j) continue;
            const auto& nv = cfg.numerology(i);
            auto it = by_mu.find(nv.mu);
            if (it == by_mu.end()) {
                auto block = std::make_shared<const CoefficientMatrix>(
                    unit_coefficients(nv, cfg.numerology(j), channels.users[j].taps));
                it = by_mu.emplace(nv.mu, std::move(block)).first;
            }
            table.set(i, j, it->second);
        }
    }
    return table;
}

std::vector<double> monte_carlo_ini_oracle(const Numerology& victim, const Numerology& interferer,
                                           std::span<const cd> taps, std::span<const double> x,
                                           std::span<const double> p, int n_draws,
                                           std::uint64_t seed) {
    if (n_draws < 1) throw std::invalid_argument("monte_carlo_ini_oracle: n_draws >= 1");
    check_vectors(interferer, x, p);
    const int ni = victim.n_sc;
    const int nj = interferer.n_sc;
    const bool narrow = victim.q <= interferer.q;
    const int delta = narrow ? interferer.q / victim.q : victim.q / interferer.q;
    const int span = narrow ? victim.n_tot() : interferer.n_tot();
    const int symbols = narrow ? delta : 1;

    // Twiddle tables for direct (I)DFTs.
    std::vector<cd> wj(static_cast<std::size_t>(nj)), wi(static_cast<std::size_t>(ni));
    for (int k = 0; k < nj; ++k) {
        const double a = 2.0 * std::numbers::pi * k / nj;
        wj[k] = {std::cos(a), std::sin(a)};
    }
    for (int k = 0; k < ni; ++k) {
        const double a = -2.0 * std::numbers::pi * k / ni;
        wi[k] = {std::cos(a), std::sin(a)};
    }
    std::vector<double> amp(static_cast<std::size_t>(nj));
    std::vector<int> live;
    for (int o = 0; o < nj; ++o) {
        amp[o] = x[o] * std::sqrt(p[o]);
        if (amp[o] != 0.0) live.push_back(o);
    }
    const double sj = 1.0 / std::sqrt(static_cast<double>(nj));
    const double si = 1.0 / std::sqrt(static_cast<double>(ni));

    std::mt19937_64 rng(seed);
    std::vector<cd> tx(static_cast<std::size_t>(span)), rx(static_cast<std::size_t>(span));
    std::vector<cd> data(static_cast<std::size_t>(nj));
    std::vector<double> acc(static_cast<std::size_t>(ni), 0.0);
    if (live.empty()) return acc;
    const double h = std::sqrt(0.5);

    for (int draw = 0; draw < n_draws; ++draw) {
        std::fill(tx.begin(), tx.end(), cd{});
        for (int s = 0; s < symbols; ++s) {
            for (int o : live) {
                const auto bits = rng();
                data[o] = amp[o] * cd{(bits & 1) ? h : -h, (bits & 2) ? h : -h};
            }
            cd* sym = tx.data() + static_cast<std::ptrdiff_t>(s) * interferer.n_tot();
            for (int t = 0; t < nj; ++t) {
                cd v = 0.0;
                for (int o : live) v += data[o] * wj[(static_cast<long long>(o) * t) % nj];
                sym[interferer.n_cp + t] = sj * v;
            }
            for (int t = 0; t < interferer.n_cp; ++t) sym[t] = sym[nj + t];
        }
        for (int t = 0; t < span; ++t) {
            cd v = 0.0;
            for (std::size_t l = 0; l < taps.size() && static_cast<int>(l) <= t; ++l) {
                v += taps[l] * tx[t - l];
            }
            rx[t] = v;
        }
        const int windows = narrow ? 1 : delta;
        const double wscale = 1.0 / windows;
        for (int m = 0; m < windows; ++m) {
            const cd* seg = rx.data() + static_cast<std::ptrdiff_t>(m) * victim.n_tot() + victim.n_cp;
            for (int n = 0; n < ni; ++n) {
                cd v = 0.0;
                for (int t = 0; t < ni; ++t) v += seg[t] * wi[(static_cast<long long>(n) * t) % ni];
                acc[n] += wscale * std::norm(si * v);
            }
        }
    }
    for (double& a : acc) a /= n_draws;
    return acc;
}

void write_ini_table_csv(std::ostream& os, const SystemConfig& cfg, const IniTable& table) {
    os << "victim_id,interferer_id,n,o,coefficient\n" << std::setprecision(17);
    for (std::size_t i = 0; i < table.num_users(); ++i) {
        for (std::size_t j = 0; j < table.num_users(); ++j) {
            if (i == j) continue;
            const auto& c = table.coefficients(i, j);
            for (std::size_t n = 0; n < c.rows(); ++n) {
                for (std::size_t o = 0; o < c.cols(); ++o) {
                    os << cfg.users[i].id << ',' << cfg.users[j].id << ',' << n << ',' << o << ','
                       << c(n, o) << '\n';
                }
            }
        }
    }
}

}  // namespace mnoma
