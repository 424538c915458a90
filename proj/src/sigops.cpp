#include "mnoma/sigops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mnoma {

namespace {

// exp(-j 2 pi k / n) with k reduced mod n first so large products stay exact.
cd twiddle(long long k, int n) {
    const long long r = ((k % n) + n) % n;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / n;
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

CMatrix dft_matrix(int n) {
    if (n < 1) throw std::invalid_argument("dft_matrix: size must be >= 1");
    CMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) f(l, k) = scale * twiddle(static_cast<long long>(l) * k, n);
    }
    return f;
}

CMatrix cp_add_matrix(int n_sc, int n_cp) {
    if (n_sc < 1 || n_cp <= 0 || n_cp >= n_sc) {
        throw std::invalid_argument("cp_add_matrix: need 0 < n_cp < n_sc");
    }
    CMatrix a = CMatrix::Zero(n_sc + n_cp, n_sc);
    for (int r = 0; r < n_cp; ++r) a(r, n_sc - n_cp + r) = 1.0;
    for (int r = 0; r < n_sc; ++r) a(n_cp + r, r) = 1.0;
    return a;
}

CMatrix cp_remove_matrix(int n_sc, int n_cp) {
    if (n_sc < 1 || n_cp <= 0 || n_cp >= n_sc) {
        throw std::invalid_argument("cp_remove_matrix: need 0 < n_cp < n_sc");
    }
    CMatrix r = CMatrix::Zero(n_sc, n_sc + n_cp);
    for (int k = 0; k < n_sc; ++k) r(k, n_cp + k) = 1.0;
    return r;
}

CMatrix toeplitz_channel(std::span<const cd> taps, int n_tot) {
    if (taps.empty()) throw std::invalid_argument("toeplitz_channel: no taps");
    if (static_cast<int>(taps.size()) > n_tot) {
        throw std::invalid_argument("toeplitz_channel: taps longer than the matrix dimension");
    }
    CMatrix h = CMatrix::Zero(n_tot, n_tot);
    for (int c = 0; c < n_tot; ++c) {
        for (std::size_t l = 0; l < taps.size() && c + static_cast<int>(l) < n_tot; ++l) {
            h(c + static_cast<int>(l), c) = taps[l];
        }
    }
    return h;
}

CMatrix window_selector(int m, int n_tot, int delta) {
    if (delta < 1 || m < 1 || m > delta || n_tot < 1) {
        throw std::invalid_argument("window_selector: need 1 <= m <= delta");
    }
    CMatrix c = CMatrix::Zero(n_tot, static_cast<Eigen::Index>(delta) * n_tot);
    for (int k = 0; k < n_tot; ++k) c(k, (m - 1) * n_tot + k) = 1.0;
    return c;
}

CVector diag_channel_response(std::span<const cd> taps, int n_sc) {
    if (taps.empty() || static_cast<int>(taps.size()) > n_sc) {
        throw std::invalid_argument("diag_channel_response: need 1 <= taps <= n_sc");
    }
    CVector h = CVector::Zero(n_sc);
    for (int n = 0; n < n_sc; ++n) {
        cd acc = 0.0;
        for (std::size_t l = 0; l < taps.size(); ++l) {
            acc += taps[l] * twiddle(static_cast<long long>(n) * static_cast<long long>(l), n_sc);
        }
        h(n) = acc;
    }
    return h;
}

}  // namespace mnoma
