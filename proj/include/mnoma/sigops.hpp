#pragma once

// Dense linear operators of the CP-OFDM signal model. These are the
// reference path: the INI table builder uses a faster structured route and
// is tested against products of these matrices.

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace mnoma {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Unitary DFT, F[l,k] = exp(-j 2 pi l k / n) / sqrt(n).
CMatrix dft_matrix(int n);

// (n_sc + n_cp) x n_sc; the first n_cp rows copy the last n_cp rows of I.
CMatrix cp_add_matrix(int n_sc, int n_cp);

// n_sc x (n_sc + n_cp) = [0 | I].
CMatrix cp_remove_matrix(int n_sc, int n_cp);

// n_tot x n_tot lower-triangular banded Toeplitz matrix with first column
// [taps; 0]. Zero initial state: samples before the block are not seen.
CMatrix toeplitz_channel(std::span<const cd> taps, int n_tot);

// n_tot x (delta * n_tot) selector of block m (1-based).
CMatrix window_selector(int m, int n_tot, int delta);

// Per-subcarrier response sum_l taps[l] exp(-j 2 pi n l / n_sc), the
// diagonal of F R H A F^H when the channel fits in the CP.
CVector diag_channel_response(std::span<const cd> taps, int n_sc);

}  // namespace mnoma
