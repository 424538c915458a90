#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mnoma/sigops.hpp"

using namespace mnoma;

namespace {

std::vector<cd> random_taps(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cd> t(n);
    for (auto& v : t) v = {g(rng), g(rng)};
    return t;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("dft_matrix") {
    const auto f1 = dft_matrix(1);
    CHECK(f1.rows() == 1);
    CHECK(std::abs(f1(0, 0) - cd(1.0)) < 1e-15);

    const auto f2 = dft_matrix(2);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f2(0, 0) - cd(r)) < 1e-15);
    CHECK(std::abs(f2(0, 1) - cd(r)) < 1e-15);
    CHECK(std::abs(f2(1, 0) - cd(r)) < 1e-15);
    CHECK(std::abs(f2(1, 1) - cd(-r)) < 1e-15);

    const auto f8 = dft_matrix(8);
    CHECK(max_abs(f8 * f8.adjoint() - CMatrix::Identity(8, 8)) < 1e-12);
    CHECK(std::abs(f8(1, 1) - std::polar(1.0 / std::sqrt(8.0), -2.0 * std::numbers::pi / 8.0)) < 1e-15);
    CHECK_THROWS_AS(dft_matrix(0), std::invalid_argument);
}

TEST_CASE("CP add and remove") {
    const auto a = cp_add_matrix(8, 2);
    const auto rm = cp_remove_matrix(8, 2);
    CHECK(a.rows() == 10);
    CHECK(a.cols() == 8);
    CHECK(rm.rows() == 8);
    CHECK(rm.cols() == 10);
    CHECK(max_abs(rm * a - CMatrix::Identity(8, 8)) == 0.0);

    const auto a4 = cp_add_matrix(4, 1);
    CHECK(max_abs(a4.row(0) - CMatrix::Identity(4, 4).row(3)) == 0.0);
    CHECK(max_abs(a4.bottomRows(4) - CMatrix::Identity(4, 4)) == 0.0);

    CHECK_THROWS_AS(cp_add_matrix(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(cp_add_matrix(4, 4), std::invalid_argument);
    CHECK_THROWS_AS(cp_remove_matrix(4, 5), std::invalid_argument);
}

TEST_CASE("toeplitz_channel") {
    const std::vector<cd> impulse{cd(1.0)};
    CHECK(max_abs(toeplitz_channel(impulse, 4) - CMatrix::Identity(4, 4)) == 0.0);

    const std::vector<cd> two{cd(1.0), cd(0.5)};
    CMatrix expected = CMatrix::Zero(3, 3);
    expected << 1, 0, 0, 0.5, 1, 0, 0, 0.5, 1;
    CHECK(max_abs(toeplitz_channel(two, 3) - expected) == 0.0);

    CHECK_THROWS_AS(toeplitz_channel({}, 3), std::invalid_argument);
    CHECK_THROWS_AS(toeplitz_channel(random_taps(4, 1), 3), std::invalid_argument);
}

TEST_CASE("toeplitz product equals truncated linear convolution") {
    const auto taps = random_taps(5, 11);
    const auto s = random_taps(12, 12);
    CVector sv(12);
    for (int k = 0; k < 12; ++k) sv(k) = s[static_cast<std::size_t>(k)];
    const CVector y = toeplitz_channel(taps, 12) * sv;
    for (int n = 0; n < 12; ++n) {
        cd acc = 0.0;
        for (int l = 0; l < 5 && l <= n; ++l) acc += taps[static_cast<std::size_t>(l)] * s[static_cast<std::size_t>(n - l)];
        CHECK(std::abs(y(n) - acc) < 1e-12);
    }
}

TEST_CASE("window_selector") {
    CHECK(max_abs(window_selector(1, 5, 1) - CMatrix::Identity(5, 5)) == 0.0);
    const auto c = window_selector(2, 3, 2);
    CMatrix expected = CMatrix::Zero(3, 6);
    expected.rightCols(3) = CMatrix::Identity(3, 3);
    CHECK(max_abs(c - expected) == 0.0);
    CHECK_THROWS_AS(window_selector(0, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(window_selector(3, 3, 2), std::invalid_argument);
}

TEST_CASE("diag_channel_response") {
    const std::vector<cd> impulse{cd(1.0)};
    const auto flat = diag_channel_response(impulse, 8);
    for (int n = 0; n < 8; ++n) CHECK(std::abs(flat(n) - cd(1.0)) < 1e-15);

    const std::vector<cd> delay{cd(0.0), cd(1.0)};
    const auto d = diag_channel_response(delay, 8);
    for (int n = 0; n < 8; ++n) {
        CHECK(std::abs(d(n)) == doctest::Approx(1.0));
        CHECK(std::abs(d(n) - std::polar(1.0, -2.0 * std::numbers::pi * n / 8.0)) < 1e-14);
    }
    CHECK_THROWS_AS(diag_channel_response(random_taps(9, 1), 8), std::invalid_argument);
}

TEST_CASE("F R H A F^H is diagonal when the channel fits in the CP") {
    const int n = 16;
    const int ncp = 4;
    const auto f = dft_matrix(n);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto taps = random_taps(3, seed);
        const CMatrix m =
            f * cp_remove_matrix(n, ncp) * toeplitz_channel(taps, n + ncp) * cp_add_matrix(n, ncp) * f.adjoint();
        const auto h = diag_channel_response(taps, n);
        double off = 0.0;
        double diag = 0.0;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                if (r == c) diag = std::max(diag, std::abs(m(r, c) - h(r)));
                else off = std::max(off, std::abs(m(r, c)));
            }
        }
        CHECK(off < 1e-10);
        CHECK(diag < 1e-10);
    }

    const std::vector<cd> impulse{cd(1.0)};
    const CMatrix ident =
        f * cp_remove_matrix(n, ncp) * toeplitz_channel(impulse, n + ncp) * cp_add_matrix(n, ncp) * f.adjoint();
    CHECK(max_abs(ident - CMatrix::Identity(n, n)) < 1e-12);
}
