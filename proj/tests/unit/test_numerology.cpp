#include <doctest.h>

#include <cmath>

#include "mnoma/numerology.hpp"
#include "support.hpp"

using namespace mnoma;

TEST_CASE("reference CP length rounds to a multiple of 2^max_mu") {
    CHECK(reference_cp_length(512, 2, 0.07) == 36);  // 35.84
    CHECK(reference_cp_length(128, 2, 0.07) == 8);   // 8.96
    CHECK(reference_cp_length(64, 2, 0.07) == 4);    // 4.48
    CHECK(reference_cp_length(64, 0, 0.07) == 4);
    CHECK(reference_cp_length(8, 3, 0.07) == 8);     // never below one block
    CHECK_THROWS_AS(reference_cp_length(0, 2, 0.07), ConfigError);
}

TEST_CASE("numerologies of one system are time aligned") {
    const auto cfg = test::small_system({0, 1, 2}, 512);
    CHECK(cfg.bandwidth_hz == doctest::Approx(7.68e6));
    const int span = cfg.users[0].numerology.n_tot();
    for (const auto& u : cfg.users) {
        const auto& n = u.numerology;
        CHECK(n.q == (1 << n.mu));
        CHECK(n.delta_f == doctest::Approx(15e3 * n.q));
        CHECK(n.n_sc * n.q == 512);
        CHECK(n.q * n.n_tot() == span);
        CHECK(u.power_budget == doctest::Approx(n.n_sc));
    }
    CHECK(cfg.users[0].numerology.n_cp == 36);
    CHECK(cfg.users[2].numerology.n_cp == 9);
}

TEST_CASE("base numerology is the smallest spacing present") {
    const auto cfg = test::small_system({2, 1}, 64);
    CHECK(cfg.base.mu == 1);
    CHECK(cfg.base_size() == 32);
    CHECK(cfg.grid_step(0) == 2);
    CHECK(cfg.grid_step(1) == 1);
}

TEST_CASE("noise variance follows the per-subcarrier SNR") {
    CHECK(noise_var_from_snr_db(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(noise_var_from_snr_db(10.0, 1.0) == doctest::Approx(0.1));
    CHECK(noise_var_from_snr_db(20.0, 2.0) == doctest::Approx(0.02));
}

TEST_CASE("delta_ratio") {
    const auto n0 = make_numerology(0, 512, 36, 15e3);
    const auto n1 = make_numerology(1, 512, 36, 15e3);
    const auto n2 = make_numerology(2, 512, 36, 15e3);
    CHECK(delta_ratio(n0, n0) == Rational{1, 1});
    CHECK(delta_ratio(n2, n0) == Rational{4, 1});
    CHECK(delta_ratio(n0, n1) == Rational{1, 2});
    CHECK(delta_ratio(n0, n1).value() == 0.5);
    CHECK((delta_ratio(n2, n1) * delta_ratio(n1, n0)) == delta_ratio(n2, n0));
}

TEST_CASE("base_subcarrier_users") {
    const auto cfg = test::small_system({0, 1, 2, 0}, 64);
    const auto all = base_subcarrier_users(0, cfg);
    CHECK(all.size() == 4);
    for (const auto& su : all) CHECK(su.own_index == 0);

    const auto one = base_subcarrier_users(1, cfg);
    REQUIRE(one.size() == 2);
    CHECK(one[0].user == 0);
    CHECK(one[1].user == 3);

    const auto two = base_subcarrier_users(2, cfg);
    REQUIRE(two.size() == 3);
    CHECK(two[0].user == 0);
    CHECK(two[0].own_index == 2);
    CHECK(two[1].user == 1);
    CHECK(two[1].own_index == 1);
    CHECK(two[2].user == 3);

    CHECK_THROWS_AS(base_subcarrier_users(64, cfg), std::out_of_range);
}

TEST_CASE("every user subcarrier maps to exactly one base subcarrier") {
    const auto cfg = test::small_system({2, 0, 1}, 64);
    for (std::size_t i = 0; i < cfg.num_users(); ++i) {
        int hits = 0;
        for (int n = 0; n < cfg.base_size(); ++n) {
            for (const auto& su : base_subcarrier_users(n, cfg)) hits += su.user == i;
        }
        CHECK(hits == cfg.numerology(i).n_sc);
    }
}

TEST_CASE("reorder_users permutes and rejects non-permutations") {
    const auto cfg = test::small_system({0, 1, 2}, 64);
    const auto r = reorder_users(cfg, {2, 0, 1});
    CHECK(r.users[0].id == 2);
    CHECK(r.users[1].id == 0);
    CHECK(r.users[0].numerology == cfg.users[2].numerology);
    CHECK_THROWS_AS(reorder_users(cfg, {0, 0, 1}), ConfigError);
    CHECK_THROWS_AS(reorder_users(cfg, {0, 1}), ConfigError);
}

TEST_CASE("invalid configurations are rejected") {
    SystemParams p;
    p.user_mu = {};
    CHECK_THROWS_AS(build_system(p), ConfigError);
    p.user_mu = {0, 1};
    p.reference_fft = 100;
    CHECK_THROWS_AS(build_system(p), ConfigError);
    p.reference_fft = 64;
    p.user_ids = {3, 3};
    CHECK_THROWS_AS(build_system(p), ConfigError);
    p.user_ids = {};
    p.u_limit = 0;
    CHECK_THROWS_AS(build_system(p), ConfigError);
    p.u_limit = 2;
    p.r_min = -1.0;
    CHECK_THROWS_AS(build_system(p), ConfigError);
}
