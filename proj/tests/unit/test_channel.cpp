#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mnoma/channel.hpp"
#include "support.hpp"

using namespace mnoma;

TEST_CASE("EVA profile") {
    const auto& pdp = eva_profile();
    CHECK(pdp.delays_ns.size() == 9);
    CHECK(pdp.delays_ns.back() == 2510.0);
    CHECK(pdp.powers_db.front() == 0.0);
}

TEST_CASE("sampled profile at 7.68 MHz") {
    const auto prof = sampled_profile(eva_profile(), 7.68e6);
    CHECK(prof.size() == 20);
    CHECK(prof.back() > 0.0);
    CHECK(std::accumulate(prof.begin(), prof.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    // Independent binning: round(delay * fs), linear powers summed per bin.
    const auto& pdp = eva_profile();
    std::vector<double> bins(20, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < pdp.delays_ns.size(); ++k) {
        const double lin = std::pow(10.0, pdp.powers_db[k] / 10.0);
        bins[static_cast<std::size_t>(std::round(pdp.delays_ns[k] * 7.68e-3))] += lin;
        total += lin;
    }
    for (std::size_t l = 0; l < 20; ++l) CHECK(prof[l] == doctest::Approx(bins[l] / total));
    const std::set<std::size_t> occupied{0, 1, 2, 3, 5, 8, 13, 19};
    for (std::size_t l = 0; l < 20; ++l) CHECK((prof[l] > 0.0) == (occupied.count(l) == 1));
}

TEST_CASE("sampled profile merges taps that share a bin") {
    // 0.96 MHz: 0, 30, 150, 310, 370 ns all round to bin 0.
    const auto prof = sampled_profile(eva_profile(), 0.96e6);
    CHECK(prof.size() == 3);
    CHECK(std::accumulate(prof.begin(), prof.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prof[0] > 0.8);
    CHECK_THROWS_AS(sampled_profile(eva_profile(), 0.0), std::invalid_argument);
}

TEST_CASE("channel draws are deterministic per seed") {
    const auto a = draw_eva_channel(42, 7.68e6);
    const auto b = draw_eva_channel(42, 7.68e6);
    const auto c = draw_eva_channel(43, 7.68e6);
    CHECK(a.size() == 20);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("mean subcarrier gain is one") {
    const auto cfg = test::small_system({0}, 64);
    double acc = 0.0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        const auto ch = realize_all_users(cfg, static_cast<std::uint64_t>(d));
        acc += ch.users[0].gain[5];
    }
    // |h|^2 is exponential with mean 1: standard error 0.01.
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.04));
}

TEST_CASE("realize_all_users") {
    const auto one = test::small_system({1}, 64);
    const auto ch1 = realize_all_users(one, 5);
    REQUIRE(ch1.users.size() == 1);
    CHECK(ch1.users[0].response.size() == 32);
    CHECK(ch1.users[0].gain.size() == 32);
    for (int n = 0; n < 32; ++n) CHECK(ch1.users[0].gain[n] == doctest::Approx(std::norm(ch1.users[0].response(n))));

    const auto cfg = test::small_system({0, 1, 2}, 64);
    const auto perm = reorder_users(cfg, {2, 0, 1});
    const auto a = realize_all_users(cfg, 9);
    const auto b = realize_all_users(perm, 9);
    CHECK(b.users[0].user_id == 2);
    CHECK(b.users[0].taps == a.users[2].taps);
    CHECK(b.users[1].taps == a.users[0].taps);
    CHECK(b.users[2].taps == a.users[1].taps);
    CHECK(a.users[0].taps != a.users[1].taps);
}

TEST_CASE("derive_seed mixes both words") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(7, k));
    CHECK(seen.size() == 1000);
}

TEST_CASE("channel dump has one line per user") {
    const auto cfg = test::small_system({0, 1}, 64);
    const auto ch = realize_all_users(cfg, 3);
    std::ostringstream os;
    write_channel_dump(os, "t0", ch);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) {
        ++lines;
        CHECK(line.rfind("t0,", 0) == 0);
    }
    CHECK(lines == 2);
}
