#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mnoma/baselines.hpp"
#include "support.hpp"

using namespace mnoma;

namespace {

// Water-filling of user i over the subcarriers with x = 1, noise only.
std::vector<double> masked_waterfill(const test::Instance& inst, std::size_t i, const std::vector<double>& x) {
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n] != 0.0) g[n] = inst.channels.users[i].gain[n] / inst.cfg.noise_var;
    }
    return waterfill_single_user(g, inst.cfg.users[i].power_budget);
}

}  // namespace

TEST_CASE("IWF-greedy is the Stage 1 output") {
    const auto inst = test::Instance::random(test::small_system({0, 1, 2, 1}, 32), 3);
    const auto a = iwf_greedy_noma(inst.problem());
    const auto b = greedy_subcarrier_allocation(inst.problem()).alloc;
    CHECK(a.x == b.x);
    CHECK(a.p == b.p);
}

TEST_CASE("IWF-greedy without coupling is per-user water-filling") {
    const auto inst = test::Instance::zero_ini(test::small_system({0, 2}, 32, 10.0, 2), 5);
    const auto a = iwf_greedy_noma(inst.problem());
    for (std::size_t i = 0; i < 2; ++i) {
        const auto wf = masked_waterfill(inst, i, std::vector<double>(a.x[i].size(), 1.0));
        for (std::size_t n = 0; n < wf.size(); ++n) CHECK(a.p[i][n] == doctest::Approx(wf[n]).epsilon(1e-9));
    }
}

TEST_CASE("OMA partition") {
    SystemParams p;
    p.reference_fft = 64;
    p.user_mu = {2, 0, 1, 0, 2};
    p.user_ids = {4, 0, 2, 1, 3};
    const auto cfg = build_system(p);
    const auto parts = oma_partition(cfg);
    REQUIRE(parts.size() == 5);
    // 16 blocks of 4 base subcarriers over 5 users: ids 0 gets 4 blocks, the rest 3.
    CHECK(parts[1] == std::pair<int, int>{0, 16});   // id 0
    CHECK(parts[3] == std::pair<int, int>{16, 28});  // id 1
    CHECK(parts[2] == std::pair<int, int>{28, 40});  // id 2
    CHECK(parts[4] == std::pair<int, int>{40, 52});  // id 3
    CHECK(parts[0] == std::pair<int, int>{52, 64});  // id 4
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(parts[i].first % cfg.grid_step(i) == 0);
        CHECK(parts[i].second % cfg.grid_step(i) == 0);
    }

    const auto crowded = test::small_system(std::vector<int>(9, 3), 64);
    CHECK_THROWS_AS(oma_partition(crowded), std::invalid_argument);
}

TEST_CASE("MN-OMA parts are disjoint and cover the band") {
    const auto inst = test::Instance::random(test::small_system({0, 1, 2, 0, 1, 2}, 64), 8);
    const auto r = mn_oma(inst.cfg, inst.channels, inst.table);
    CHECK(r.iwf_sweeps >= 1);
    CHECK_NOTHROW(check_allocation(r.alloc, inst.cfg, 1e-12));
    std::vector<int> owners(64, 0);
    for (std::size_t i = 0; i < inst.cfg.num_users(); ++i) {
        const int step = inst.cfg.grid_step(i);
        for (std::size_t o = 0; o < r.alloc.x[i].size(); ++o) {
            if (r.alloc.x[i][o] == 0.0) continue;
            const int n = static_cast<int>(o) * step;
            CHECK(n >= r.parts[i].first);
            CHECK(n < r.parts[i].second);
            for (int k = 0; k < step; ++k) ++owners[static_cast<std::size_t>(n + k)];
        }
    }
    for (int c : owners) CHECK(c == 1);
}

TEST_CASE("MN-OMA with one user is full-band water-filling") {
    const auto inst = test::Instance::random(test::small_system({1}, 64), 2);
    const auto r = mn_oma(inst.cfg, inst.channels, inst.table);
    const auto wf = masked_waterfill(inst, 0, std::vector<double>(32, 1.0));
    for (std::size_t n = 0; n < 32; ++n) {
        CHECK(r.alloc.x[0][n] == 1.0);
        CHECK(r.alloc.p[0][n] == doctest::Approx(wf[n]).epsilon(1e-12));
    }
}

TEST_CASE("MN-OMA with one numerology decouples into per-part water-filling") {
    // EVA at 0.96 MHz has 3 taps, inside every CP: co-numerology users on
    // disjoint parts do not interfere.
    const auto inst = test::Instance::random(test::small_system({0, 0, 0}, 64), 6);
    const auto r = mn_oma(inst.cfg, inst.channels, inst.table);
    CHECK(r.iwf_sweeps <= 2);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto wf = masked_waterfill(inst, i, r.alloc.x[i]);
        for (std::size_t n = 0; n < wf.size(); ++n) CHECK(std::abs(r.alloc.p[i][n] - wf[n]) <= 1e-9);
    }
}
