#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "mnoma/stage1.hpp"
#include "mnoma/stage2.hpp"
#include "support.hpp"

using namespace mnoma;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> no_floors(const Surrogate& s) { return std::vector<double>(s.num_users(), kNaN); }

// Uniform powers at a fraction of every budget on the active set.
std::vector<double> uniform_q(const Surrogate& s, double fraction) {
    std::vector<double> q(s.size());
    for (std::size_t i = 0; i < s.num_users(); ++i) {
        const auto n = static_cast<double>(s.user_end(i) - s.user_begin(i));
        for (std::size_t t = s.user_begin(i); t < s.user_end(i); ++t) q[t] = std::log2(fraction * s.budget(i) / n);
    }
    return q;
}

std::vector<double> random_q(const Surrogate& s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> q(s.size());
    for (std::size_t i = 0; i < s.num_users(); ++i) {
        std::vector<double> w;
        double total = 0.0;
        for (std::size_t t = s.user_begin(i); t < s.user_end(i); ++t) {
            w.push_back(u(rng));
            total += w.back();
        }
        for (std::size_t t = s.user_begin(i); t < s.user_end(i); ++t) {
            q[t] = std::log2(0.9 * s.budget(i) * w[t - s.user_begin(i)] / total);
        }
    }
    return q;
}

std::vector<double> waterfill_user(const test::Instance& inst, std::size_t i) {
    std::vector<double> g = inst.channels.users[i].gain;
    for (auto& v : g) v /= inst.cfg.noise_var;
    return waterfill_single_user(g, inst.cfg.users[i].power_budget);
}

}  // namespace

TEST_CASE("bound coefficients") {
    const auto one = bound_coefficients(1.0);
    CHECK(one.alpha == doctest::Approx(0.5));
    CHECK(one.beta == doctest::Approx(1.0));
    const auto three = bound_coefficients(3.0);
    CHECK(three.alpha == doctest::Approx(0.75));
    CHECK(three.beta == doctest::Approx(2.0 - 0.75 * std::log2(3.0)));
    CHECK(three.alpha * std::log2(3.0) + three.beta == doctest::Approx(2.0));
    CHECK(three.beta == doctest::Approx(0.81128).epsilon(1e-5));
    CHECK_THROWS_AS(bound_coefficients(0.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_coefficients(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_coefficients(kNaN), std::invalid_argument);
}

TEST_CASE("bound is tight and a global minorant") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> logu(-6.0, 6.0);
    for (int k = 0; k < 1000; ++k) {
        const double l0 = std::pow(10.0, logu(rng));
        const double l1 = std::pow(10.0, logu(rng));
        const auto c = bound_coefficients(l0);
        CHECK(std::abs(c.alpha * std::log2(l0) + c.beta - std::log2(1.0 + l0)) <= 1e-12 * std::max(1.0, std::log2(1.0 + l0)));
        CHECK(c.alpha * std::log2(l1) + c.beta <= std::log2(1.0 + l1) + 1e-12);
    }
}

TEST_CASE("surrogate derivatives match finite differences") {
    const auto inst = test::Instance::random(test::small_system({1, 0, 2}, 32, 10.0), 5);
    const auto problem = inst.problem();
    auto x = Allocation::all_assigned(inst.cfg).x;
    for (std::size_t n = 0; n < x[1].size(); n += 3) x[1][n] = 0.0;
    Surrogate s(problem, x);
    const auto q = random_q(s, 1);
    s.set_expansion_point(random_q(s, 2));
    const auto d = s.derivatives(q);
    CHECK(d.objective == doctest::Approx(s.objective(q)).epsilon(1e-14));

    const double h = 1e-5;
    auto qp = q;
    for (std::size_t t = 0; t < s.size(); ++t) {
        qp[t] = q[t] + h;
        const double fp = s.objective(qp);
        const auto rp = s.user_rates(qp);
        qp[t] = q[t] - h;
        const double fm = s.objective(qp);
        const auto rm = s.user_rates(qp);
        qp[t] = q[t];
        const double fd = (fp - fm) / (2.0 * h);
        CHECK(std::abs(d.gradient(t) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        for (std::size_t i = 0; i < s.num_users(); ++i) {
            const double rfd = (rp[i] - rm[i]) / (2.0 * h);
            CHECK(std::abs(d.rate_gradients[i](t) - rfd) <= 1e-5 * std::max(1.0, std::abs(rfd)));
        }
    }

    // Concave objective: Hessian negative semidefinite and consistent with
    // differences of the gradient.
    const auto hess = s.objective_hessian(q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    CHECK(eig.eigenvalues().maxCoeff() <= 1e-10 * std::max(1.0, hess.cwiseAbs().maxCoeff()));
    for (std::size_t t = 0; t < s.size(); t += 7) {
        qp[t] = q[t] + h;
        const auto gp = s.derivatives(qp).gradient;
        qp[t] = q[t] - h;
        const auto gm = s.derivatives(qp).gradient;
        qp[t] = q[t];
        const Eigen::VectorXd col = (gp - gm) / (2.0 * h);
        CHECK((col - hess.col(static_cast<Eigen::Index>(t))).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, col.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("surrogate is tight at the expansion point and below the true rate elsewhere") {
    const auto inst = test::Instance::random(test::small_system({0, 2, 1}, 32, 10.0), 9);
    Surrogate s(inst.problem(), Allocation::all_assigned(inst.cfg).x);
    const auto q0 = random_q(s, 3);
    s.set_expansion_point(q0);
    CHECK(s.objective(q0) == doctest::Approx(s.true_objective(q0)).epsilon(1e-12));
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const auto q = random_q(s, seed);
        CHECK(s.objective(q) <= s.true_objective(q) + 1e-12);
        const auto sr = s.user_rates(q);
        const auto tr = s.true_user_rates(q);
        for (std::size_t i = 0; i < sr.size(); ++i) CHECK(sr[i] <= tr[i] + 1e-12);
    }
    const auto alloc = s.to_allocation(q0);
    CHECK(s.true_objective(q0) ==
          doctest::Approx(sum_rate(inst.problem(), alloc).spectral_efficiency).epsilon(1e-12));
}

TEST_CASE("surrogate rejects the all-pairs model") {
    auto inst = test::Instance::random(test::small_system({0, 1}, 32), 1);
    inst.model = InterferenceModel::kAllPairs;
    CHECK_THROWS(Surrogate(inst.problem(), Allocation::all_assigned(inst.cfg).x));
}

TEST_CASE("subproblem at the water-filling point is water-filling") {
    const auto inst = test::Instance::random(test::small_system({0}, 32, 10.0), 21);
    const auto wf = waterfill_user(inst, 0);
    auto x = Allocation::zeros(inst.cfg).x;
    for (std::size_t n = 0; n < wf.size(); ++n) x[0][n] = wf[n] > 0.0 ? 1.0 : 0.0;
    Surrogate s(inst.problem(), x);
    std::vector<double> q_wf;
    for (const auto& v : s.vars()) q_wf.push_back(std::log2(wf[v.subcarrier]));
    s.set_expansion_point(q_wf);

    const auto r = solve_subproblem(s, uniform_q(s, 0.5), no_floors(s));
    CHECK(r.converged);
    CHECK(r.stationarity <= 1e-6);
    for (std::size_t t = 0; t < s.size(); ++t) {
        CHECK(std::exp2(r.q[t]) == doctest::Approx(wf[s.vars()[t].subcarrier]).epsilon(1e-6));
    }
}

TEST_CASE("symmetric subproblem splits power equally") {
    const auto inst = test::Instance::flat(test::small_system({0}, 16, 10.0));
    auto x = Allocation::zeros(inst.cfg).x;
    x[0][2] = x[0][9] = 1.0;
    Surrogate s(inst.problem(), x);
    const std::vector<double> q0{std::log2(3.0), std::log2(0.5)};
    s.set_expansion_point(std::vector<double>{0.0, 0.0});
    const auto r = solve_subproblem(s, q0, no_floors(s));
    CHECK(r.converged);
    CHECK(std::exp2(r.q[0]) == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(std::exp2(r.q[1]) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("subproblem never regresses and meets its residual targets") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = test::Instance::random(test::small_system({0, 1, 2, 1}, 32, 5.0 + 3.0 * seed, 2, 0.5), seed);
        const auto stage1 = greedy_subcarrier_allocation(inst.problem());
        Surrogate s(inst.problem(), stage1.alloc.x);
        const auto q0 = random_q(s, seed + 100);
        s.set_expansion_point(q0);
        auto floors = s.true_user_rates(q0);
        for (auto& f : floors) f = std::min(0.5, f - 1e-9);
        const auto r = solve_subproblem(s, q0, floors);
        CHECK(r.objective >= r.start_objective - 1e-9);
        CHECK(r.objective >= s.objective(q0) - 1e-9);
        CHECK(r.converged);
        CHECK(r.stationarity <= 1e-6);
        CHECK(r.primal_residual <= 1e-8);
        const auto rates = s.user_rates(r.q);
        for (std::size_t i = 0; i < rates.size(); ++i) {
            if (s.user_end(i) > s.user_begin(i)) CHECK(rates[i] >= floors[i] - 1e-8 * std::max(1.0, floors[i]));
        }
        const auto alloc = s.to_allocation(r.q);
        for (std::size_t i = 0; i < inst.cfg.num_users(); ++i) {
            double total = 0.0;
            for (double p : alloc.p[i]) total += p;
            CHECK(total <= inst.cfg.users[i].power_budget * (1.0 + 1e-8));
        }
    }
}

TEST_CASE("zero-INI SCA converges to per-user water-filling") {
    // Started at Stage 1 (already water-filling) and from uniform powers;
    // high SNR keeps every subcarrier active.
    const auto inst = test::Instance::zero_ini(test::small_system({0, 1, 2}, 32, 30.0, 3, 0.0), 14);
    const auto stage1 = greedy_subcarrier_allocation(inst.problem());
    auto uniform = Allocation::all_assigned(inst.cfg);
    for (std::size_t i = 0; i < inst.cfg.num_users(); ++i) {
        for (auto& p : uniform.p[i]) p = 0.99 * inst.cfg.users[i].power_budget / static_cast<double>(uniform.p[i].size());
    }
    for (const Allocation* start : {&stage1.alloc, static_cast<const Allocation*>(&uniform)}) {
        ScaOptions opts;
        opts.epsilon = 1e-12;
        opts.max_iterations = 200;
        const auto r = sca_power_allocation(inst.problem(), *start, opts);
        CHECK(r.converged);
        for (std::size_t i = 0; i < inst.cfg.num_users(); ++i) {
            const auto wf = waterfill_user(inst, i);
            for (std::size_t n = 0; n < wf.size(); ++n) {
                REQUIRE(wf[n] > 0.0);
                CHECK(r.alloc.p[i][n] == doctest::Approx(wf[n]).epsilon(1e-6));
            }
        }
    }
    const auto from_wf = sca_power_allocation(inst.problem(), stage1.alloc);
    CHECK(from_wf.iterations == 1);
}

TEST_CASE("a single forced subcarrier per user gets the whole budget") {
    const auto inst = test::Instance::random(test::small_system({0, 1, 2}, 32, 10.0, 2, 0.0), 3);
    auto start = Allocation::zeros(inst.cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        start.x[i][i + 1] = 1.0;
        start.p[i][i + 1] = 0.25;
    }
    const auto r = sca_power_allocation(inst.problem(), start);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.alloc.p[i][i + 1] == doctest::Approx(inst.cfg.users[i].power_budget).epsilon(1e-9));
    }
}

TEST_CASE("SCA ascends on the true rate") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = test::Instance::random(test::small_system({0, 1, 2, 2, 0}, 32, 4.0 * seed, 2, 0.5), seed + 40);
        const auto stage1 = greedy_subcarrier_allocation(inst.problem());
        const auto r = sca_power_allocation(inst.problem(), stage1.alloc);
        REQUIRE(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
        for (std::size_t t = 1; t < r.trace.size(); ++t) CHECK(r.trace[t] >= r.trace[t - 1] - 1e-9);
        const double start = sum_rate(inst.problem(), stage1.alloc).spectral_efficiency;
        const double end = sum_rate(inst.problem(), r.alloc).spectral_efficiency;
        CHECK(end >= start - 1e-9);
        CHECK(end == doctest::Approx(r.trace.back()).epsilon(1e-12));
        CHECK_NOTHROW(check_allocation(r.alloc, inst.cfg, 1e-9));
        CHECK(r.cap_hit == !r.converged);
        CHECK(r.max_stationarity <= 1e-6);
        CHECK(r.max_primal_residual <= 1e-8);
        // Stage 2 keeps the Stage 1 assignment.
        for (std::size_t i = 0; i < inst.cfg.num_users(); ++i) {
            for (std::size_t n = 0; n < r.alloc.x[i].size(); ++n) CHECK(r.alloc.x[i][n] == stage1.alloc.x[i][n]);
        }
        const auto rates = sum_rate(inst.problem(), r.alloc).per_user;
        bool below = false;
        for (std::size_t i = 0; i < rates.size(); ++i) {
            const bool low = rates[i] / inst.cfg.bandwidth_hz < inst.cfg.r_min;
            CHECK(low == r.rmin_relaxed_users[i]);
            below = below || low;
        }
        CHECK(below == r.rmin_infeasible);
    }
}
