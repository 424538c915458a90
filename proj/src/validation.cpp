#include "mnoma/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mnoma/baselines.hpp"
#include "mnoma/ini.hpp"
#include "mnoma/metrics.hpp"
#include "mnoma/stage1.hpp"
#include "mnoma/stage2.hpp"

namespace mnoma {

TrialSetup random_instance(std::uint64_t seed, int min_users, int max_users, int reference_fft) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> users(min_users, max_users);
    std::uniform_int_distribution<int> mu(0, 2);
    std::uniform_real_distribution<double> snr(0.0, 20.0);
    const int k = users(rng);
    SystemParams sp;
    sp.reference_fft = reference_fft;
    sp.snr_db = snr(rng);
    for (int u = 0; u < k; ++u) sp.user_mu.push_back(mu(rng));
    if (k >= 2 && std::all_of(sp.user_mu.begin(), sp.user_mu.end(), [&](int m) { return m == sp.user_mu[0]; })) {
        sp.user_mu[1] = (sp.user_mu[0] + 1) % 3;
    }
    for (int u = 0; u < k; ++u) sp.user_ids.push_back(u);
    std::shuffle(sp.user_ids.begin(), sp.user_ids.end(), rng);
    TrialSetup setup;
    setup.seed = seed;
    setup.cfg = build_system(sp);
    setup.channels = realize_all_users(setup.cfg, seed);
    return setup;
}

namespace {

class Tracker {
public:
    explicit Tracker(std::string name) { result_.name = std::move(name); result_.passed = true; }
    void expect(bool ok, const std::string& what) {
        if (!ok && result_.passed) {
            result_.passed = false;
            result_.detail = what;
        }
    }
    void note(double v) { worst_ = std::max(worst_, v); }
    CheckResult done() {
        if (result_.passed) {
            std::ostringstream os;
            os << "worst " << worst_;
            result_.detail = os.str();
        }
        return result_;
    }

private:
    CheckResult result_;
    double worst_ = 0.0;
};

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, int instances) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    {
        Tracker t("co-numerology orthogonality");
        for (int mu = 0; mu <= 2; ++mu) {
            const auto num = make_numerology(mu, 64, 4, 15e3);
            const std::vector<cd> flat{cd(1.0, 0.0)};
            std::vector<double> x(static_cast<std::size_t>(num.n_sc)), p(x.size());
            for (std::size_t n = 0; n < x.size(); ++n) {
                x[n] = unit(rng) < 0.7 ? 1.0 : 0.0;
                p[n] = unit(rng) * 2.0;
            }
            const auto g = interference_matrix_narrow_victim(num, num, flat, x, p);
            double err = 0.0;
            for (Eigen::Index r = 0; r < g.rows(); ++r) {
                for (Eigen::Index c = 0; c < g.cols(); ++c) {
                    const double want = r == c ? x[static_cast<std::size_t>(r)] * std::sqrt(p[static_cast<std::size_t>(r)]) : 0.0;
                    err = std::max(err, std::abs(g(r, c) - want));
                }
            }
            t.note(err);
            t.expect(err <= 1e-10, "interference matrix is not diag(x sqrt p)");
        }
        out.push_back(t.done());
    }

    {
        Tracker t("INI linearity");
        for (int k = 0; k < std::min(instances, 5); ++k) {
            const auto setup = random_instance(derive_seed(seed, 100 + k), 2, 3);
            const auto table = build_ini_table(setup.cfg, setup.channels);
            const auto& cfg = setup.cfg;
            for (std::size_t i = 0; i < cfg.num_users(); ++i) {
                for (std::size_t j = 0; j < cfg.num_users(); ++j) {
                    if (i == j) continue;
                    std::vector<double> x(static_cast<std::size_t>(cfg.numerology(j).n_sc)), p(x.size());
                    for (std::size_t n = 0; n < x.size(); ++n) {
                        x[n] = unit(rng) < 0.6 ? 1.0 : 0.0;
                        p[n] = unit(rng) * 3.0;
                    }
                    const auto& vi = cfg.numerology(i);
                    const auto& vj = cfg.numerology(j);
                    std::vector<double> want(static_cast<std::size_t>(vi.n_sc), 0.0);
                    if (vi.q <= vj.q) {
                        want = mse_vector(interference_matrix_narrow_victim(vi, vj, setup.channels.users[j].taps, x, p));
                    } else {
                        const int delta = vi.q / vj.q;
                        for (int m = 1; m <= delta; ++m) {
                            const auto w = mse_vector(interference_matrix_wide_victim(vi, vj, m, setup.channels.users[j].taps, x, p));
                            for (std::size_t n = 0; n < want.size(); ++n) want[n] += w[n] / delta;
                        }
                    }
                    const auto got = table.interference(i, j, x, p);
                    double scale = 0.0;
                    for (double v : want) scale = std::max(scale, v);
                    for (std::size_t n = 0; n < want.size(); ++n) {
                        const double err = std::abs(got[n] - want[n]) / std::max(scale, 1e-300);
                        t.note(err);
                        t.expect(err <= 1e-12, "table * p differs from diag(Gamma Gamma^H)");
                    }
                }
            }
        }
        out.push_back(t.done());
    }

    {
        Tracker t("bound tightness and minorization");
        std::uniform_real_distribution<double> logl(-6.0, 6.0);
        for (int k = 0; k < 1000; ++k) {
            const double l = std::pow(10.0, logl(rng));
            const double l2 = std::pow(10.0, logl(rng));
            const auto b = bound_coefficients(l);
            const double tight = std::abs(b.alpha * std::log2(l) + b.beta - std::log2(1.0 + l));
            t.note(tight);
            t.expect(tight <= 1e-12, "bound not tight");
            t.expect(b.alpha * std::log2(l2) + b.beta <= std::log2(1.0 + l2) + 1e-12, "bound exceeds rate");
        }
        out.push_back(t.done());
    }

    Tracker occupancy("stage 1 occupancy <= U");
    Tracker ascent("stage 2 monotone ascent");
    Tracker budgets("allocations within budgets");
    Tracker oma("MN-OMA parts disjoint");
    Tracker fairness("fairness in [1/K, 1]");
    for (int k = 0; k < instances; ++k) {
        const auto setup = random_instance(derive_seed(seed, 1000 + k), 3, 6);
        const auto& cfg = setup.cfg;
        const auto table = build_ini_table(cfg, setup.channels);
        const Problem noma{cfg, setup.channels, table, InterferenceModel::kSicOrdered};
        const auto s1 = greedy_subcarrier_allocation(noma);
        const auto occ = assignment_occupancy(cfg, s1.alloc);
        occupancy.expect(*std::max_element(occ.begin(), occ.end()) <= cfg.u_limit, "occupancy above U");
        occupancy.expect(static_cast<int>(s1.removals.size()) <= s1.initial_over_occupancy, "too many removals");

        const auto s2 = sca_power_allocation(noma, s1.alloc);
        for (std::size_t it = 1; it < s2.trace.size(); ++it) {
            ascent.note(std::max(0.0, s2.trace[it - 1] - s2.trace[it]));
            ascent.expect(s2.trace[it] >= s2.trace[it - 1] - 1e-9, "true rate decreased");
        }
        const double r0 = sum_rate(noma, s1.alloc).spectral_efficiency;
        const double r1 = sum_rate(noma, s2.alloc).spectral_efficiency;
        ascent.expect(r1 >= r0 - 1e-9, "SCA ended below its starting point");

        const auto o = mn_oma(cfg, setup.channels, table);
        const auto oo = assignment_occupancy(cfg, o.alloc);
        oma.expect(*std::max_element(oo.begin(), oo.end()) <= 1, "base subcarrier shared in OMA");

        for (const Allocation* a : {&s1.alloc, &s2.alloc, &o.alloc}) {
            try {
                check_allocation(*a, cfg, 1e-12);
            } catch (const std::exception& e) {
                budgets.expect(false, e.what());
            }
        }
        const auto rates = sum_rate(noma, s2.alloc).per_user;
        const double f = jain_fairness(rates);
        fairness.expect(f >= 1.0 / static_cast<double>(rates.size()) - 1e-12 && f <= 1.0 + 1e-12, "fairness out of range");
    }
    out.push_back(occupancy.done());
    out.push_back(ascent.done());
    out.push_back(budgets.done());
    out.push_back(oma.done());
    out.push_back(fairness.done());
    return out;
}

}  // namespace mnoma
