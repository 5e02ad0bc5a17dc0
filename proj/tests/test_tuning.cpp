#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "tpca/chi2.hpp"
#include "tpca/tuning.hpp"

using namespace tpca;

TEST_CASE("soft_threshold_moments: exact chi-square moments at c=0") {
    for (const int p : {1, 2, 4, 8}) {
        const ThresholdMoments m = soft_threshold_moments(p, 0.0, 0.0);
        CHECK(m.mu_c == doctest::Approx(static_cast<double>(p)).epsilon(1e-12));
        CHECK(m.sigma_c == doctest::Approx(std::sqrt(2.0 * p)).epsilon(1e-12));
    }
}

TEST_CASE("soft_threshold_moments: tail vanishes for large c") {
    const ThresholdMoments m = soft_threshold_moments(4, 4.0 + 200.0, 0.0);
    CHECK(m.mu_c < 1e-10);
}

TEST_CASE("soft_threshold_moments agree with the quadrature oracle within 1e-8") {
    for (const int p : {1, 2, 4, 8}) {
        for (const double c : {0.0, 1.0, static_cast<double>(p),
                               static_cast<double>(p) + 5.0,
                               static_cast<double>(p) + 20.0}) {
            for (const double delta : {0.0, 0.5, 1.0, 2.0}) {
                const double lambda = delta * delta * p;
                const ThresholdMoments m = soft_threshold_moments(p, c, delta);
                const double mu1 =
                    oracles::soft_threshold_moment_quad(p, c, lambda, 1);
                const double mu2 =
                    oracles::soft_threshold_moment_quad(p, c, lambda, 2);
                const double sd = std::sqrt(std::max(0.0, mu2 - mu1 * mu1));
                CHECK(m.mu1_c == oracles::approx_abs(mu1, 1e-8));
                CHECK(m.sigma1_c == oracles::approx_abs(sd, 1e-8));
                if (delta == 0.0) {
                    CHECK(m.mu_c == oracles::approx_abs(mu1, 1e-8));
                    CHECK(m.sigma_c == oracles::approx_abs(sd, 1e-8));
                }
            }
        }
    }
}

TEST_CASE("soft_threshold_moments invariants") {
    // mu_c nonincreasing in c; mu1_c >= mu_c when delta > 0
    double prev = 1e300;
    for (const double c : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const ThresholdMoments m = soft_threshold_moments(4, c, 1.0);
        CHECK(m.mu_c <= prev + 1e-12);
        CHECK(m.mu_c >= 0.0);
        CHECK(m.mu1_c >= m.mu_c - 1e-12);
        prev = m.mu_c;
    }
    CHECK_THROWS_AS(soft_threshold_moments(0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("select_c2: pinned values and monotonicity") {
    CHECK(select_c2(4, 45) == oracles::approx_abs(11.613, 0.005));
    CHECK(select_c2(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(select_c2(2, 100) == oracles::approx_abs(11.210, 0.001));
    CHECK(select_c2(5, 45) > select_c2(4, 45));
    CHECK(select_c2(4, 46) > select_c2(4, 45));
}

TEST_CASE("select_c1: delta=0 makes the objective flat at the normal quantile") {
    TuningConfig cfg;
    cfg.mode = CMode::c1;
    cfg.p = 4;
    cfg.d = 45;
    cfg.d0 = 15;
    cfg.delta = 0.0;
    // With no shift the alternative moments equal the null moments, so the
    // objective collapses to z_alpha for every c; any grid point is a valid
    // argmin.
    const double z = normal_upper_quantile(cfg.alpha);
    for (double c : {0.0, 0.5, 2.0, 5.0, 10.0})
        CHECK(c1_objective(cfg, c) == oracles::approx_abs(z, 1e-9));
    const double c1 = select_c1(cfg);
    CHECK(c1 >= 0.0);
    CHECK(c1 <= cfg.p + 2.0 * std::log(static_cast<double>(cfg.d)) + 10.0);
}

TEST_CASE("select_c1 agrees with a fine-grid brute-force oracle (Table-1 d0 set)") {
    const double c2 = select_c2(4, 45);
    for (const int d0 : {15, 9, 12}) {
        TuningConfig cfg;
        cfg.mode = CMode::c1;
        cfg.p = 4;
        cfg.d = 45;
        cfg.d0 = d0;
        cfg.delta = 1.0;
        cfg.alpha = 0.05;
        const double c1 = select_c1(cfg);
        CHECK(std::isfinite(c1));
        CHECK(c1 > 0.0);
        CHECK(c1 <= c2);
        // brute force on a 10x finer grid
        const double cmax = 4.0 + 2.0 * std::log(45.0) + 10.0;
        double best_c = 0.0, best = 1e300;
        for (double c = 0.0; c <= cmax + 1e-12; c += 0.001) {
            const double obj = c1_objective(cfg, c);
            if (obj < best - 1e-15) {
                best = obj;
                best_c = c;
            }
        }
        CHECK(std::abs(c1 - best_c) <= 0.1);
    }
}

TEST_CASE("select_c dispatches by mode") {
    TuningConfig cfg;
    cfg.p = 4;
    cfg.d = 45;
    cfg.mode = CMode::c0;
    CHECK(select_c(cfg) == doctest::Approx(0.0));
    cfg.mode = CMode::c2;
    CHECK(select_c(cfg) == doctest::Approx(select_c2(4, 45)));
    cfg.mode = CMode::fixed;
    cfg.fixed_c = 3.25;
    CHECK(select_c(cfg) == doctest::Approx(3.25));
    cfg.mode = CMode::c1;
    cfg.d0 = 15;
    CHECK(select_c(cfg) == doctest::Approx(select_c1(cfg)));
}

TEST_CASE("TuningConfig validation and d0 default") {
    TuningConfig cfg;
    cfg.d = 45;
    CHECK(cfg.effective_d0() == 15);  // round(45/3)
    cfg.d = 10;
    CHECK(cfg.effective_d0() == 3);
    cfg.d0 = 11;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.d0 = 5;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.alpha = 0.05;
    cfg.delta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("estimate_d0: examples, permutation invariance, monotonicity") {
    std::vector<double> u_ic;
    for (int i = 1; i <= 100; ++i) u_ic.push_back(static_cast<double>(i));
    SUBCASE("all-zero OC values give 0") {
        CHECK(estimate_d0(u_ic, std::vector<double>(45, 0.0)) == 0);
    }
    SUBCASE("all OC values above max(u_ic) give d") {
        CHECK(estimate_d0(u_ic, std::vector<double>(45, 1000.0)) == 45);
    }
    SUBCASE("strictly-above-90th-percentile convention") {
        // 90th percentile of 1..100 with the ceil convention is the 90th
        // order statistic = 90; entries > 90 count.
        CHECK(estimate_d0(u_ic, {90.0, 90.5, 91.0, 10.0}) == 2);
    }
    SUBCASE("permutation invariance and monotonicity") {
        std::vector<double> u_oc = {5.0, 95.0, 40.0, 99.0, 12.0};
        const int base = estimate_d0(u_ic, u_oc);
        std::vector<double> perm = {99.0, 12.0, 5.0, 95.0, 40.0};
        CHECK(estimate_d0(u_ic, perm) == base);
        u_oc[0] = 1e6;  // raising an entry never decreases the count
        CHECK(estimate_d0(u_ic, u_oc) >= base);
    }
    SUBCASE("empty inputs throw") {
        CHECK_THROWS_AS(estimate_d0({}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(estimate_d0(u_ic, {}), std::invalid_argument);
    }
}

TEST_CASE("chi2_log_survival: exact even-dof oracle, stability to c = 1e4") {
    for (const int p : {2, 4, 8}) {
        for (const double c : {0.5, 1.0, 5.0, 20.0, 100.0, 1000.0, 10000.0}) {
            const double got = chi2_log_survival(p, c);
            const double want = oracles::even_chi2_log_survival(p, c);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
            CHECK(std::isfinite(got));
        }
    }
    // odd dof sanity: p=1, P(chi2_1 > c) = 2*(1 - Phi(sqrt(c)))
    for (const double c : {0.5, 4.0, 25.0}) {
        const double want = std::log(std::erfc(std::sqrt(c / 2.0)));
        CHECK(chi2_log_survival(1, c) == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK_THROWS_AS(chi2_log_survival(0, 1.0), std::invalid_argument);
}

TEST_CASE("chi2 tail lemma: log P + (c-p)/2 bounded by 3 ln c") {
    for (const double c : {50.0, 100.0, 200.0, 1000.0}) {
        const double v = chi2_log_survival(4, c) + (c - 4.0) / 2.0;
        CHECK(std::abs(v) <= 3.0 * std::log(c));
    }
}

TEST_CASE("normal quantile / cdf consistency") {
    for (const double a : {0.5, 0.1, 0.05, 0.01, 1e-4}) {
        const double z = normal_upper_quantile(a);
        CHECK(1.0 - normal_cdf(z) == doctest::Approx(a).epsilon(1e-10));
    }
    CHECK(normal_upper_quantile(0.5) == oracles::approx_abs(0.0, 1e-12));
    CHECK(normal_upper_quantile(0.05) == doctest::Approx(1.6448536269514722).epsilon(1e-10));
}

TEST_CASE("upper_quantile order-statistic convention") {
    std::vector<double> s;
    for (int i = 1; i <= 100; ++i) s.push_back(static_cast<double>(i));
    CHECK(upper_quantile(s, 0.05) == doctest::Approx(95.0));
    int above = 0;
    for (double x : s)
        if (x > 95.0) ++above;
    CHECK(above == 5);
    CHECK(upper_quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.0));
}
