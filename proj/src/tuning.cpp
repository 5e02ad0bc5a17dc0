#include "tpca/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tpca {

int TuningConfig::effective_d0() const {
    if (d0 > 0) return d0;
    return std::max(1, static_cast<int>(std::lround(d / 3.0)));
}

void TuningConfig::validate() const {
    if (p < 1) throw std::invalid_argument("TuningConfig: p must be >= 1");
    if (d < 1) throw std::invalid_argument("TuningConfig: d must be >= 1");
    if (effective_d0() > d) throw std::invalid_argument("TuningConfig: d0 must be <= d");
    if (delta < 0.0) throw std::invalid_argument("TuningConfig: delta must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("TuningConfig: alpha must be in (0,1)");
    if (mode == CMode::fixed && fixed_c < 0.0)
        throw std::invalid_argument("TuningConfig: fixed_c must be >= 0");
}

namespace {

// E(X - c)^+ and E[((X - c)^+)^2] for X ~ chi2_nu, via survival identities:
//   E(X-c)^+        = nu*S_{nu+2}(c) - c*S_nu(c)
//   E[(X-c)^2 1{X>c}] = nu(nu+2)*S_{nu+4}(c) - 2c*nu*S_{nu+2}(c) + c^2*S_nu(c)
void central_plus_moments(int nu, double c, double& m1, double& m2) {
    const double s0 = chi2_survival(nu, c);
    const double s2 = chi2_survival(nu + 2, c);
    const double s4 = chi2_survival(nu + 4, c);
    m1 = nu * s2 - c * s0;
    m2 = static_cast<double>(nu) * (nu + 2) * s4 - 2.0 * c * nu * s2 + c * c * s0;
    m1 = std::max(m1, 0.0);
    m2 = std::max(m2, 0.0);
}

}  // namespace

ThresholdMoments soft_threshold_moments(int p, double c, double delta) {
    if (p < 1) throw std::invalid_argument("soft_threshold_moments: p must be >= 1");
    if (c < 0.0) throw std::invalid_argument("soft_threshold_moments: c must be >= 0");
    if (delta < 0.0) throw std::invalid_argument("soft_threshold_moments: delta must be >= 0");

    ThresholdMoments out;
    double m1, m2;
    central_plus_moments(p, c, m1, m2);
    out.mu_c = m1;
    out.sigma_c = std::sqrt(std::max(m2 - m1 * m1, 0.0));

    const double lambda = delta * delta * p;  // noncentrality
    if (lambda == 0.0) {
        out.mu1_c = out.mu_c;
        out.sigma1_c = out.sigma_c;
        return out;
    }
    // Noncentral chi2_p(lambda) is a Poisson(lambda/2) mixture of central
    // chi2_{p+2j}; sum the mixture until the weight tail is negligible.
    const double half = 0.5 * lambda;
    double log_w = -half;  // log weight at j = 0
    double acc_w = 0.0, acc_m1 = 0.0, acc_m2 = 0.0;
    for (int j = 0; j < 10000; ++j) {
        const double w = std::exp(log_w);
        central_plus_moments(p + 2 * j, c, m1, m2);
        acc_w += w;
        acc_m1 += w * m1;
        acc_m2 += w * m2;
        if (acc_w > 1.0 - 1e-15 && j > half) break;
        log_w += std::log(half) - std::log1p(j);  // w_{j+1} = w_j * half/(j+1)
    }
    out.mu1_c = acc_m1;
    out.sigma1_c = std::sqrt(std::max(acc_m2 - acc_m1 * acc_m1, 0.0));
    return out;
}

double c1_objective(const TuningConfig& cfg, double c) {
    const int d = cfg.d;
    const int d0 = cfg.effective_d0();
    const ThresholdMoments mom = soft_threshold_moments(cfg.p, c, cfg.delta);
    const double denom = std::sqrt(d0 * mom.sigma1_c * mom.sigma1_c +
                                   (d - d0) * mom.sigma_c * mom.sigma_c);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    const double z = normal_upper_quantile(cfg.alpha);
    return (-(mom.mu1_c - mom.mu_c) * d0 + std::sqrt(static_cast<double>(d)) * mom.sigma_c * z) /
           denom;
}

double select_c1(const TuningConfig& cfg) {
    cfg.validate();
    const double step = 0.01;
    const double c_max = cfg.p + 2.0 * std::log(static_cast<double>(cfg.d)) + 10.0;
    double best_c = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (double c = 0.0; c <= c_max + 0.5 * step; c += step) {
        const double obj = c1_objective(cfg, c);
        if (std::isfinite(obj) && obj < best) {
            best = obj;
            best_c = c;
        }
    }
    // Degenerate objective (all moments numerically zero): fall back to 0.
    if (!std::isfinite(best)) return 0.0;
    return best_c;
}

double select_c2(int p, int d) {
    if (p < 1 || d < 1) throw std::invalid_argument("select_c2: p, d must be >= 1");
    return p + 2.0 * std::log(static_cast<double>(d));
}

double select_c(const TuningConfig& cfg) {
    cfg.validate();
    switch (cfg.mode) {
        case CMode::c0: return 0.0;
        case CMode::c1: return select_c1(cfg);
        case CMode::c2: return select_c2(cfg.p, cfg.d);
        case CMode::fixed: return cfg.fixed_c;
    }
    throw std::logic_error("select_c: unknown mode");
}

int estimate_d0(const std::vector<double>& u_ic, const std::vector<double>& u_oc) {
    if (u_ic.empty()) throw std::invalid_argument("estimate_d0: empty in-control sample");
    if (u_oc.empty()) throw std::invalid_argument("estimate_d0: empty out-of-control sample");
    const double a = upper_quantile(u_ic, 0.10);
    int count = 0;
    for (double u : u_oc)
        if (u > a) ++count;
    return count;
}

double upper_quantile(std::vector<double> sample, double alpha) {
    if (sample.empty()) throw std::invalid_argument("upper_quantile: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("upper_quantile: alpha must be in (0,1)");
    std::sort(sample.begin(), sample.end());
    const auto n = sample.size();
    auto rank = static_cast<size_t>(std::ceil((1.0 - alpha) * n));
    rank = std::min(std::max<size_t>(rank, 1), n);
    return sample[rank - 1];
}

}  // namespace tpca
