#ifndef TPCA_TUNING_HPP
#define TPCA_TUNING_HPP

#include <vector>

#include "tpca/chi2.hpp"

namespace tpca {

/// Moments of the soft-thresholded score (U - c)^+ under central chi2_p
/// (mu_c, sigma_c) and noncentral chi2_p(delta^2 p) (mu1_c, sigma1_c).
struct ThresholdMoments {
    double mu_c = 0.0;
    double sigma_c = 0.0;
    double mu1_c = 0.0;
    double sigma1_c = 0.0;
};

enum class CMode { c0, c1, c2, fixed };

struct TuningConfig {
    CMode mode = CMode::c1;
    int p = 4;
    int d = 45;
    int d0 = 0;          // 0 means "use round(d/3)"
    double delta = 1.0;  // per-coordinate shift under the alternative
    double alpha = 0.05;
    double fixed_c = 0.0;

    int effective_d0() const;
    void validate() const;
};

ThresholdMoments soft_threshold_moments(int p, double c, double delta);

// Minimizer of the CLT power objective over a dense c grid (step 0.01).
double select_c1(const TuningConfig& cfg);

// Extreme-value rule c2 = p + 2 ln d.
double select_c2(int p, int d);

// Resolve a config to a concrete soft-threshold value.
double select_c(const TuningConfig& cfg);

// Data-driven d0: count of out-of-control U values above the empirical
// 90th percentile of the pooled in-control U sample.
int estimate_d0(const std::vector<double>& u_ic, const std::vector<double>& u_oc);

// The Eq-13 objective at a given c, exposed for oracle-style checks.
double c1_objective(const TuningConfig& cfg, double c);

// k-th ascending order statistic convention for an upper-alpha quantile:
// the ceil((1-alpha)*N)-th value.
double upper_quantile(std::vector<double> sample, double alpha);

}  // namespace tpca

#endif
