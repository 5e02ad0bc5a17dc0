#ifndef TPCA_DETECTOR_HPP
#define TPCA_DETECTOR_HPP

#include <vector>

#include "tpca/fpca.hpp"

namespace tpca {

/// Per-candidate scan statistics: U is (m-1) x d, scores[l-1] = S_l.
struct ScanResult {
    Eigen::MatrixXd U;
    Eigen::VectorXd scores;
    double Q = 0.0;
    int ell_star = 1;  // 1-based candidate index, smallest maximizer
    double c_used = 0.0;
};

struct TestDecision {
    bool reject = false;
    double Q = 0.0;
    double L = 0.0;
    int tau_hat = 1;
    double alpha = 0.0;
    double c_used = 0.0;
};

struct ChangePointMetrics {
    double mae = 0.0;
    double p1 = 0.0;
    double p3 = 0.0;
};

// Standardized before/after mean difference at candidate split ell (1-based).
ProfileFunction mean_difference(const ProfileSet& data, int ell);

// Component statistics U_k = eta_k^T Sigma_k^{-1} eta_k for one difference curve.
Eigen::VectorXd compute_U(const ProfileFunction& delta, const FittedModel& model);

// Full scan over ell = 1..m-1 with soft threshold c.
ScanResult scan_Q(const ProfileSet& data, const FittedModel& model, double c);

TestDecision decide(const ScanResult& scan, double L, double alpha);

ChangePointMetrics change_point_metrics(const std::vector<int>& tau_hats, int tau);

}  // namespace tpca

#endif
