#ifndef TPCA_FPCA_HPP
#define TPCA_FPCA_HPP

#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "tpca/profiles.hpp"

namespace tpca {

/// Estimated covariance kernel c(t,s) sampled on the grid (n x n, symmetric PSD).
struct CovarianceKernel {
    SampleGrid grid;
    Eigen::MatrixXd matrix;
};

/// Retained eigenfunctions of the kernel, quadrature-orthonormal.
struct BasisSet {
    SampleGrid grid;
    int d = 0;
    Eigen::MatrixXd eigenfunctions;  // d x n, row k is v_k sampled on the grid
    Eigen::VectorXd eigenvalues;     // nonincreasing, nonnegative
    double variance_explained = 0.0;
};

/// Per-component channel covariances Sigma_k with cached Cholesky factors.
struct ChannelCovarianceSet {
    std::vector<Eigen::MatrixXd> sigmas;             // p x p, symmetric PSD
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factorizations;  // of Sigma_k + ridge*I
    std::vector<double> ridge_applied;

    int size() const { return static_cast<int>(sigmas.size()); }
    int p() const { return sigmas.empty() ? 0 : static_cast<int>(sigmas[0].rows()); }

    // eta^T (Sigma_k + ridge*I)^{-1} eta via the cached factor.
    double quadratic_form(int k, const Eigen::VectorXd& eta) const;
    // Draw from N(0, Sigma_k + ridge*I) given iid standard normals z.
    Eigen::VectorXd sample(int k, const Eigen::VectorXd& z) const;
};

struct FittedModel {
    BasisSet basis;
    ChannelCovarianceSet channel_cov;
    int p = 0;
    int m_fit = 0;

    int d() const { return basis.d; }
};

CovarianceKernel estimate_covariance_kernel(const ProfileSet& data);
BasisSet eigen_decompose(const CovarianceKernel& kernel, int d);
ChannelCovarianceSet estimate_sigma_k(const ProfileSet& data, const BasisSet& basis);
FittedModel fit_model(const ProfileSet& data, int d);

// Construct the Sigma_k factorization set from raw matrices (ridge rule applied).
ChannelCovarianceSet make_channel_covariances(const std::vector<Eigen::MatrixXd>& sigmas);

std::string model_to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace tpca

#endif
