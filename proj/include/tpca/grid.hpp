#ifndef TPCA_GRID_HPP
#define TPCA_GRID_HPP

#include <Eigen/Dense>

namespace tpca {

/// Sampling grid on [0,1] with quadrature weights (trapezoidal by default).
struct SampleGrid {
    Eigen::VectorXd points;   // strictly increasing, inside [0,1]
    Eigen::VectorXd weights;  // nonnegative, sum to t_last - t_first

    int n() const { return static_cast<int>(points.size()); }

    static SampleGrid uniform(int n);
    static SampleGrid from_points(const Eigen::VectorXd& t);

    // Throws std::invalid_argument on violated invariants.
    void validate() const;

    bool same_as(const SampleGrid& other, double tol = 1e-12) const;
};

// Quadrature inner product of two sampled functions; rows are channels.
// Multichannel inputs are summed over channels.
double inner_product(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                     const SampleGrid& grid);

}  // namespace tpca

#endif
