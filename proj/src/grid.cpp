#include "tpca/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace tpca {

SampleGrid SampleGrid::uniform(int n) {
    if (n < 2) throw std::invalid_argument("SampleGrid::uniform: need n >= 2");
    Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    return from_points(t);
}

SampleGrid SampleGrid::from_points(const Eigen::VectorXd& t) {
    const int n = static_cast<int>(t.size());
    if (n < 2) throw std::invalid_argument("SampleGrid: need at least 2 points");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i + 1 < n; ++i) {
        const double h = t[i + 1] - t[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    SampleGrid g{t, w};
    g.validate();
    return g;
}

void SampleGrid::validate() const {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("SampleGrid: need at least 2 points");
    if (weights.size() != n)
        throw std::invalid_argument("SampleGrid: weights/points size mismatch");
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(points[i]) || points[i] < 0.0 || points[i] > 1.0)
            throw std::invalid_argument("SampleGrid: points must lie in [0,1]");
        if (i > 0 && points[i] <= points[i - 1])
            throw std::invalid_argument("SampleGrid: points must be strictly increasing");
        if (!(weights[i] >= 0.0))
            throw std::invalid_argument("SampleGrid: weights must be nonnegative");
    }
    const double span = points[n - 1] - points[0];
    if (std::abs(weights.sum() - span) > 1e-12)
        throw std::invalid_argument("SampleGrid: weights must sum to grid span");
}

bool SampleGrid::same_as(const SampleGrid& other, double tol) const {
    if (points.size() != other.points.size()) return false;
    return (points - other.points).cwiseAbs().maxCoeff() <= tol;
}

double inner_product(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                     const SampleGrid& grid) {
    if (f.rows() != g.rows() || f.cols() != g.cols())
        throw std::invalid_argument("inner_product: shape mismatch");
    if (f.cols() != grid.n())
        throw std::invalid_argument("inner_product: grid size mismatch");
    return ((f.array() * g.array()).matrix() * grid.weights).sum();
}

}  // namespace tpca
