#include "tpca/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace tpca {

ProfileFunction mean_difference(const ProfileSet& data, int ell) {
    const int m = data.m();
    if (ell < 1 || ell >= m)
        throw std::invalid_argument("mean_difference: ell must be in 1..m-1");
    Eigen::MatrixXd before = Eigen::MatrixXd::Zero(data.p(), data.n());
    Eigen::MatrixXd after = Eigen::MatrixXd::Zero(data.p(), data.n());
    for (int i = 0; i < ell; ++i) before += data.profiles[i];
    for (int i = ell; i < m; ++i) after += data.profiles[i];
    const double scale = std::sqrt(static_cast<double>(ell) * (m - ell) / m);
    ProfileFunction delta;
    delta.grid = data.grid;
    delta.values = scale * (before / ell - after / (m - ell));
    return delta;
}

Eigen::VectorXd compute_U(const ProfileFunction& delta, const FittedModel& model) {
    if (!delta.grid.same_as(model.basis.grid))
        throw std::invalid_argument("compute_U: grid mismatch");
    if (model.channel_cov.size() != model.basis.d)
        throw std::invalid_argument("compute_U: model has no factorized covariances");
    const Eigen::MatrixXd b =
        (model.basis.eigenfunctions * model.basis.grid.weights.asDiagonal()).transpose();
    const Eigen::MatrixXd eta = delta.values * b;  // p x d
    Eigen::VectorXd u(model.basis.d);
    for (int k = 0; k < model.basis.d; ++k)
        u[k] = model.channel_cov.quadratic_form(k, eta.col(k));
    return u;
}

ScanResult scan_Q(const ProfileSet& data, const FittedModel& model, double c) {
    if (c < 0.0) throw std::invalid_argument("scan_Q: c must be nonnegative");
    if (!data.grid.same_as(model.basis.grid))
        throw std::invalid_argument("scan_Q: grid mismatch");
    const int m = data.m();
    const int d = model.basis.d;
    const int p = data.p();

    // Project every profile once, then scan in coefficient space via prefix
    // sums: O(m*d*(n + p^2)) for the whole scan.
    const Eigen::MatrixXd b =
        (model.basis.eigenfunctions * model.basis.grid.weights.asDiagonal()).transpose();
    std::vector<Eigen::MatrixXd> prefix(m + 1, Eigen::MatrixXd::Zero(p, d));
    for (int i = 0; i < m; ++i)
        prefix[i + 1] = prefix[i] + data.profiles[i] * b;

    ScanResult scan;
    scan.c_used = c;
    scan.U.resize(m - 1, d);
    scan.scores.resize(m - 1);
    for (int ell = 1; ell < m; ++ell) {
        const double scale = std::sqrt(static_cast<double>(ell) * (m - ell) / m);
        const Eigen::MatrixXd eta =
            scale * (prefix[ell] / ell - (prefix[m] - prefix[ell]) / (m - ell));
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            const double u = model.channel_cov.quadratic_form(k, eta.col(k));
            scan.U(ell - 1, k) = u;
            s += std::max(u - c, 0.0);
        }
        scan.scores[ell - 1] = s;
    }
    scan.ell_star = 1;
    scan.Q = scan.scores[0];
    for (int ell = 2; ell < m; ++ell) {
        if (scan.scores[ell - 1] > scan.Q) {
            scan.Q = scan.scores[ell - 1];
            scan.ell_star = ell;
        }
    }
    return scan;
}

TestDecision decide(const ScanResult& scan, double L, double alpha) {
    if (!std::isfinite(L)) throw std::invalid_argument("decide: L must be finite");
    TestDecision out;
    out.Q = scan.Q;
    out.L = L;
    out.reject = scan.Q > L;
    out.tau_hat = scan.ell_star;
    out.alpha = alpha;
    out.c_used = scan.c_used;
    return out;
}

ChangePointMetrics change_point_metrics(const std::vector<int>& tau_hats, int tau) {
    if (tau_hats.empty())
        throw std::invalid_argument("change_point_metrics: empty input");
    ChangePointMetrics out;
    for (int th : tau_hats) {
        const int err = std::abs(th - tau);
        out.mae += err;
        if (err <= 1) out.p1 += 1.0;
        if (err <= 3) out.p3 += 1.0;
    }
    const double n = static_cast<double>(tau_hats.size());
    out.mae /= n;
    out.p1 /= n;
    out.p3 /= n;
    return out;
}

}  // namespace tpca
