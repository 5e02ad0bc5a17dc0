#include "tpca/fpca.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace tpca {

using nlohmann::json;

double ChannelCovarianceSet::quadratic_form(int k, const Eigen::VectorXd& eta) const {
    return eta.dot(factorizations[k].solve(eta));
}

Eigen::VectorXd ChannelCovarianceSet::sample(int k, const Eigen::VectorXd& z) const {
    return factorizations[k].matrixL() * z;
}

CovarianceKernel estimate_covariance_kernel(const ProfileSet& data) {
    const int m = data.m();
    if (m < 2) throw std::invalid_argument("estimate_covariance_kernel: need m >= 2");
    const int n = data.n();
    const int p = data.p();
    // Stack all successive differences (channels included) into one matrix so
    // the kernel is a single Gram product.
    Eigen::MatrixXd diffs((m - 1) * p, n);
    for (int i = 0; i + 1 < m; ++i)
        diffs.middleRows(i * p, p) = data.profiles[i + 1] - data.profiles[i];
    CovarianceKernel kernel;
    kernel.grid = data.grid;
    kernel.matrix = (diffs.transpose() * diffs) / (2.0 * (m - 1));
    return kernel;
}

BasisSet eigen_decompose(const CovarianceKernel& kernel, int d) {
    const int n = kernel.grid.n();
    if (d < 1 || d > n) throw std::invalid_argument("eigen_decompose: need 1 <= d <= n");
    if ((kernel.matrix - kernel.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("eigen_decompose: kernel is not symmetric");

    // Symmetrized quadrature-weighted problem: A = W^{1/2} C W^{1/2},
    // eigenfunctions v = W^{-1/2} u.
    const Eigen::VectorXd sqrt_w = kernel.grid.weights.cwiseSqrt();
    Eigen::MatrixXd a = sqrt_w.asDiagonal() * kernel.matrix * sqrt_w.asDiagonal();
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen_decompose: eigensolver failed");

    const double total = std::max(solver.eigenvalues().cwiseMax(0.0).sum(), 0.0);

    BasisSet basis;
    basis.grid = kernel.grid;
    basis.d = d;
    basis.eigenfunctions.resize(d, n);
    basis.eigenvalues.resize(d);
    // Eigen returns ascending order; take the top d.
    for (int k = 0; k < d; ++k) {
        const int idx = n - 1 - k;
        basis.eigenvalues[k] = std::max(solver.eigenvalues()[idx], 0.0);
        Eigen::VectorXd v = solver.eigenvectors().col(idx).cwiseQuotient(sqrt_w);
        // Sign convention: largest-|entry| coefficient positive, first on ties.
        int arg = 0;
        double best = std::abs(v[0]);
        for (int a2 = 1; a2 < n; ++a2)
            if (std::abs(v[a2]) > best) { best = std::abs(v[a2]); arg = a2; }
        if (v[arg] < 0.0) v = -v;
        basis.eigenfunctions.row(k) = v.transpose();
    }
    basis.variance_explained =
        total > 0.0 ? basis.eigenvalues.sum() / total : 1.0;
    return basis;
}

ChannelCovarianceSet make_channel_covariances(const std::vector<Eigen::MatrixXd>& sigmas) {
    ChannelCovarianceSet out;
    out.sigmas = sigmas;
    for (const auto& sigma : sigmas) {
        const int p = static_cast<int>(sigma.rows());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        double ridge = 0.0;
        if (!(lo > 0.0) || hi / lo > 1e12) {
            ridge = 1e-8 * sigma.trace() / p;
            if (!(ridge > 0.0)) ridge = 1e-12;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(
            sigma + ridge * Eigen::MatrixXd::Identity(p, p));
        if (llt.info() != Eigen::Success) {
            // Escalate the ridge until the factorization succeeds.
            double bump = std::max(ridge, 1e-12);
            while (llt.info() != Eigen::Success && bump < 1e6) {
                bump *= 10.0;
                llt.compute(sigma + bump * Eigen::MatrixXd::Identity(p, p));
            }
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("make_channel_covariances: factorization failed");
            ridge = bump;
        }
        out.factorizations.push_back(std::move(llt));
        out.ridge_applied.push_back(ridge);
    }
    return out;
}

ChannelCovarianceSet estimate_sigma_k(const ProfileSet& data, const BasisSet& basis) {
    if (!data.grid.same_as(basis.grid))
        throw std::invalid_argument("estimate_sigma_k: grid mismatch");
    const int m = data.m();
    const int p = data.p();
    const int d = basis.d;
    // B has column k = w .* v_k, so D * B projects a difference onto all bases.
    const Eigen::MatrixXd b =
        (basis.eigenfunctions * basis.grid.weights.asDiagonal()).transpose();
    std::vector<Eigen::MatrixXd> sigmas(d, Eigen::MatrixXd::Zero(p, p));
    for (int i = 0; i + 1 < m; ++i) {
        const Eigen::MatrixXd proj = (data.profiles[i + 1] - data.profiles[i]) * b;  // p x d
        for (int k = 0; k < d; ++k)
            sigmas[k].noalias() += proj.col(k) * proj.col(k).transpose();
    }
    for (auto& s : sigmas) s /= 2.0 * (m - 1);
    return make_channel_covariances(sigmas);
}

FittedModel fit_model(const ProfileSet& data, int d) {
    FittedModel model;
    const CovarianceKernel kernel = estimate_covariance_kernel(data);
    model.basis = eigen_decompose(kernel, d);
    model.channel_cov = estimate_sigma_k(data, model.basis);
    model.p = data.p();
    model.m_fit = data.m();
    return model;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        std::vector<double> row(m.cols());
        for (int c = 0; c < m.cols(); ++c) row[c] = m(r, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    return m;
}

}  // namespace

std::string model_to_json(const FittedModel& model) {
    json j;
    j["grid"] = std::vector<double>(model.basis.grid.points.data(),
                                    model.basis.grid.points.data() + model.basis.grid.n());
    j["d"] = model.basis.d;
    j["p"] = model.p;
    j["m_fit"] = model.m_fit;
    j["eigenfunctions"] = matrix_to_json(model.basis.eigenfunctions);
    j["eigenvalues"] = std::vector<double>(model.basis.eigenvalues.data(),
                                           model.basis.eigenvalues.data() + model.basis.d);
    j["variance_explained"] = model.basis.variance_explained;
    json sig = json::array();
    for (const auto& s : model.channel_cov.sigmas) sig.push_back(matrix_to_json(s));
    j["sigma_k"] = std::move(sig);
    j["ridge_applied"] = model.channel_cov.ridge_applied;
    return j.dump();
}

FittedModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    FittedModel model;
    std::vector<double> t = j.at("grid").get<std::vector<double>>();
    model.basis.grid = SampleGrid::from_points(
        Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<int>(t.size())));
    model.basis.d = j.at("d").get<int>();
    model.p = j.at("p").get<int>();
    model.m_fit = j.value("m_fit", 0);
    model.basis.eigenfunctions = matrix_from_json(j.at("eigenfunctions"));
    std::vector<double> ev = j.at("eigenvalues").get<std::vector<double>>();
    model.basis.eigenvalues =
        Eigen::Map<Eigen::VectorXd>(ev.data(), static_cast<int>(ev.size()));
    model.basis.variance_explained = j.value("variance_explained", 0.0);
    std::vector<Eigen::MatrixXd> sigmas;
    for (const auto& s : j.at("sigma_k")) sigmas.push_back(matrix_from_json(s));
    model.channel_cov = make_channel_covariances(sigmas);
    return model;
}

void save_model(const FittedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << model_to_json(model) << '\n';
}

FittedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace tpca
