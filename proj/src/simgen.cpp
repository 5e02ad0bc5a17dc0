#include "tpca/simgen.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "tpca/chi2.hpp"
#include "tpca/rng.hpp"

namespace tpca {

using nlohmann::json;

namespace {
constexpr int kSplineOrder = 4;  // cubic
constexpr double kPeakCenter = 0.55;
constexpr double kPeakWidth = 0.18;
constexpr double kPeakKnotWeight = 0.25;  // mixture mass concentrated at the peak
}  // namespace

void GenerativeModel::refresh_factors() {
    chol.clear();
    const int pch = p();
    for (const auto& cov : covs) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        double ridge = 0.0;
        if (!(lo > 0.0) || hi / lo > 1e12) {
            ridge = 1e-8 * cov.trace() / pch;
            if (!(ridge > 0.0)) ridge = 1e-12;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov + ridge * Eigen::MatrixXd::Identity(pch, pch));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("GenerativeModel: covariance factorization failed");
        chol.push_back(llt.matrixL());
    }
}

void GenerativeModel::validate() const {
    grid.validate();
    if (basis.rows() != n_basis || basis.cols() != grid.n())
        throw std::invalid_argument("GenerativeModel: basis shape mismatch");
    if (means.rows() != n_basis)
        throw std::invalid_argument("GenerativeModel: means shape mismatch");
    if (static_cast<int>(covs.size()) != n_basis)
        throw std::invalid_argument("GenerativeModel: covs count mismatch");
}

void ScenarioSpec::validate() const {
    if (h < 1 || h > 7) throw std::invalid_argument("ScenarioSpec: h must be in 1..7");
    if (m < 2) throw std::invalid_argument("ScenarioSpec: m must be >= 2");
    if (tau < 1 || tau >= m) throw std::invalid_argument("ScenarioSpec: need 1 <= tau < m");
    if (!(shift_scale > 0.0)) throw std::invalid_argument("ScenarioSpec: shift_scale must be > 0");
}

std::vector<double> default_knots(int n_basis) {
    const int interior = n_basis - kSplineOrder;
    if (interior < 0) throw std::invalid_argument("default_knots: n_basis too small");
    // Interior knots are quantiles of an even mixture of Uniform(0,1) and a
    // truncated Gaussian at the profile peak, so the layout is denser there.
    auto cdf = [](double t) {
        const double lo = normal_cdf(-kPeakCenter / kPeakWidth);
        const double hi = normal_cdf((1.0 - kPeakCenter) / kPeakWidth);
        const double g = (normal_cdf((t - kPeakCenter) / kPeakWidth) - lo) / (hi - lo);
        return (1.0 - kPeakKnotWeight) * t + kPeakKnotWeight * g;
    };
    std::vector<double> knots;
    for (int j = 0; j < kSplineOrder; ++j) knots.push_back(0.0);
    for (int j = 1; j <= interior; ++j) {
        const double target = static_cast<double>(j) / (interior + 1);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < target ? lo : hi) = mid;
        }
        knots.push_back(0.5 * (lo + hi));
    }
    for (int j = 0; j < kSplineOrder; ++j) knots.push_back(1.0);
    return knots;
}

Eigen::MatrixXd eval_bspline_basis(const SampleGrid& grid,
                                   const std::vector<double>& knots, int order) {
    const int n_basis = static_cast<int>(knots.size()) - order;
    if (n_basis < 1) throw std::invalid_argument("eval_bspline_basis: too few knots");
    const int n = grid.n();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_basis, n);
    const int nk = static_cast<int>(knots.size());
    std::vector<double> nval(nk - 1);
    for (int a = 0; a < n; ++a) {
        const double t = grid.points[a];
        // Cox-de Boor, degree 0 upward; the last interval is closed at t = 1.
        for (int i = 0; i + 1 < nk; ++i) {
            const bool last = knots[i] < knots[i + 1] && knots[i + 1] >= knots[nk - 1];
            nval[i] = (t >= knots[i] && (t < knots[i + 1] || (last && t <= knots[i + 1])))
                          ? 1.0 : 0.0;
        }
        for (int k = 2; k <= order; ++k) {
            for (int i = 0; i + k < nk; ++i) {
                double v = 0.0;
                const double den1 = knots[i + k - 1] - knots[i];
                if (den1 > 0.0) v += (t - knots[i]) / den1 * nval[i];
                const double den2 = knots[i + k] - knots[i + 1];
                if (den2 > 0.0) v += (knots[i + k] - t) / den2 * nval[i + 1];
                nval[i] = v;
            }
        }
        for (int i = 0; i < n_basis; ++i) out(i, a) = nval[i];
    }
    return out;
}

Eigen::MatrixXd build_bspline_basis(const SampleGrid& grid, int n_basis) {
    if (n_basis > grid.n())
        throw std::invalid_argument("build_bspline_basis: n_basis exceeds grid size");
    Eigen::MatrixXd b = eval_bspline_basis(grid, default_knots(n_basis), kSplineOrder);
    // Modified Gram-Schmidt with one re-orthogonalization pass against the
    // quadrature inner product.
    const Eigen::VectorXd& w = grid.weights;
    auto ip = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return (f.array() * g.array() * w.array()).sum();
    };
    for (int i = 0; i < n_basis; ++i) {
        Eigen::VectorXd v = b.row(i).transpose();
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j)
                v -= ip(b.row(j).transpose(), v) * b.row(j).transpose();
        const double norm = std::sqrt(ip(v, v));
        if (norm < 1e-10)
            throw std::runtime_error(
                "build_bspline_basis: basis is numerically dependent on this grid; "
                "reduce n_basis or refine the grid");
        b.row(i) = (v / norm).transpose();
    }
    return b;
}

GenerativeModel fit_generative_model(const ProfileSet& ic_data,
                                     const Eigen::MatrixXd& basis) {
    ic_data.validate();
    const int m = ic_data.m();
    const int p = ic_data.p();
    const int nb = static_cast<int>(basis.rows());
    if (basis.cols() != ic_data.n())
        throw std::invalid_argument("fit_generative_model: basis/grid mismatch");
    if (m < 2) throw std::invalid_argument("fit_generative_model: need m >= 2");

    const Eigen::MatrixXd proj_op =
        (basis * ic_data.grid.weights.asDiagonal()).transpose();  // n x nb
    std::vector<Eigen::MatrixXd> coefs;  // per profile, p x nb
    coefs.reserve(m);
    for (const auto& x : ic_data.profiles) coefs.push_back(x * proj_op);

    GenerativeModel model;
    model.grid = ic_data.grid;
    model.n_basis = nb;
    model.basis = basis;
    model.means = Eigen::MatrixXd::Zero(nb, p);
    for (const auto& c : coefs) model.means += c.transpose();
    model.means /= m;
    for (int b = 0; b < nb; ++b) {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        for (const auto& c : coefs) {
            const Eigen::VectorXd dev = c.col(b) - model.means.row(b).transpose();
            cov.noalias() += dev * dev.transpose();
        }
        cov /= std::max(m - 1, 1);
        model.covs.push_back(std::move(cov));
    }
    model.refresh_factors();  // ridge-repairs degenerate covariances
    return model;
}

Eigen::MatrixXd oc_shift(const GenerativeModel& model, const ScenarioSpec& scenario) {
    scenario.validate();
    const int p = model.p();
    Eigen::MatrixXd offsets = Eigen::MatrixXd::Zero(model.n_basis, p);
    int first = 0, last = 0;  // 1-based, inclusive
    double big_delta = 0.0;
    switch (scenario.oc_case) {
        case OcCase::I:
            first = 30; last = 37; big_delta = scenario.h + 1.0;
            break;
        case OcCase::II:
            first = 16; last = 29; big_delta = scenario.h;
            break;
        case OcCase::III:
            first = 1; last = model.n_basis; big_delta = 0.1 * scenario.h;
            break;
    }
    const double value = (0.005 + 0.005 * big_delta) * scenario.shift_scale;
    const int ch = scenario.channels == ChannelScenario::All4 ? p : std::min(2, p);
    for (int b = first; b <= last && b <= model.n_basis; ++b)
        for (int j = 0; j < ch; ++j) offsets(b - 1, j) = value;
    return offsets;
}

ProfileSet generate_dataset(const GenerativeModel& model, const ScenarioSpec* scenario,
                            int m, std::uint64_t seed, std::uint64_t rep_index) {
    model.validate();
    if (m < 2) throw std::invalid_argument("generate_dataset: m must be >= 2");
    if (model.chol.size() != model.covs.size())
        throw std::invalid_argument("generate_dataset: model factors not refreshed");
    const int p = model.p();
    const int nb = model.n_basis;
    Eigen::MatrixXd offsets;
    int tau = m;
    if (scenario != nullptr) {
        scenario->validate();
        offsets = oc_shift(model, *scenario);
        tau = scenario->tau;
    }

    std::mt19937_64 rng = make_stream(seed, rep_index);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ProfileSet data;
    data.grid = model.grid;
    data.profiles.reserve(m);
    Eigen::MatrixXd theta(nb, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < m; ++i) {
        for (int b = 0; b < nb; ++b) {
            for (int j = 0; j < p; ++j) z[j] = gauss(rng);
            theta.row(b) = model.means.row(b) + (model.chol[b] * z).transpose();
        }
        if (scenario != nullptr && i >= tau) theta += offsets;
        data.profiles.push_back(theta.transpose() * model.basis);  // p x n
    }
    return data;
}

ProfileSet generate_dataset(const GenerativeModel& model, const ScenarioSpec& scenario,
                            std::uint64_t seed) {
    return generate_dataset(model, &scenario, scenario.m, seed, 0);
}

GenerativeModel reference_model(const SampleGrid& grid, int n_basis) {
    GenerativeModel model;
    model.grid = grid;
    model.n_basis = n_basis;
    model.basis = build_bspline_basis(grid, n_basis);

    const int p = 4;
    // Rise-peak-fall channel mean curves: similar shapes, unequal amplitudes
    // and slightly staggered peaks.
    const double amp[p] = {1.00, 0.92, 1.06, 0.88};
    const double peak[p] = {0.55, 0.53, 0.57, 0.55};
    const int n = grid.n();
    Eigen::MatrixXd target(p, n);
    for (int j = 0; j < p; ++j)
        for (int a = 0; a < n; ++a) {
            const double t = grid.points[a];
            const double bump = std::exp(-std::pow((t - peak[j]) / 0.14, 2));
            target(j, a) = amp[j] * (1.2 * bump + 0.3 * std::sin(M_PI * t));
        }
    model.means = (target * (model.basis * grid.weights.asDiagonal()).transpose())
                      .transpose();  // n_basis x p

    // Coefficient noise: geometric variance decay across basis index with a
    // common inter-channel correlation.
    const double sigma0 = 14.5;
    const double decay = 0.65;
    const double rho = 0.12;
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(p, p, rho);
    corr.diagonal().setOnes();
    double var = sigma0 * sigma0;
    for (int b = 0; b < n_basis; ++b) {
        model.covs.push_back(var * corr);
        var *= decay;
    }
    model.refresh_factors();
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

std::string generative_model_to_json(const GenerativeModel& model) {
    json j;
    j["grid"] = std::vector<double>(model.grid.points.data(),
                                    model.grid.points.data() + model.grid.n());
    j["n_basis"] = model.n_basis;
    j["basis"] = matrix_to_json(model.basis);
    j["means"] = matrix_to_json(model.means);
    json covs = json::array();
    for (const auto& c : model.covs) covs.push_back(matrix_to_json(c));
    j["covs"] = std::move(covs);
    return j.dump();
}

GenerativeModel generative_model_from_json(const std::string& text) {
    json j = json::parse(text);
    GenerativeModel model;
    std::vector<double> t = j.at("grid").get<std::vector<double>>();
    model.grid = SampleGrid::from_points(
        Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<int>(t.size())));
    model.n_basis = j.at("n_basis").get<int>();
    model.basis = matrix_from_json(j.at("basis"));
    model.means = matrix_from_json(j.at("means"));
    for (const auto& c : j.at("covs")) model.covs.push_back(matrix_from_json(c));
    model.validate();
    model.refresh_factors();
    return model;
}

void save_generative_model(const GenerativeModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << generative_model_to_json(model) << '\n';
}

GenerativeModel load_generative_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return generative_model_from_json(text);
}

}  // namespace tpca
