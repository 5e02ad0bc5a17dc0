#include "tpca/calibration.hpp"

#include <cmath>
#include <cstring>
#include <iostream>
#include <random>
#include <stdexcept>

#include "tpca/rng.hpp"
#include "tpca/tuning.hpp"

namespace tpca {

std::uint64_t fnv1a_digest(const std::vector<double>& values) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

namespace {

ProfileSet sample_from_fitted(const FittedModel& model, int m,
                              std::uint64_t seed, std::uint64_t rep_index) {
    const int p = model.p;
    const int d = model.basis.d;
    std::mt19937_64 rng = make_stream(seed, rep_index);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ProfileSet data;
    data.grid = model.basis.grid;
    data.profiles.reserve(m);
    Eigen::MatrixXd coef(p, d);
    Eigen::VectorXd z(p);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < d; ++k) {
            for (int j = 0; j < p; ++j) z[j] = gauss(rng);
            coef.col(k) = model.channel_cov.sample(k, z);
        }
        data.profiles.push_back(coef * model.basis.eigenfunctions);  // p x n
    }
    return data;
}

double q_from_U(const Eigen::MatrixXd& u, double c) {
    double q = 0.0;
    for (int r = 0; r < u.rows(); ++r) {
        double s = 0.0;
        for (int k = 0; k < u.cols(); ++k) s += std::max(u(r, k) - c, 0.0);
        q = std::max(q, s);
    }
    return q;
}

}  // namespace

ProfileSet generate_null_replicate(const NullModel& model, int m,
                                   std::uint64_t seed, std::uint64_t rep_index) {
    if (m < 2) throw std::invalid_argument("generate_null_replicate: m must be >= 2");
    if (std::holds_alternative<FittedModel>(model))
        return sample_from_fitted(std::get<FittedModel>(model), m, seed, rep_index);
    return generate_dataset(std::get<GenerativeModel>(model), nullptr, m, seed, rep_index);
}

std::vector<CalibrationResult> calibrate_L_multi(const NullModel& model, int m,
                                                 double alpha,
                                                 const std::vector<double>& cs,
                                                 const CalibrationOptions& opts) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("calibrate_L: alpha must be in (0,1)");
    if (opts.reps < 1) throw std::invalid_argument("calibrate_L: reps must be >= 1");
    if (opts.reps < static_cast<int>(std::ceil(1.0 / alpha)))
        std::cerr << "calibrate_L: warning: reps < 1/alpha, quantile will be coarse\n";
    for (double c : cs)
        if (c < 0.0) throw std::invalid_argument("calibrate_L: c must be >= 0");

    // Optional single fitted model shared by all replicates (the default
    // re-fits per replicate so L absorbs estimation noise).
    FittedModel shared;
    if (!opts.refit_per_replicate) {
        if (std::holds_alternative<FittedModel>(model)) {
            shared = std::get<FittedModel>(model);
        } else {
            // Fit once on a dedicated replicate stream outside 0..reps-1.
            const ProfileSet data =
                generate_null_replicate(model, m, opts.seed, static_cast<std::uint64_t>(opts.reps));
            shared = fit_model(data, opts.d);
        }
    }

    const size_t nc = cs.size();
    std::vector<std::vector<double>> q(nc, std::vector<double>(opts.reps, 0.0));
    parallel_for(opts.reps, [&](int rep) {
        const ProfileSet data =
            generate_null_replicate(model, m, opts.seed, static_cast<std::uint64_t>(rep));
        const FittedModel fm =
            opts.refit_per_replicate ? fit_model(data, opts.d) : shared;
        const ScanResult scan = scan_Q(data, fm, 0.0);
        for (size_t ci = 0; ci < nc; ++ci)
            q[ci][rep] = q_from_U(scan.U, cs[ci]);
    }, opts.threads);

    std::vector<CalibrationResult> out(nc);
    for (size_t ci = 0; ci < nc; ++ci) {
        out[ci].L = upper_quantile(q[ci], alpha);
        out[ci].alpha = alpha;
        out[ci].reps = opts.reps;
        out[ci].c_used = cs[ci];
        out[ci].seed = opts.seed;
        out[ci].q_samples_digest = fnv1a_digest(q[ci]);
        out[ci].q_samples = std::move(q[ci]);
    }
    return out;
}

CalibrationResult calibrate_L(const NullModel& model, int m, double alpha, double c,
                              const CalibrationOptions& opts) {
    return calibrate_L_multi(model, m, alpha, {c}, opts)[0];
}

}  // namespace tpca
