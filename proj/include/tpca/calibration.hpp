#ifndef TPCA_CALIBRATION_HPP
#define TPCA_CALIBRATION_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "tpca/detector.hpp"
#include "tpca/simgen.hpp"

namespace tpca {

struct CalibrationResult {
    double L = 0.0;
    double alpha = 0.05;
    int reps = 0;
    double c_used = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t q_samples_digest = 0;  // FNV-1a over the Q sample bytes
    std::vector<double> q_samples;       // in replicate order
};

struct CalibrationOptions {
    int reps = 1000;
    std::uint64_t seed = 0;
    int d = 45;
    bool refit_per_replicate = true;  // re-fit the model on every null replicate
    int threads = 0;                  // 0 = auto
};

// Null-model source for calibration replicates: either a fitted in-control
// model (parametric bootstrap on Sigma_k) or a generative model.
using NullModel = std::variant<FittedModel, GenerativeModel>;

// Draw m in-control profiles; deterministic in (seed, rep_index).
ProfileSet generate_null_replicate(const NullModel& model, int m,
                                   std::uint64_t seed, std::uint64_t rep_index);

CalibrationResult calibrate_L(const NullModel& model, int m, double alpha, double c,
                              const CalibrationOptions& opts);

// Shared-replicate calibration for several c values at once: the scan's U
// matrix is computed once per replicate and thresholded per c.
std::vector<CalibrationResult> calibrate_L_multi(const NullModel& model, int m,
                                                 double alpha,
                                                 const std::vector<double>& cs,
                                                 const CalibrationOptions& opts);

std::uint64_t fnv1a_digest(const std::vector<double>& values);

}  // namespace tpca

#endif
