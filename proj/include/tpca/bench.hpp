#ifndef TPCA_BENCH_HPP
#define TPCA_BENCH_HPP

#include <map>
#include <string>
#include <vector>

#include "tpca/calibration.hpp"
#include "tpca/tuning.hpp"

namespace tpca {

struct PowerRow {
    std::string oc_case;   // "I" | "II" | "III" | "IC"
    std::string channels;  // "all4" | "first2"
    int h = 0;
    std::string c_mode;    // "c0" | "c1" | "c2" | "fixed"
    double power = 0.0;
    double mae = 0.0;
    double p1 = 0.0;
    double p3 = 0.0;
    int reps = 0;
    std::uint64_t seed = 0;
};

struct PowerReport {
    std::vector<PowerRow> rows;
    int d = 0;
    double alpha = 0.0;
    std::map<std::string, double> c_values;  // c_mode -> c
    std::map<std::string, double> L_values;  // c_mode -> calibrated L
};

struct PowerStudyConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::string> c_modes;  // subset of {"c0","c1","c2"}
    int reps = 200;
    int calib_reps = 1000;
    double alpha = 0.05;
    int d = 45;
    std::uint64_t seed = 1;
    TuningConfig tuning;  // used for c1 (p, d0, delta filled from context)
    int threads = 0;
};

// Data-driven sparsity estimate for one scenario: d0 = number of components
// whose U value at the true change-point, computed on one pilot replicate,
// exceeds the upper-10% quantile of U values pooled from one in-control
// pilot replicate.
int estimate_scenario_d0(const GenerativeModel& model, const ScenarioSpec& scenario,
                         int d, std::uint64_t seed);

PowerReport run_power_study(const GenerativeModel& model, const PowerStudyConfig& cfg);

void emit_report(const PowerReport& report, const std::string& path, FileFormat format);
PowerReport load_report(const std::string& path, FileFormat format);

}  // namespace tpca

#endif
