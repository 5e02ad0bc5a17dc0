#ifndef TPCA_SIMGEN_HPP
#define TPCA_SIMGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tpca/fpca.hpp"
#include "tpca/profiles.hpp"

namespace tpca {

/// B-spline generative model: X(t) = sum_i theta_i B_i(t) with the theta_i
/// drawn independently per basis index from p-dimensional Gaussians.
struct GenerativeModel {
    SampleGrid grid;
    int n_basis = 66;
    Eigen::MatrixXd basis;               // n_basis x n, rows quadrature-orthonormal
    Eigen::MatrixXd means;               // n_basis x p
    std::vector<Eigen::MatrixXd> covs;   // n_basis matrices, p x p
    std::vector<Eigen::MatrixXd> chol;   // cached lower Cholesky factors

    int p() const { return static_cast<int>(means.cols()); }
    void refresh_factors();
    void validate() const;
};

enum class OcCase { I, II, III };
enum class ChannelScenario { All4, FirstTwo };

struct ScenarioSpec {
    OcCase oc_case = OcCase::II;
    int h = 1;  // magnitude index 1..7
    ChannelScenario channels = ChannelScenario::All4;
    int m = 200;
    int tau = 100;
    double shift_scale = 1.0;  // multiplier on the offset (1 = nominal)

    void validate() const;
};

// Cubic B-spline basis on an unevenly spaced (denser near the profile peak)
// clamped knot vector, orthonormalized against the grid quadrature.
Eigen::MatrixXd build_bspline_basis(const SampleGrid& grid, int n_basis);

// Raw (non-orthonormalized) B-splines, exposed for testing.
Eigen::MatrixXd eval_bspline_basis(const SampleGrid& grid,
                                   const std::vector<double>& knots, int order);
std::vector<double> default_knots(int n_basis);

GenerativeModel fit_generative_model(const ProfileSet& ic_data,
                                     const Eigen::MatrixXd& basis);

// Per-basis per-channel mean offsets for an out-of-control scenario
// (n_basis x p; zero outside the affected index set).
Eigen::MatrixXd oc_shift(const GenerativeModel& model, const ScenarioSpec& scenario);

// Draw m profiles; profiles tau+1..m add the scenario offsets. Passing a
// null scenario pointer generates in-control data.
ProfileSet generate_dataset(const GenerativeModel& model, const ScenarioSpec* scenario,
                            int m, std::uint64_t seed, std::uint64_t rep_index = 0);
ProfileSet generate_dataset(const GenerativeModel& model, const ScenarioSpec& scenario,
                            std::uint64_t seed);

// Shipped synthetic in-control reference model (stands in for the
// proprietary forging data).
GenerativeModel reference_model(const SampleGrid& grid, int n_basis = 66);

std::string generative_model_to_json(const GenerativeModel& model);
GenerativeModel generative_model_from_json(const std::string& text);
void save_generative_model(const GenerativeModel& model, const std::string& path);
GenerativeModel load_generative_model(const std::string& path);

}  // namespace tpca

#endif
