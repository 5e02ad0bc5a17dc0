#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpca/bench.hpp"
#include "tpca/calibration.hpp"
#include "tpca/chi2.hpp"
#include "tpca/detector.hpp"
#include "tpca/fpca.hpp"
#include "tpca/profiles.hpp"
#include "tpca/simgen.hpp"
#include "tpca/tuning.hpp"

namespace py = pybind11;
using namespace tpca;

namespace {

ProfileSet profile_set_from_array(const SampleGrid& grid,
                                  const std::vector<Eigen::MatrixXd>& profiles) {
    ProfileSet data;
    data.grid = grid;
    data.profiles = profiles;
    data.validate();
    return data;
}

}  // namespace

PYBIND11_MODULE(_tpca, m) {
    m.doc() = "Thresholded multivariate functional PCA for multichannel profile monitoring";

    py::class_<SampleGrid>(m, "SampleGrid")
        .def_static("uniform", &SampleGrid::uniform, py::arg("n"))
        .def_static("from_points", &SampleGrid::from_points, py::arg("t"))
        .def_readonly("points", &SampleGrid::points)
        .def_readonly("weights", &SampleGrid::weights)
        .def_property_readonly("n", &SampleGrid::n);

    py::class_<ProfileSet>(m, "ProfileSet")
        .def(py::init(&profile_set_from_array), py::arg("grid"), py::arg("profiles"))
        .def_readonly("grid", &ProfileSet::grid)
        .def_readonly("profiles", &ProfileSet::profiles)
        .def_property_readonly("m", &ProfileSet::m)
        .def_property_readonly("p", &ProfileSet::p);

    py::class_<BasisSet>(m, "BasisSet")
        .def_readonly("d", &BasisSet::d)
        .def_readonly("eigenfunctions", &BasisSet::eigenfunctions)
        .def_readonly("eigenvalues", &BasisSet::eigenvalues)
        .def_readonly("variance_explained", &BasisSet::variance_explained);

    py::class_<FittedModel>(m, "FittedModel")
        .def_readonly("basis", &FittedModel::basis)
        .def_readonly("p", &FittedModel::p)
        .def_property_readonly("d", &FittedModel::d)
        .def_property_readonly(
            "sigma_k", [](const FittedModel& self) { return self.channel_cov.sigmas; })
        .def_property_readonly("ridge_applied", [](const FittedModel& self) {
            return self.channel_cov.ridge_applied;
        });

    py::class_<ScanResult>(m, "ScanResult")
        .def_readonly("U", &ScanResult::U)
        .def_readonly("scores", &ScanResult::scores)
        .def_readonly("Q", &ScanResult::Q)
        .def_readonly("ell_star", &ScanResult::ell_star)
        .def_readonly("c_used", &ScanResult::c_used);

    py::class_<TestDecision>(m, "TestDecision")
        .def_readonly("reject", &TestDecision::reject)
        .def_readonly("Q", &TestDecision::Q)
        .def_readonly("L", &TestDecision::L)
        .def_readonly("tau_hat", &TestDecision::tau_hat)
        .def_readonly("alpha", &TestDecision::alpha)
        .def_readonly("c_used", &TestDecision::c_used);

    py::class_<ThresholdMoments>(m, "ThresholdMoments")
        .def_readonly("mu_c", &ThresholdMoments::mu_c)
        .def_readonly("sigma_c", &ThresholdMoments::sigma_c)
        .def_readonly("mu1_c", &ThresholdMoments::mu1_c)
        .def_readonly("sigma1_c", &ThresholdMoments::sigma1_c);

    py::enum_<OcCase>(m, "OcCase")
        .value("I", OcCase::I)
        .value("II", OcCase::II)
        .value("III", OcCase::III);
    py::enum_<ChannelScenario>(m, "ChannelScenario")
        .value("All4", ChannelScenario::All4)
        .value("FirstTwo", ChannelScenario::FirstTwo);

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("oc_case", &ScenarioSpec::oc_case)
        .def_readwrite("h", &ScenarioSpec::h)
        .def_readwrite("channels", &ScenarioSpec::channels)
        .def_readwrite("m", &ScenarioSpec::m)
        .def_readwrite("tau", &ScenarioSpec::tau)
        .def_readwrite("shift_scale", &ScenarioSpec::shift_scale);

    py::class_<GenerativeModel>(m, "GenerativeModel")
        .def_readonly("n_basis", &GenerativeModel::n_basis)
        .def_readonly("basis", &GenerativeModel::basis)
        .def_readonly("means", &GenerativeModel::means)
        .def_readonly("covs", &GenerativeModel::covs);

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("L", &CalibrationResult::L)
        .def_readonly("alpha", &CalibrationResult::alpha)
        .def_readonly("reps", &CalibrationResult::reps)
        .def_readonly("c_used", &CalibrationResult::c_used)
        .def_readonly("q_samples", &CalibrationResult::q_samples);

    m.def("load_profiles", [](const std::string& path) {
        return load_profiles(path, format_from_path(path));
    });
    m.def("save_profiles", [](const ProfileSet& data, const std::string& path) {
        save_profiles(data, path, format_from_path(path));
    });
    m.def("fit_model", &fit_model, py::arg("data"), py::arg("d"));
    m.def("mean_difference", &mean_difference, py::arg("data"), py::arg("ell"));
    m.def("scan", &scan_Q, py::arg("data"), py::arg("model"), py::arg("c"));
    m.def("decide", &decide, py::arg("scan"), py::arg("L"), py::arg("alpha"));

    m.def("soft_threshold_moments", &soft_threshold_moments, py::arg("p"), py::arg("c"),
          py::arg("delta"));
    m.def("select_c1",
          [](int p, int d, int d0, double delta, double alpha) {
              TuningConfig cfg;
              cfg.mode = CMode::c1;
              cfg.p = p;
              cfg.d = d;
              cfg.d0 = d0;
              cfg.delta = delta;
              cfg.alpha = alpha;
              return select_c1(cfg);
          },
          py::arg("p"), py::arg("d"), py::arg("d0") = 0, py::arg("delta") = 1.0,
          py::arg("alpha") = 0.05);
    m.def("select_c2", &select_c2, py::arg("p"), py::arg("d"));
    m.def("estimate_d0", &estimate_d0, py::arg("u_ic"), py::arg("u_oc"));
    m.def("chi2_log_survival", &chi2_log_survival, py::arg("p"), py::arg("c"));
    m.def("chi2_survival", &chi2_survival, py::arg("p"), py::arg("c"));

    m.def("reference_model", &reference_model, py::arg("grid"), py::arg("n_basis") = 66);
    m.def("build_bspline_basis", &build_bspline_basis, py::arg("grid"), py::arg("n_basis"));
    m.def("fit_generative_model", &fit_generative_model, py::arg("ic_data"), py::arg("basis"));
    m.def("oc_shift", &oc_shift, py::arg("model"), py::arg("scenario"));
    m.def("generate_dataset",
          [](const GenerativeModel& model, const ScenarioSpec* scenario, int m,
             std::uint64_t seed, std::uint64_t rep_index) {
              return generate_dataset(model, scenario, m, seed, rep_index);
          },
          py::arg("model"), py::arg("scenario").none(true), py::arg("m"), py::arg("seed"),
          py::arg("rep_index") = 0);

    m.def("calibrate_L",
          [](const GenerativeModel& model, int m, double alpha, double c, int reps,
             std::uint64_t seed, int d) {
              CalibrationOptions opts;
              opts.reps = reps;
              opts.seed = seed;
              opts.d = d;
              return calibrate_L(model, m, alpha, c, opts);
          },
          py::arg("model"), py::arg("m"), py::arg("alpha"), py::arg("c"), py::arg("reps"),
          py::arg("seed"), py::arg("d") = 45);
}
