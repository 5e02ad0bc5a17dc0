// Command-line front end: simulate | fit | detect | calibrate | tune | power | report.
//
// Exit codes: 0 success, 1 validation error, 2 runtime/numerical error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpca/bench.hpp"
#include "tpca/calibration.hpp"
#include "tpca/chi2.hpp"
#include "tpca/detector.hpp"
#include "tpca/fpca.hpp"
#include "tpca/profiles.hpp"
#include "tpca/rng.hpp"
#include "tpca/simgen.hpp"
#include "tpca/tuning.hpp"

namespace {

using nlohmann::json;
using namespace tpca;

constexpr std::uint64_t kDefaultSeed = 12345;

std::string fmt6(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

OcCase parse_case(const std::string& s) {
    if (s == "I" || s == "i" || s == "1") return OcCase::I;
    if (s == "II" || s == "ii" || s == "2") return OcCase::II;
    if (s == "III" || s == "iii" || s == "3") return OcCase::III;
    throw CLI::ValidationError("--case", "expected I, II, or III");
}

ChannelScenario parse_channels(const std::string& s) {
    if (s == "all4") return ChannelScenario::All4;
    if (s == "first2") return ChannelScenario::FirstTwo;
    throw CLI::ValidationError("--channels", "expected all4 or first2");
}

CMode parse_c_mode(const std::string& s) {
    if (s == "c0") return CMode::c0;
    if (s == "c1") return CMode::c1;
    if (s == "c2") return CMode::c2;
    if (s == "fixed") return CMode::fixed;
    throw CLI::ValidationError("--c-mode", "expected c0, c1, c2, or fixed");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

// Inject values from a flat --config JSON for every long option not already
// present on the command line (CLI flag > config file > default).
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
    std::string config_path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    json j;
    in >> j;
    std::vector<std::string> out = args;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string flag = "--" + it.key();
        bool present = false;
        for (const auto& a : out)
            if (a == flag || a.rfind(flag + "=", 0) == 0) { present = true; break; }
        if (present) continue;
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) out.push_back(flag);
        } else if (it.value().is_string()) {
            out.push_back(flag + "=" + it.value().get<std::string>());
        } else {
            out.push_back(flag + "=" + it.value().dump());
        }
    }
    return out;
}

GenerativeModel resolve_generative(const std::string& model_path, int n_grid) {
    if (!model_path.empty()) return load_generative_model(model_path);
    return reference_model(SampleGrid::uniform(n_grid));
}

void require_nondegenerate(const FittedModel& model) {
    if (!(model.basis.eigenvalues.sum() > 0.0))
        throw std::invalid_argument(
            "degenerate data: zero covariance model (profiles carry no variation)");
}

int run(int argc, char** argv) {
    CLI::App app{"Thresholded multivariate functional PCA for multichannel profile monitoring"};
    app.require_subcommand(1);
    // --h is a domain flag (shift magnitude), so help is long-form only.
    app.set_help_flag("--help", "print help");

    std::string config_path;
    int threads = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--threads", threads, "worker count (0 = auto, or the TPCA_THREADS environment variable)");
    app.add_flag("-v,--verbose", verbose, "echo the effective configuration");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate a profile dataset");
    std::string sim_case = "II", sim_channels = "all4", sim_out, sim_model;
    int sim_h = 1, sim_m = 200, sim_tau = 100, sim_n = 401;
    bool sim_ic = false;
    double sim_shift_scale = 1.0;
    std::uint64_t sim_seed = kDefaultSeed;
    bool sim_seed_given = false;
    sim->add_option("--case", sim_case, "OC case: I, II, or III");
    sim->add_option("--h", sim_h, "magnitude index 1..7")->check(CLI::Range(1, 7));
    sim->add_option("--channels", sim_channels, "all4 or first2");
    sim->add_option("--m", sim_m, "profile count");
    sim->add_option("--tau", sim_tau, "change point");
    sim->add_option("--n", sim_n, "grid size when using the reference model");
    sim->add_option("--shift-scale", sim_shift_scale, "multiplier on the OC offset");
    sim->add_flag("--ic", sim_ic, "generate in-control data (ignore the scenario)");
    sim->add_option("--model", sim_model, "generative model JSON (default: shipped reference)");
    sim->add_option("--seed", sim_seed, "RNG seed")->each([&](const std::string&) { sim_seed_given = true; });
    sim->add_option("--out", sim_out, "output file (.csv or .json)")->required();

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "fit the in-control functional model");
    std::string fit_in, fit_out;
    int fit_d = 45;
    fit->add_option("--in", fit_in, "profile dataset")->required();
    fit->add_option("--d", fit_d, "retained components");
    fit->add_option("--out", fit_out, "fitted model JSON")->required();

    // ---- detect ----
    auto* det = app.add_subcommand("detect", "scan a dataset for a mean change");
    std::string det_in, det_model, det_out, det_c_mode = "c2";
    int det_d = 45, det_d0 = 0, det_reps = 1000;
    double det_alpha = 0.05, det_delta = 1.0, det_fixed_c = -1.0, det_L = -1.0;
    std::uint64_t det_seed = kDefaultSeed;
    bool det_scores = false, det_seed_given = false;
    det->add_option("--in", det_in, "profile dataset")->required();
    det->add_option("--model", det_model, "fitted model JSON (default: fit from the data)");
    det->add_option("--d", det_d, "retained components");
    det->add_option("--c-mode", det_c_mode, "c0 | c1 | c2 | fixed");
    det->add_option("--c", det_fixed_c, "fixed soft-threshold value");
    det->add_option("--d0", det_d0, "affected-component count for c1 (0 = d/3)");
    det->add_option("--delta", det_delta, "per-coordinate shift for c1");
    det->add_option("--alpha", det_alpha, "type-I error level");
    det->add_option("--L", det_L, "explicit threshold (skips calibration)");
    det->add_option("--reps", det_reps, "calibration replicates");
    det->add_option("--seed", det_seed, "RNG seed")->each([&](const std::string&) { det_seed_given = true; });
    det->add_flag("--scores", det_scores, "include per-candidate scores in the report");
    det->add_option("--out", det_out, "detection report JSON (default: stdout)");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "Monte Carlo threshold for Q_m");
    std::string cal_model, cal_data, cal_out, cal_dump, cal_c_mode = "fixed";
    int cal_m = 200, cal_d = 45, cal_reps = 1000;
    double cal_alpha = 0.05, cal_c = 0.0;
    std::uint64_t cal_seed = kDefaultSeed;
    bool cal_reuse = false, cal_seed_given = false;
    cal->add_option("--model", cal_model, "generative model JSON (default: shipped reference)");
    cal->add_option("--data", cal_data, "profile dataset to fit the null model from");
    cal->add_option("--m", cal_m, "profiles per replicate");
    cal->add_option("--d", cal_d, "retained components");
    cal->add_option("--alpha", cal_alpha, "type-I error level");
    cal->add_option("--c", cal_c, "soft-threshold value");
    cal->add_option("--reps", cal_reps, "replicates");
    cal->add_option("--seed", cal_seed, "RNG seed")->each([&](const std::string&) { cal_seed_given = true; });
    cal->add_flag("--reuse-model", cal_reuse, "fit one model and reuse it across replicates");
    cal->add_option("--out", cal_out, "CalibrationResult JSON (default: stdout)");
    cal->add_option("--dump-q", cal_dump, "also write the raw Q sample as CSV");

    // ---- tune ----
    auto* tun = app.add_subcommand("tune", "soft-threshold parameter selection");
    std::string tun_mode;
    int tun_p = 4, tun_d = 45, tun_d0 = 0;
    double tun_delta = 1.0, tun_alpha = 0.05;
    bool tun_moments = false;
    tun->add_option("--p", tun_p, "channel count");
    tun->add_option("--d", tun_d, "retained components");
    tun->add_option("--mode", tun_mode, "c0 | c1 | c2 (default: print all three)");
    tun->add_option("--d0", tun_d0, "affected-component count (0 = d/3)");
    tun->add_option("--delta", tun_delta, "per-coordinate shift");
    tun->add_option("--alpha", tun_alpha, "type-I error level");
    tun->add_flag("--moments", tun_moments, "print the moments table as CSV");

    // ---- power ----
    auto* pow = app.add_subcommand("power", "replicate the power/benchmark study");
    std::string pow_cases = "II", pow_channels = "all4", pow_cmodes = "c0,c1,c2";
    std::string pow_h = "1,2,3,4,5,6,7", pow_out, pow_model;
    int pow_reps = 200, pow_calib_reps = 1000, pow_d = 45, pow_m = 200, pow_tau = 100;
    int pow_n = 101, pow_p = 4, pow_d0 = 0;
    double pow_alpha = 0.05, pow_delta = 1.0, pow_shift_scale = 1.0;
    std::uint64_t pow_seed = kDefaultSeed;
    bool pow_seed_given = false;
    pow->add_option("--cases", pow_cases, "comma list of I,II,III");
    pow->add_option("--h", pow_h, "comma list of magnitudes in 1..7");
    pow->add_option("--channels", pow_channels, "comma list of all4,first2");
    pow->add_option("--c-modes", pow_cmodes, "comma list of c0,c1,c2");
    pow->add_option("--reps", pow_reps, "replicates per scenario");
    pow->add_option("--calib-reps", pow_calib_reps, "calibration replicates");
    pow->add_option("--alpha", pow_alpha, "type-I error level");
    pow->add_option("--d", pow_d, "retained components");
    pow->add_option("--d0", pow_d0, "affected-component count for c1 (0 = estimate from a pilot replicate)");
    pow->add_option("--delta", pow_delta, "per-coordinate shift for c1");
    pow->add_option("--m", pow_m, "profiles per dataset");
    pow->add_option("--tau", pow_tau, "change point");
    pow->add_option("--n", pow_n, "grid size when using the reference model");
    pow->add_option("--p", pow_p, "channel count (for c rules)");
    pow->add_option("--shift-scale", pow_shift_scale, "multiplier on the OC offsets");
    pow->add_option("--model", pow_model, "generative model JSON (default: shipped reference)");
    pow->add_option("--seed", pow_seed, "RNG seed")->each([&](const std::string&) { pow_seed_given = true; });
    pow->add_option("--out", pow_out, "report file (.csv or .json)")->required();

    // ---- report ----
    auto* rep = app.add_subcommand("report", "convert a power report between CSV and JSON");
    std::string rep_in, rep_out;
    rep->add_option("--in", rep_in, "input report (.csv or .json)")->required();
    rep->add_option("--out", rep_out, "output report (.csv or .json)")->required();

    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(args);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/message
        std::exit(code == 0 ? 0 : 1);
    }

    auto note_default_seed = [](bool given, std::uint64_t seed) {
        if (!given)
            std::cerr << "note: no --seed given, using fixed default seed " << seed << "\n";
    };

    if (*sim) {
        note_default_seed(sim_seed_given, sim_seed);
        const GenerativeModel model = resolve_generative(sim_model, sim_n);
        ProfileSet data;
        if (sim_ic) {
            data = generate_dataset(model, nullptr, sim_m, sim_seed, 0);
        } else {
            ScenarioSpec scen;
            scen.oc_case = parse_case(sim_case);
            scen.h = sim_h;
            scen.channels = parse_channels(sim_channels);
            scen.m = sim_m;
            scen.tau = sim_tau;
            scen.shift_scale = sim_shift_scale;
            data = generate_dataset(model, scen, sim_seed);
        }
        save_profiles(data, sim_out, format_from_path(sim_out));
        if (verbose) std::cerr << "wrote " << sim_out << " (m=" << data.m() << ")\n";
        return 0;
    }

    if (*fit) {
        const ProfileSet data = load_profiles(fit_in, format_from_path(fit_in));
        const FittedModel model = fit_model(data, fit_d);
        save_model(model, fit_out);
        std::cout << "variance_explained " << fmt6(model.basis.variance_explained) << "\n";
        return 0;
    }

    if (*det) {
        note_default_seed(det_seed_given, det_seed);
        const ProfileSet data = load_profiles(det_in, format_from_path(det_in));
        const FittedModel model =
            det_model.empty() ? fit_model(data, det_d) : load_model(det_model);
        require_nondegenerate(model);
        TuningConfig tcfg;
        tcfg.mode = parse_c_mode(det_c_mode);
        tcfg.p = model.p;
        tcfg.d = model.d();
        tcfg.d0 = det_d0;
        tcfg.delta = det_delta;
        tcfg.alpha = det_alpha;
        if (det_fixed_c >= 0.0) {
            tcfg.mode = CMode::fixed;
            tcfg.fixed_c = det_fixed_c;
        } else if (tcfg.mode == CMode::c1 && det_d0 == 0) {
            std::cerr << "note: c1 with default priors delta=" << det_delta
                      << ", d0=round(d/3)\n";
        }
        const double c = select_c(tcfg);
        double L = det_L;
        if (!(L >= 0.0)) {
            CalibrationOptions copts;
            copts.reps = det_reps;
            copts.seed = det_seed;
            copts.d = model.d();
            copts.threads = threads;
            L = calibrate_L(model, data.m(), det_alpha, c, copts).L;
        }
        const ScanResult scan = scan_Q(data, model, c);
        const TestDecision decision = decide(scan, L, det_alpha);
        json out;
        out["Q"] = decision.Q;
        out["L"] = decision.L;
        out["c"] = decision.c_used;
        out["reject"] = decision.reject;
        out["tau_hat"] = decision.tau_hat;
        out["alpha"] = decision.alpha;
        out["ridge_applied"] = model.channel_cov.ridge_applied;
        if (det_scores)
            out["scores"] = std::vector<double>(scan.scores.data(),
                                                scan.scores.data() + scan.scores.size());
        if (det_out.empty()) {
            std::cout << out.dump(2) << "\n";
        } else {
            std::ofstream f(det_out);
            f << out.dump(2) << "\n";
        }
        std::cout << (decision.reject ? "reject" : "no-change")
                  << " Q=" << fmt6(decision.Q) << " L=" << fmt6(decision.L)
                  << " tau_hat=" << decision.tau_hat << "\n";
        return 0;
    }

    if (*cal) {
        note_default_seed(cal_seed_given, cal_seed);
        NullModel model;
        if (!cal_data.empty()) {
            const ProfileSet data = load_profiles(cal_data, format_from_path(cal_data));
            FittedModel fm = fit_model(data, cal_d);
            require_nondegenerate(fm);
            model = std::move(fm);
        } else {
            model = resolve_generative(cal_model, 101);
        }
        CalibrationOptions copts;
        copts.reps = cal_reps;
        copts.seed = cal_seed;
        copts.d = cal_d;
        copts.refit_per_replicate = !cal_reuse;
        copts.threads = threads;
        const CalibrationResult res = calibrate_L(model, cal_m, cal_alpha, cal_c, copts);
        json out;
        out["L"] = res.L;
        out["alpha"] = res.alpha;
        out["reps"] = res.reps;
        out["c"] = res.c_used;
        out["seed"] = res.seed;
        out["q_samples_digest"] = res.q_samples_digest;
        if (cal_out.empty()) {
            std::cout << out.dump(2) << "\n";
        } else {
            std::ofstream f(cal_out);
            f << out.dump(2) << "\n";
        }
        if (!cal_dump.empty()) {
            std::ofstream f(cal_dump);
            f.precision(17);
            f << "rep,Q\n";
            for (size_t i = 0; i < res.q_samples.size(); ++i)
                f << i << ',' << res.q_samples[i] << '\n';
        }
        std::cout << "L " << fmt6(res.L) << "\n";
        return 0;
    }

    if (*tun) {
        TuningConfig tcfg;
        tcfg.p = tun_p;
        tcfg.d = tun_d;
        tcfg.d0 = tun_d0;
        tcfg.delta = tun_delta;
        tcfg.alpha = tun_alpha;
        if (tun_moments) {
            std::cout << "c,mu_c,sigma_c,mu1_c,sigma1_c\n";
            const double c_max = select_c2(tun_p, tun_d);
            for (double c = 0.0; c <= c_max + 1e-9; c += 0.5) {
                const ThresholdMoments m = soft_threshold_moments(tun_p, c, tun_delta);
                std::cout << fmt6(c) << ',' << fmt6(m.mu_c) << ',' << fmt6(m.sigma_c) << ','
                          << fmt6(m.mu1_c) << ',' << fmt6(m.sigma1_c) << "\n";
            }
            return 0;
        }
        if (tun_mode.empty()) {
            tcfg.mode = CMode::c1;
            std::cout << "mode,c\n";
            std::cout << "c0,0\n";
            std::cout << "c1," << fmt6(select_c1(tcfg)) << "\n";
            std::cout << "c2," << fmt6(select_c2(tun_p, tun_d)) << "\n";
        } else {
            tcfg.mode = parse_c_mode(tun_mode);
            std::cout << fmt6(select_c(tcfg)) << "\n";
        }
        return 0;
    }

    if (*pow) {
        note_default_seed(pow_seed_given, pow_seed);
        const GenerativeModel model = resolve_generative(pow_model, pow_n);
        PowerStudyConfig cfg;
        for (const auto& cs : split_list(pow_cases))
            for (const auto& ch : split_list(pow_channels))
                for (const auto& hs : split_list(pow_h)) {
                    ScenarioSpec scen;
                    scen.oc_case = parse_case(cs);
                    scen.channels = parse_channels(ch);
                    scen.h = std::stoi(hs);
                    scen.m = pow_m;
                    scen.tau = pow_tau;
                    scen.shift_scale = pow_shift_scale;
                    cfg.scenarios.push_back(scen);
                }
        cfg.c_modes = split_list(pow_cmodes);
        cfg.reps = pow_reps;
        cfg.calib_reps = pow_calib_reps;
        cfg.alpha = pow_alpha;
        cfg.d = pow_d;
        cfg.seed = pow_seed;
        cfg.tuning.p = pow_p;
        cfg.tuning.d = pow_d;
        cfg.tuning.d0 = pow_d0;
        cfg.tuning.delta = pow_delta;
        cfg.tuning.alpha = pow_alpha;
        cfg.threads = threads;
        const PowerReport report = run_power_study(model, cfg);
        emit_report(report, pow_out, format_from_path(pow_out));
        for (const auto& r : report.rows)
            std::cout << r.oc_case << ' ' << r.channels << " h=" << r.h << ' ' << r.c_mode
                      << " power=" << fmt6(r.power) << " mae=" << fmt6(r.mae)
                      << " p1=" << fmt6(r.p1) << " p3=" << fmt6(r.p3) << "\n";
        return 0;
    }

    if (*rep) {
        const PowerReport report = load_report(rep_in, format_from_path(rep_in));
        emit_report(report, rep_out, format_from_path(rep_out));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
