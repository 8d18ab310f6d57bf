#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "deltafbs/config.hpp"
#include "deltafbs/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string machine;
    std::string trajectory = "butterfly";
    std::string variants = "baseline,e";
    std::string lc = "196";
    std::string solver;
    std::string selector = "median";
    std::string switching;
    std::string out = "out";
    unsigned seed = 1;
    // validate-model
    int configs = 50;
    int freqs = 20;
    bool corrupt = false;
};

dfbs::Trajectory make_trajectory(const Options& opt, const dfbs::MachineConfig& mc) {
    dfbs::TrajectorySpec spec;
    spec.Ts = mc.sampling_time;
    if (opt.trajectory == "butterfly") {
        spec.shape = dfbs::Shape::Butterfly;
    } else if (opt.trajectory.rfind("square", 0) == 0) {
        spec.shape = dfbs::Shape::Square;
        auto colon = opt.trajectory.find(':');
        if (colon != std::string::npos) {
            std::istringstream os(opt.trajectory.substr(colon + 1));
            char comma;
            if (!(os >> spec.offset[0] >> comma >> spec.offset[1]))
                throw dfbs::ConfigError("square offset must be 'square:X,Y'");
        }
    } else {
        return dfbs::load_trajectory_csv(opt.trajectory, mc.geometry, {});
    }
    return dfbs::gen_trajectory(spec, mc.geometry);
}

dfbs::ControllerParams make_params(const Options& opt, const dfbs::MachineConfig& mc) {
    dfbs::ControllerParams p;
    p.method = mc.method;
    if (opt.lc == "auto")
        p.window_len = 0;
    else
        p.window_len = std::stoi(opt.lc);
    if (opt.selector == "median")
        p.selector = dfbs::Selector::Median;
    else if (opt.selector == "mean")
        p.selector = dfbs::Selector::Mean;
    else if (opt.selector == "mindist")
        p.selector = dfbs::Selector::MinDist;
    else if (opt.selector == "perpoint")
        p.selector = dfbs::Selector::PerPoint;
    else
        throw dfbs::ConfigError("unknown selector: " + opt.selector);
    if (!opt.solver.empty()) {
        if (opt.solver == "pinv")
            p.solver = dfbs::SolverKind::Pinv;
        else if (opt.solver == "qr")
            p.solver = dfbs::SolverKind::Qr;
        else
            throw dfbs::ConfigError("solver must be pinv or qr");
    }
    if (!opt.switching.empty()) {
        if (opt.switching == "on")
            p.switching = true;
        else if (opt.switching == "off")
            p.switching = false;
        else
            throw dfbs::ConfigError("switching must be on or off");
    }
    return p;
}

int cmd_run(const Options& opt) {
    dfbs::MachineConfig mc =
        opt.machine.empty() ? dfbs::default_machine() : dfbs::load_machine_config(opt.machine);
    dfbs::Trajectory traj = make_trajectory(opt, mc);
    dfbs::ControllerParams params = make_params(opt, mc);

    std::vector<dfbs::Variant> variants;
    std::istringstream vs(opt.variants);
    std::string tok;
    while (std::getline(vs, tok, ',')) variants.push_back(dfbs::parse_variant(tok));

    fs::create_directories(opt.out);
    auto rows = dfbs::run_comparison(traj, mc.geometry, mc.blocks, mc.distribution, variants,
                                     params);

    std::ofstream cmp(fs::path(opt.out) / "comparison.csv");
    cmp << "variant,wall_seconds,flops,rms_contour_um,max_contour_um,improvement_pct\n";
    for (const auto& row : rows) {
        cmp << row.report.variant << ',' << row.report.wall_seconds << ',' << row.report.flops
            << ',' << row.contour.rms * 1e3 << ',' << row.contour.max * 1e3 << ',';
        if (std::isfinite(row.improvement_pct) && row.report.variant != "baseline")
            cmp << row.improvement_pct;
        cmp << "\n";
        std::ofstream series(fs::path(opt.out) / ("series_" + row.report.variant + ".csv"));
        series << "t,xd,yd,zd,qdm_a,qdm_b,qdm_c,x,y,z,contour_mm\n";
        for (int k = 0; k < traj.size(); ++k) {
            series << traj.t[k];
            for (int c = 0; c < 3; ++c) series << ',' << traj.X(k, c);
            for (int c = 0; c < 3; ++c) series << ',' << row.q_dm(k, c);
            for (int c = 0; c < 3; ++c) series << ',' << row.sim.X(k, c);
            series << ',' << row.contour.e[k] << "\n";
        }
    }

    json manifest;
    manifest["machine"] = opt.machine.empty() ? "builtin-default" : opt.machine;
    manifest["trajectory"] = opt.trajectory;
    manifest["samples"] = traj.size();
    manifest["seed"] = opt.seed;
    manifest["lc_mode"] = opt.lc;
    manifest["grid_pitch_mm"] = params.grid_pitch;
    manifest["selector"] = opt.selector;
    json vrows = json::array();
    for (const auto& row : rows) {
        vrows.push_back({{"variant", row.report.variant},
                         {"window_len", row.report.window_len},
                         {"n", row.report.n},
                         {"n_up", row.report.n_up},
                         {"windows", row.report.windows},
                         {"settle_len", row.report.settle_len},
                         {"model_evals_per_window", row.report.model_evals_per_window},
                         {"wall_seconds", row.report.wall_seconds},
                         {"flops", row.report.flops}});
    }
    manifest["runs"] = vrows;
    std::ofstream(fs::path(opt.out) / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << "wrote " << rows.size() << " variant runs to " << opt.out << "\n";
    return 0;
}

int cmd_validate_model(const Options& opt) {
    dfbs::MachineConfig mc =
        opt.machine.empty() ? dfbs::default_machine() : dfbs::load_machine_config(opt.machine);
    dfbs::ParameterizedGJ param(mc.blocks, mc.geometry, mc.distribution);
    if (opt.corrupt) param.corrupt();
    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> ux(-80.0, 80.0), uy(-75.0, 20.0);
    double max_rel = 0.0;
    dfbs::FlopCount total;
    int evaluated = 0;
    for (int c = 0; c < opt.configs; ++c) {
        Eigen::Vector3d X(ux(rng), uy(rng), 0.0);
        dfbs::Configuration cfg;
        try {
            cfg = dfbs::make_configuration(mc.geometry, X);
        } catch (const dfbs::UnreachableError&) {
            continue;
        }
        dfbs::FlopCount fc;
        dfbs::RationalMatrixModel gj = param.evaluate(cfg, &fc);
        total.mul += fc.mul;
        total.add += fc.add;
        ++evaluated;
        Eigen::Matrix3d J = dfbs::jacobian(mc.geometry, cfg).J;
        for (int f = 0; f < opt.freqs; ++f) {
            double w = std::pow(10.0, -1.0 + 2.5 * f / std::max(1, opt.freqs - 1));
            std::complex<double> sigma(0.0, w);
            Eigen::Matrix3cd ref = dfbs::gj_inverse_freq(mc.blocks, J, mc.distribution, sigma);
            Eigen::Matrix3cd val = gj.eval(sigma);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double rel = std::abs(val(i, j) - ref(i, j)) / std::max(1e-12, ref.norm());
                    max_rel = std::max(max_rel, rel);
                }
        }
    }
    std::cout << "configurations evaluated: " << evaluated << "\n"
              << "max relative error vs numeric inversion: " << max_rel << "\n"
              << "flops per evaluation: "
              << (evaluated ? total.total() / evaluated : 0) << "\n";
    return max_rel > 1e-6 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LPV filtered-B-splines feedforward for prismatic delta printers"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* run = app.add_subcommand("run", "run controller variants and write CSV tables");
    run->add_option("--machine", opt.machine, "machine config JSON (default: builtin)");
    run->add_option("--trajectory", opt.trajectory,
                    "butterfly | square[:X,Y] | path to CSV of t,x,y,z");
    run->add_option("--variants", opt.variants, "comma list of baseline,a,b,c,d,e");
    run->add_option("--lc", opt.lc, "window length in samples, or 'auto'");
    run->add_option("--solver", opt.solver, "pinv | qr (overrides variant default)");
    run->add_option("--selector", opt.selector, "median | mean | mindist | perpoint");
    run->add_option("--switching", opt.switching, "on | off (overrides variant default)");
    run->add_option("--out", opt.out, "output directory");
    run->add_option("--seed", opt.seed, "rng seed recorded in the manifest");

    CLI::App* val = app.add_subcommand("validate-model",
                                       "check the offline parameterization against "
                                       "numeric inversion");
    val->add_option("--machine", opt.machine, "machine config JSON (default: builtin)");
    val->add_option("--configs", opt.configs, "number of random configurations");
    val->add_option("--freqs", opt.freqs, "frequencies per configuration");
    val->add_option("--seed", opt.seed, "rng seed");
    val->add_flag("--corrupt-parameterization", opt.corrupt,
                  "perturb the cached factors (negative-test fixture)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(opt);
        if (val->parsed()) return cmd_validate_model(opt);
    } catch (const dfbs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
