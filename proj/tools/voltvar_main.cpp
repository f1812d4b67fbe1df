#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vvc/central.hpp"
#include "vvc/control.hpp"
#include "vvc/graph_matrices.hpp"
#include "vvc/io.hpp"
#include "vvc/network.hpp"
#include "vvc/powerflow.hpp"
#include "vvc/scenario.hpp"
#include "vvc/stability.hpp"
#include "vvc/trace.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// exit code contract: 0 success, 2 input error, 3 certified-unstable,
// 4 non-convergence / divergence
constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kUnstable = 3;
constexpr int kNoConverge = 4;

json vec_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string scheme_name(vvc::Scheme s) {
    switch (s) {
        case vvc::Scheme::GenericGP: return "gp";
        case vvc::Scheme::Droop: return "droop";
        case vvc::Scheme::Scaled: return "scaled";
        case vvc::Scheme::Delayed: return "delayed";
    }
    return "?";
}

struct SchemeOptions {
    std::string scheme = "scaled";
    std::optional<double> c;
    double epsilon = 0.3;
    double alpha = 0.3;
    std::string delayed_d = "droop";  // which D the delayed scheme uses
};

void add_scheme_options(CLI::App* cmd, SchemeOptions& opt) {
    cmd->add_option("--scheme", opt.scheme, "Control scheme: droop|scaled|delayed|gp")
        ->check(CLI::IsMember({"droop", "scaled", "delayed", "gp"}));
    cmd->add_option("--c", opt.c, "Override the per-bus VAR penalty with one value");
    cmd->add_option("--epsilon", opt.epsilon, "Scaled-scheme stepsize factor (default 0.3)");
    cmd->add_option("--alpha", opt.alpha, "Delayed-scheme relaxation weight (default 0.3)");
    cmd->add_option("--delayed-d", opt.delayed_d, "Delayed stepsize family: droop|scaled")
        ->check(CLI::IsMember({"droop", "scaled"}));
}

vvc::ControlConfig resolve_config(const SchemeOptions& opt, const vvc::FeederNetwork& net,
                                  const vvc::GraphMatrices& gm) {
    Eigen::VectorXd c = net.penalties();
    if (opt.c) c.setConstant(*opt.c);
    const Eigen::VectorXd lo = net.q_lower();
    const Eigen::VectorXd hi = net.q_upper();
    const Eigen::VectorXd mu = net.targets();
    if (opt.scheme == "droop") return vvc::make_droop(c, lo, hi, mu);
    if (opt.scheme == "scaled") return vvc::make_scaled(gm.X, c, opt.epsilon, lo, hi, mu);
    if (opt.scheme == "delayed") {
        if (opt.delayed_d == "scaled")
            return vvc::make_delayed_scaled(gm.X, c, opt.epsilon, opt.alpha, lo, hi, mu);
        return vvc::make_delayed_droop(c, opt.alpha, lo, hi, mu);
    }
    // generic: plain gradient projection with D = epsilon * I
    return vvc::make_generic(c, Eigen::VectorXd::Constant(net.n(), opt.epsilon), opt.alpha, lo,
                             hi, mu);
}

json stability_json(const vvc::StabilityReport& rep) {
    json doc;
    doc["scheme"] = scheme_name(rep.scheme);
    doc["lambda_max_H"] = rep.lambda_max_h;
    doc["stable"] = rep.stable;
    doc["epsilon_bound"] = rep.epsilon_bound;
    doc["alpha_bound"] = rep.alpha_bound;
    doc["alpha"] = rep.alpha;
    if (rep.droop_pd_ok) doc["droop_pd_ok"] = *rep.droop_pd_ok;
    return doc;
}

int cmd_matrices(const std::string& network_path) {
    const vvc::FeederNetwork net = vvc::FeederNetwork::from_json_file(network_path);
    const vvc::GraphMatrices gm = vvc::graph_matrices(net);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_x(gm.X, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(gm.B, Eigen::EigenvaluesOnly);
    json doc;
    doc["n"] = gm.n();
    doc["l"] = gm.n_lines();
    doc["meshed"] = gm.meshed;
    doc["lambda_min_X"] = es_x.eigenvalues().minCoeff();
    doc["lambda_max_X"] = es_x.eigenvalues().maxCoeff();
    doc["cond_X"] = es_x.eigenvalues().maxCoeff() / es_x.eigenvalues().minCoeff();
    doc["cond_B"] = es_b.eigenvalues().maxCoeff() / es_b.eigenvalues().minCoeff();
    std::cout << doc.dump(2) << "\n";
    return kOk;
}

int cmd_stability(const std::string& network_path, const SchemeOptions& opt) {
    const vvc::FeederNetwork net = vvc::FeederNetwork::from_json_file(network_path);
    const vvc::GraphMatrices gm = vvc::graph_matrices(net);
    const vvc::ControlConfig cfg = resolve_config(opt, net, gm);
    const vvc::StabilityReport rep = vvc::analyze(cfg, gm);
    std::cout << stability_json(rep).dump(2) << "\n";
    return rep.stable ? kOk : kUnstable;
}

int cmd_solve_centralized(const std::string& network_path, std::optional<double> c_override,
                          bool benchmark_variant, double tol, long max_iter) {
    const vvc::FeederNetwork net = vvc::FeederNetwork::from_json_file(network_path);
    const vvc::GraphMatrices gm = vvc::graph_matrices(net);
    Eigen::VectorXd c = net.penalties();
    if (c_override) c.setConstant(*c_override);
    const Eigen::VectorXd vbar =
        vvc::baseline_voltage(gm, net.injections_p(), net.loads_qc(), net.v0());
    const Eigen::VectorXd v_tilde = net.targets() - vbar;
    const Eigen::VectorXd lo = net.q_lower();
    const Eigen::VectorXd hi = net.q_upper();

    auto report = [&](vvc::central::Objective obj, bool zero_penalty) {
        const vvc::central::QpProblem prob =
            vvc::central::make_problem(gm, v_tilde, c, lo, hi, obj, zero_penalty);
        const vvc::central::QpSolution sol = vvc::central::solve(prob, tol, max_iter);
        json doc;
        doc["q"] = vec_json(sol.q);
        doc["objective_value"] = vvc::central::objective_value(prob, sol.q);
        doc["mismatch_norm"] = vvc::central::mismatch_norm(prob, sol.q);
        doc["iterations"] = sol.iterations;
        doc["residual"] = sol.residual;
        return doc;
    };

    json doc;
    doc["weighted"] = report(vvc::central::Objective::Weighted, false);
    if (benchmark_variant) {
        doc["benchmark"] = report(vvc::central::Objective::BenchmarkScaledIdentity, false);
        doc["benchmark_no_penalty"] =
            report(vvc::central::Objective::BenchmarkScaledIdentity, true);
    }
    std::cout << doc.dump(2) << "\n";
    return kOk;
}

int cmd_run_static(const std::string& network_path, const SchemeOptions& opt,
                   const std::string& plant_name, int max_iter, double tol,
                   const std::string& out_dir, bool full) {
    const vvc::FeederNetwork net = vvc::FeederNetwork::from_json_file(network_path);
    const vvc::GraphMatrices gm = vvc::graph_matrices(net);
    const vvc::ControlConfig cfg = resolve_config(opt, net, gm);
    const vvc::Plant plant = plant_name == "ac" ? vvc::Plant::Ac : vvc::Plant::Linear;
    const vvc::LoopResult res = vvc::run_static(net, gm, cfg, plant, max_iter, tol);

    fs::create_directories(out_dir);
    vvc::write_trace_csv((fs::path(out_dir) / "trace.csv").string(), res.trace, full);

    json doc;
    doc["converged"] = res.converged;
    doc["oscillating"] = res.oscillating;
    doc["plant_diverged"] = res.plant_diverged;
    doc["iterations"] = res.iterations;
    doc["final_mismatch"] = res.trace.empty() ? 0.0 : res.trace.back().mismatch_norm;
    doc["trace"] = (fs::path(out_dir) / "trace.csv").string();
    std::cout << doc.dump(2) << "\n";
    return res.converged ? kOk : kNoConverge;
}

int cmd_run_dynamic(const std::string& network_path, const std::string& profile_path,
                    const std::string& scheme, const std::string& plant_name, int homes,
                    double pv_peak, double rating_factor, double control_period,
                    const std::string& out_dir, bool full) {
    const vvc::FeederNetwork net = vvc::FeederNetwork::from_json_file(network_path);
    const vvc::GraphMatrices gm = vvc::graph_matrices(net);

    vvc::DynamicScenario scen;
    scen.profile = vvc::DailyProfile::from_csv(profile_path);
    scen.homes_per_bus = Eigen::VectorXi::Constant(net.n(), homes);
    scen.pv_peak_kw = pv_peak;
    scen.inverter_rating_factor = rating_factor;
    scen.control_period_s = control_period;

    vvc::DynamicControl ctrl;
    if (scheme == "none")
        ctrl.mode = vvc::DynamicControl::Mode::None;
    else if (scheme == "scaled")
        ctrl.mode = vvc::DynamicControl::Mode::Scaled;
    else
        ctrl.mode = vvc::DynamicControl::Mode::DelayedDroop;

    const vvc::Plant plant = plant_name == "linear" ? vvc::Plant::Linear : vvc::Plant::Ac;
    const vvc::DynamicResult res = vvc::run_dynamic(net, gm, scen, ctrl, plant);

    fs::create_directories(out_dir);
    vvc::write_trace_csv((fs::path(out_dir) / "trace.csv").string(), res.trace, full);
    vvc::write_text_atomic((fs::path(out_dir) / "summary.json").string(),
                           vvc::dynamic_summary_json(res));

    json doc;
    doc["plant_diverged"] = res.plant_diverged;
    doc["minutes"] = res.minutes.size();
    doc["trace"] = (fs::path(out_dir) / "trace.csv").string();
    doc["summary"] = (fs::path(out_dir) / "summary.json").string();
    std::cout << doc.dump(2) << "\n";
    return res.plant_diverged ? kNoConverge : kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distribution-feeder volt/VAR control simulation toolkit"};
    app.require_subcommand(1);

    std::string network_path, profile_path, out_dir = ".";
    std::string plant_static = "linear", plant_dyn = "ac";
    std::string dyn_scheme = "scaled";
    SchemeOptions scheme_opt;
    std::optional<double> c_override;
    bool benchmark_variant = false, full = false;
    int max_iter = 500, homes = 18;
    double tol = 1e-8, qp_tol = 1e-10, pv_peak = 3.0, rating_factor = 1.05,
           control_period = 5.0;
    long qp_iters = 500000;

    CLI::App* mat = app.add_subcommand("matrices", "Summarize the feeder graph matrices");
    mat->add_option("network", network_path, "Network JSON file")->required();

    CLI::App* stab = app.add_subcommand("stability-report", "Certify a controller configuration");
    stab->add_option("network", network_path, "Network JSON file")->required();
    add_scheme_options(stab, scheme_opt);

    CLI::App* cen = app.add_subcommand("solve-centralized", "Centralized reference solution");
    cen->add_option("network", network_path, "Network JSON file")->required();
    cen->add_option("--c", c_override, "Override the per-bus VAR penalty with one value");
    cen->add_flag("--benchmark-variant", benchmark_variant,
                  "Also solve the benchmark objective (with and without penalty)");
    cen->add_option("--tol", qp_tol, "Fixed-point residual tolerance");
    cen->add_option("--max-iter", qp_iters, "Projected-gradient iteration budget");

    CLI::App* rstat = app.add_subcommand("run-static", "Closed-loop static experiment");
    rstat->add_option("network", network_path, "Network JSON file")->required();
    add_scheme_options(rstat, scheme_opt);
    rstat->add_option("--plant", plant_static, "Plant model: linear|ac (default linear)")
        ->check(CLI::IsMember({"linear", "ac"}));
    rstat->add_option("--max-iter", max_iter, "Iteration cap (default 500)");
    rstat->add_option("--tol", tol, "Setpoint-update convergence tolerance");
    rstat->add_option("--out", out_dir, "Output directory (default .)");
    rstat->add_flag("--full", full, "Write per-bus q/v columns in the trace");

    CLI::App* rdyn = app.add_subcommand("run-dynamic", "Daily profile replay");
    rdyn->add_option("network", network_path, "Network JSON file")->required();
    rdyn->add_option("--profile", profile_path, "Profile CSV")->required();
    rdyn->add_option("--scheme", dyn_scheme, "none|scaled|delayed-droop")
        ->check(CLI::IsMember({"none", "scaled", "delayed-droop"}));
    rdyn->add_option("--plant", plant_dyn, "Plant model: ac|linear (default ac)")
        ->check(CLI::IsMember({"linear", "ac"}));
    rdyn->add_option("--homes", homes, "Homes per bus (default 18)");
    rdyn->add_option("--pv-peak", pv_peak, "PV peak capacity per home, kW (default 3)");
    rdyn->add_option("--rating-factor", rating_factor,
                     "Inverter apparent rating / PV peak (default 1.05)");
    rdyn->add_option("--control-period", control_period, "Control period, s (default 5)");
    rdyn->add_option("--out", out_dir, "Output directory (default .)");
    rdyn->add_flag("--full", full, "Write per-bus q/v columns in the trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (mat->parsed()) return cmd_matrices(network_path);
        if (stab->parsed()) return cmd_stability(network_path, scheme_opt);
        if (cen->parsed())
            return cmd_solve_centralized(network_path, c_override, benchmark_variant, qp_tol,
                                         qp_iters);
        if (rstat->parsed())
            return cmd_run_static(network_path, scheme_opt, plant_static, max_iter, tol, out_dir,
                                  full);
        if (rdyn->parsed())
            return cmd_run_dynamic(network_path, profile_path, dyn_scheme, plant_dyn, homes,
                                   pv_peak, rating_factor, control_period, out_dir, full);
    } catch (const vvc::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.residual << ")\n";
        return kNoConverge;
    } catch (const vvc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
