// Command-line front end: simulate | optimize | certify | sweep-alpha.
//
// Exit codes: 0 success / certificate passed, 1 check failure or runtime
// error, 2 usage or parse error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "polysweep/halfspace_benchmark.hpp"
#include "polysweep/report.hpp"

namespace {

using namespace polysweep;

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_path(const std::string& out) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".csv";
    return out + ".csv";
}

void apply_alpha(ProblemSpecFile& spec, const std::optional<double>& alpha) {
    if (alpha) spec.problem.phi_xref(0) = *alpha;
}

// First grid time at which any constraint row is active (the trajectory
// touches the boundary), or -1 if it never does.
double first_activity_time(const SweepingProblem& P, const DiscreteTrajectory& traj) {
    for (int i = 0; i <= traj.k; ++i) {
        const Vec& x = traj.states[static_cast<std::size_t>(i)];
        Vec r = eval_constraints(P.C, traj.t(i), x);
        if (r.maxCoeff() >= -activity_tol(x)) return traj.t(i);
    }
    return -1.0;
}

json feasibility_to_json(const FeasibilityReport& rep) {
    json j;
    j["state_feasible"] = rep.state_feasible;
    j["endpoint_x_ok"] = rep.endpoint_x_ok;
    j["endpoint_T_ok"] = rep.endpoint_T_ok;
    j["locality_ok"] = rep.locality_ok;
    j["velocity_cap_ok"] = rep.velocity_cap_ok;
    j["max_violation"] = rep.max_violation;
    j["worst_state_step"] = rep.worst_state_step;
    j["all_ok"] = rep.all_ok();
    return j;
}

void write_outputs(const RunReport& report, const SweepingProblem& P,
                   const DiscreteTrajectory* traj, const MultiplierBundle* bundle,
                   const std::string& out) {
    if (out.empty()) return;
    report.write_json(out);
    if (traj) write_trajectory_csv(csv_path(out), P, *traj, bundle);
}

int cmd_simulate(const std::string& spec_path, const std::vector<double>& levels,
                 const std::vector<double>& switches, double T, int k,
                 const std::optional<double>& alpha, const std::string& out) {
    ProblemSpecFile spec = load_problem_spec(spec_path);
    apply_alpha(spec, alpha);
    const SweepingProblem& P = spec.problem;

    const int m = static_cast<int>(switches.size()) + 1;
    if (static_cast<int>(levels.size()) != m * P.d)
        throw parse_error("simulate: expected " + std::to_string(m * P.d) +
                          " level values for " + std::to_string(m) + " segment(s), got " +
                          std::to_string(levels.size()));
    ControlLaw law;
    law.breakpoints.push_back(0.0);
    for (double s : switches) law.breakpoints.push_back(s);
    law.breakpoints.push_back(T);
    for (int j = 0; j < m; ++j) {
        Vec u(P.d);
        for (int c = 0; c < P.d; ++c) u(c) = levels[static_cast<std::size_t>(j * P.d + c)];
        law.levels.push_back(u);
    }

    DiscreteTrajectory traj = integrate(P, law, k);
    DiscretizationConfig cfg;
    cfg.k = k;
    FeasibilityReport feas = feasibility(P, traj, cfg);

    RunReport report;
    report.set_timestamp(iso_timestamp());
    report.doc["command"] = "simulate";
    report.doc["inputs"]["spec"] = emit_problem_spec(spec);
    report.doc["inputs"]["k"] = k;
    report.doc["inputs"]["law"]["breakpoints"] = law.breakpoints;
    report.doc["inputs"]["law"]["levels"] = json::array();
    for (const Vec& u : law.levels)
        report.doc["inputs"]["law"]["levels"].push_back(detail::vec_to_json(u));
    report.doc["cost"] = mayer_cost(P, traj);
    report.doc["first_activity_time"] = first_activity_time(P, traj);
    report.doc["inclusion_residual"] = inclusion_residual(P, traj);
    report.doc["feasibility"] = feasibility_to_json(feas);
    report.doc["trajectory"] = trajectory_to_json(traj);
    write_outputs(report, P, &traj, nullptr, out);

    std::cout << "simulated " << k << " steps over T = " << traj.T << "\n"
              << "cost                = " << mayer_cost(P, traj) << "\n"
              << "first activity time = " << first_activity_time(P, traj) << "\n"
              << "final state         = [" << traj.xT().transpose() << "]\n";
    return 0;
}

int cmd_optimize(const std::string& spec_path, int segments, int steps, std::uint64_t seed,
                 const std::vector<double>& T_bracket, const std::optional<double>& alpha,
                 double tol, const std::string& out) {
    ProblemSpecFile spec = load_problem_spec(spec_path);
    apply_alpha(spec, alpha);
    const SweepingProblem& P = spec.problem;

    OptimizerConfig cfg;
    cfg.segments = segments;
    cfg.k = std::max(100, steps / 2);
    cfg.seed = seed;
    cfg.endpoint_tol = tol;
    if (T_bracket.size() == 2) {
        cfg.T_lo = T_bracket[0];
        cfg.T_hi = T_bracket[1];
    }

    OptimizerResult coarse;
    try {
        coarse = optimize(P, cfg);
    } catch (const no_feasible_point& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    OptimizerResult res = refine(P, coarse, std::max(steps, coarse.k));

    DiscreteTrajectory traj = integrate(P, res.law, res.k);
    MultiplierBundle bundle = solve_multipliers(P, traj);
    CertificateReport cert = check_certificate(P, traj, bundle);

    RunReport report;
    report.set_timestamp(iso_timestamp());
    report.doc["command"] = "optimize";
    report.doc["inputs"]["spec"] = emit_problem_spec(spec);
    report.doc["inputs"]["segments"] = segments;
    report.doc["inputs"]["steps"] = steps;
    report.doc["inputs"]["seed"] = seed;
    report.doc["optimizer"] = optimizer_to_json(res);
    report.doc["trajectory"] = trajectory_to_json(traj);
    report.doc["bundle"] = bundle_to_json(bundle);
    report.doc["certificate"] = certificate_to_json(cert);
    write_outputs(report, P, &traj, &bundle, out);

    std::cout << "best cost J = " << res.J << " at T = " << res.T
              << " (endpoint violation " << res.penalty << ")\n"
              << "switch times:";
    for (std::size_t j = 1; j + 1 < res.law.breakpoints.size(); ++j)
        std::cout << " " << res.law.breakpoints[j];
    std::cout << "\nlevels:";
    for (const Vec& u : res.law.levels) std::cout << " [" << u.transpose() << "]";
    std::cout << "\ncertificate " << (cert.passed() ? "passed" : "did not pass") << "\n";
    return 0;
}

int cmd_certify(const std::string& spec_path, const std::string& traj_path,
                const std::string& bundle_path, double tol, const std::string& out) {
    ProblemSpecFile spec = load_problem_spec(spec_path);
    const SweepingProblem& P = spec.problem;

    std::ifstream in(traj_path);
    if (!in) throw parse_error("cannot open trajectory file: " + traj_path);
    json jt;
    try {
        in >> jt;
    } catch (const json::exception& e) {
        throw parse_error(traj_path + ": " + e.what());
    }
    DiscreteTrajectory traj = trajectory_from_json(jt);
    if (!traj.states.empty() && traj.states.front().size() != P.n)
        throw parse_error("certify: trajectory state dimension " +
                          std::to_string(traj.states.front().size()) +
                          " does not match spec n = " + std::to_string(P.n));

    DiscretizationConfig cfg;
    cfg.k = traj.k;
    FeasibilityReport feas = feasibility(P, traj, cfg);
    RunReport report;
    report.set_timestamp(iso_timestamp());
    report.doc["command"] = "certify";
    report.doc["inputs"]["spec"] = emit_problem_spec(spec);
    report.doc["inputs"]["trajectory_file"] = traj_path;
    report.doc["feasibility"] = feasibility_to_json(feas);

    if (!feas.state_feasible) {
        report.doc["verdict"] = "infeasible";
        write_outputs(report, P, &traj, nullptr, out);
        std::cout << "state constraint violated at step " << feas.worst_state_step
                  << " by " << feas.max_violation << "\n";
        return 1;
    }

    if (traj.etas.empty()) traj.etas = recover_eta(P, traj);

    MultiplierBundle bundle;
    if (!bundle_path.empty()) {
        std::ifstream bin(bundle_path);
        if (!bin) throw parse_error("cannot open bundle file: " + bundle_path);
        json jb;
        try {
            bin >> jb;
        } catch (const json::exception& e) {
            throw parse_error(bundle_path + ": " + e.what());
        }
        bundle = bundle_from_json(jb.contains("bundle") ? jb["bundle"] : jb);
    } else {
        bundle = solve_multipliers(P, traj);
    }

    CertificateReport cert = check_certificate(P, traj, bundle, tol);
    report.doc["bundle"] = bundle_to_json(bundle);
    report.doc["certificate"] = certificate_to_json(cert);
    report.doc["verdict"] = cert.passed() ? "certified" : "not certified";
    write_outputs(report, P, &traj, &bundle, out);

    std::vector<std::string> failures;
    if (cert.stationarity_resid > cert.tol_used) failures.push_back("stationarity");
    if (cert.dynamics_resid > cert.tol_used) failures.push_back("dynamics");
    if (cert.transversality_resid > cert.tol_used) failures.push_back("transversality");
    if (std::abs(cert.Hbar_minus_mu) > cert.tol_used) failures.push_back("final-time");
    if (cert.maximization_resid > cert.tol_used) failures.push_back("maximization");
    if (!cert.complementarity_ok) failures.push_back("complementarity");
    if (!cert.sign_ok) failures.push_back("sign");
    if (!cert.support_ok) failures.push_back("support");
    if (cert.nontriviality_norm <= cert.tol_used) failures.push_back("nontriviality");

    std::cout << "stationarity residual  = " << cert.stationarity_resid << "\n"
              << "dynamics residual      = " << cert.dynamics_resid << "\n"
              << "transversality residual= " << cert.transversality_resid << "\n"
              << "final-time residual    = " << cert.Hbar_minus_mu << "\n"
              << "maximization residual  = " << cert.maximization_resid << "\n"
              << "nontriviality norm     = " << cert.nontriviality_norm << "\n"
              << "tolerance              = " << cert.tol_used << "\n";
    if (failures.empty()) {
        std::cout << "certificate passed\n";
        return 0;
    }
    std::cout << "certificate failed:";
    for (const std::string& f : failures) std::cout << " " << f;
    std::cout << "\n";
    return 1;
}

int cmd_sweep_alpha(const std::string& spec_path, const std::vector<double>& alphas,
                    int segments, int steps, std::uint64_t seed, const std::string& out) {
    ProblemSpecFile spec = load_problem_spec(spec_path);

    RunReport report;
    report.set_timestamp(iso_timestamp());
    report.doc["command"] = "sweep-alpha";
    report.doc["inputs"]["spec"] = emit_problem_spec(spec);
    report.doc["inputs"]["alphas"] = alphas;
    report.doc["rows"] = json::array();

    std::printf("%8s  %-44s  %10s  %s\n", "alpha", "strategy costs (numeric)", "best J", "ordering");
    for (double alpha : alphas) {
        ProblemSpecFile inst = spec;
        apply_alpha(inst, alpha);
        const SweepingProblem& P = inst.problem;

        std::vector<BenchmarkStrategy> strategies = benchmark_strategies(alpha);
        std::vector<std::pair<double, std::string>> ranked;
        json jrow;
        jrow["alpha"] = alpha;
        jrow["strategies"] = json::array();
        std::string cost_col;
        for (const BenchmarkStrategy& s : strategies) {
            DiscreteTrajectory traj = integrate(P, s.law, steps, /*with_etas=*/false);
            const double J = mayer_cost(P, traj);
            ranked.emplace_back(J, s.name);
            jrow["strategies"].push_back({{"name", s.name},
                                          {"J_numeric", J},
                                          {"J_closed_form", s.closed_form_cost},
                                          {"T", s.T}});
            char buf[48];
            std::snprintf(buf, sizeof buf, "%s=%.4f ", s.name.c_str(), J);
            cost_col += buf;
        }

        OptimizerConfig cfg;
        cfg.segments = segments;
        cfg.k = steps;
        cfg.seed = seed;
        double bestJ = std::numeric_limits<double>::quiet_NaN();
        try {
            OptimizerResult res = optimize(P, cfg);
            bestJ = res.J;
            jrow["optimizer"] = {{"J", res.J}, {"T", res.T}};
        } catch (const no_feasible_point& e) {
            jrow["optimizer"] = {{"error", e.what()}};
        }

        std::sort(ranked.begin(), ranked.end());
        std::string ordering;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (i) ordering += " < ";
            ordering += ranked[i].second;
        }
        jrow["ordering"] = json::array();
        for (const auto& [J, name] : ranked) jrow["ordering"].push_back(name);
        report.doc["rows"].push_back(jrow);
        std::printf("%8.3f  %-44s  %10.4f  %s\n", alpha, cost_col.c_str(), bestJ, ordering.c_str());
    }
    if (!out.empty()) report.write_json(out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sweeping-process simulation, control optimization, and optimality certificates"};
    app.require_subcommand(1);

    std::string spec_path, out, traj_path, bundle_path;
    std::vector<double> levels, switches, T_bracket, alphas;
    double T = 1.0, tol = -1.0, endpoint_tol = 1e-3;
    std::optional<double> alpha;
    int k = 1000, steps = 1000, segments = 3;
    std::uint64_t seed = 1;

    CLI::App* sim = app.add_subcommand("simulate", "Integrate a piecewise-constant control law");
    sim->add_option("spec", spec_path, "problem spec file")->required();
    sim->add_option("--levels", levels, "control levels, segment-major")->required();
    sim->add_option("--switches", switches, "interior switch times");
    sim->add_option("--T", T, "horizon")->required();
    sim->add_option("--k", k, "number of steps");
    double alpha_val = 0.0;
    CLI::Option* sim_alpha = sim->add_option("--alpha", alpha_val, "override cost.xref[0]");
    sim->add_option("--out", out, "write JSON report (CSV written alongside)");

    CLI::App* opt = app.add_subcommand("optimize", "Search controls and horizon for minimum cost");
    opt->add_option("spec", spec_path, "problem spec file")->required();
    opt->add_option("--segments", segments, "control segments");
    opt->add_option("--steps,--k", steps, "integrator steps at the final mesh");
    opt->add_option("--seed", seed, "sampling seed");
    opt->add_option("--T-bracket", T_bracket, "horizon search bracket lo hi")->expected(2);
    CLI::Option* opt_alpha = opt->add_option("--alpha", alpha_val, "override cost.xref[0]");
    opt->add_option("--tol", endpoint_tol, "endpoint feasibility tolerance");
    opt->add_option("--out", out, "write JSON report (CSV written alongside)");

    CLI::App* cert = app.add_subcommand("certify", "Check necessary optimality conditions");
    cert->add_option("spec", spec_path, "problem spec file")->required();
    cert->add_option("--traj", traj_path, "trajectory JSON file")->required();
    cert->add_option("--bundle", bundle_path, "multiplier bundle JSON file (default: solve)");
    cert->add_option("--tol", tol, "certificate tolerance (default: mesh-scaled)");
    cert->add_option("--out", out, "write JSON report (CSV written alongside)");

    CLI::App* sweep = app.add_subcommand("sweep-alpha", "Compare strategies across cost targets");
    sweep->add_option("spec", spec_path, "problem spec file")->required();
    sweep->add_option("--alphas", alphas, "cost target values")->required();
    sweep->add_option("--segments", segments, "control segments for the optimizer");
    sweep->add_option("--steps,--k", steps, "integrator steps");
    sweep->add_option("--seed", seed, "sampling seed");
    sweep->add_option("--out", out, "write JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim_alpha->count() || opt_alpha->count()) alpha = alpha_val;
        if (sim->parsed()) return cmd_simulate(spec_path, levels, switches, T, k, alpha, out);
        if (opt->parsed())
            return cmd_optimize(spec_path, segments, steps, seed, T_bracket, alpha, endpoint_tol, out);
        if (cert->parsed()) return cmd_certify(spec_path, traj_path, bundle_path, tol, out);
        if (sweep->parsed()) return cmd_sweep_alpha(spec_path, alphas, segments, steps, seed, out);
    } catch (const polysweep::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
