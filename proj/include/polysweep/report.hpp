#ifndef POLYSWEEP_REPORT_HPP
#define POLYSWEEP_REPORT_HPP

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "certificates.hpp"
#include "optimizer.hpp"
#include "specfile.hpp"

namespace polysweep {

// Machine-readable run output.  JSON for structure, CSV for plotting.  The
// timestamp lives in a single top-level field so consumers can exclude it
// when hashing or diffing reports.
struct RunReport {
    json doc;

    void set_timestamp(const std::string& ts) { doc["timestamp"] = ts; }

    void write_json(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw parse_error("cannot write report: " + path);
        out << doc.dump(2) << "\n";
    }

    std::string to_string() const { return doc.dump(2); }
};

inline json certificate_to_json(const CertificateReport& rep) {
    json j;
    j["stationarity_resid"] = rep.stationarity_resid;
    j["dynamics_resid"] = rep.dynamics_resid;
    j["transversality_resid"] = rep.transversality_resid;
    j["complementarity_ok"] = rep.complementarity_ok;
    j["sign_ok"] = rep.sign_ok;
    j["maximization_resid"] = rep.maximization_resid;
    j["nontriviality_norm"] = rep.nontriviality_norm;
    j["support_ok"] = rep.support_ok;
    j["Hbar_minus_mu"] = rep.Hbar_minus_mu;
    j["tol_used"] = rep.tol_used;
    j["passed"] = rep.passed();
    return j;
}

inline json bundle_to_json(const MultiplierBundle& b) {
    json j;
    j["mu0"] = b.mu0;
    j["Hbar"] = b.Hbar;
    j["rho_k"] = b.rho_k;
    j["etaT"] = detail::vec_to_json(b.etaT);
    j["lambdaT"] = detail::vec_to_json(b.lambdaT);
    j["p"] = json::array();
    for (const Vec& v : b.p) j["p"].push_back(detail::vec_to_json(v));
    j["q"] = json::array();
    for (const Vec& v : b.q) j["q"].push_back(detail::vec_to_json(v));
    j["gamma"] = json::array();
    for (const Vec& v : b.gamma) j["gamma"].push_back(detail::vec_to_json(v));
    j["psi"] = json::array();
    for (const Vec& v : b.psi) j["psi"].push_back(detail::vec_to_json(v));
    return j;
}

inline MultiplierBundle bundle_from_json(const json& j) {
    MultiplierBundle b;
    try {
        b.mu0 = j.at("mu0").get<double>();
        b.Hbar = j.value("Hbar", 0.0);
        b.rho_k = j.value("rho_k", 0.0);
        b.etaT = detail::json_to_vec(j.at("etaT"), "bundle.etaT");
        b.lambdaT = detail::json_to_vec(j.at("lambdaT"), "bundle.lambdaT");
        for (const json& v : j.at("p")) b.p.push_back(detail::json_to_vec(v, "bundle.p"));
        for (const json& v : j.at("q")) b.q.push_back(detail::json_to_vec(v, "bundle.q"));
        for (const json& v : j.at("gamma")) b.gamma.push_back(detail::json_to_vec(v, "bundle.gamma"));
        for (const json& v : j.at("psi")) b.psi.push_back(detail::json_to_vec(v, "bundle.psi"));
    } catch (const json::exception& e) {
        throw parse_error(std::string("bundle file: ") + e.what());
    }
    if (!b.p.empty()) {
        b.xi_u.assign(b.psi.size(), Vec::Zero(b.psi.empty() ? 0 : b.psi.front().size()));
        b.xi_y.assign(b.gamma.size(), Vec::Zero(b.p.front().size()));
    }
    return b;
}

inline json optimizer_to_json(const OptimizerResult& res) {
    json j;
    j["J"] = res.J;
    j["T"] = res.T;
    j["penalty"] = res.penalty;
    j["segments"] = res.segments;
    j["k"] = res.k;
    j["final_weight"] = res.final_weight;
    j["law"]["breakpoints"] = res.law.breakpoints;
    j["law"]["levels"] = json::array();
    for (const Vec& u : res.law.levels) j["law"]["levels"].push_back(detail::vec_to_json(u));
    j["history"] = json::array();
    for (const auto& [decision, value] : res.history)
        j["history"].push_back({{"decision", decision}, {"J", value}});
    return j;
}

// Fixed CSV column order: t, x_1..x_n, u_1..u_d, eta_1..eta_s, then the
// optional certificate columns p, q (per node) and gamma (per step).
inline void write_trajectory_csv(const std::string& path, const SweepingProblem& P,
                                 const DiscreteTrajectory& traj,
                                 const MultiplierBundle* bundle = nullptr) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write csv: " + path);
    out << std::setprecision(17);
    out << "t";
    for (int i = 0; i < P.n; ++i) out << ",x_" << i + 1;
    for (int c = 0; c < P.d; ++c) out << ",u_" << c + 1;
    for (int j = 0; j < P.C.s(); ++j) out << ",eta_" << j + 1;
    if (bundle) {
        for (int i = 0; i < P.n; ++i) out << ",p_" << i + 1;
        for (int i = 0; i < P.n; ++i) out << ",q_" << i + 1;
        for (int j = 0; j < P.C.s(); ++j) out << ",gamma_" << j + 1;
    }
    out << "\n";
    for (int i = 0; i <= traj.k; ++i) {
        out << traj.t(i);
        for (int c = 0; c < P.n; ++c) out << "," << traj.states[static_cast<std::size_t>(i)](c);
        const bool has_step = i < traj.k;
        for (int c = 0; c < P.d; ++c) {
            out << ",";
            if (has_step) out << traj.controls[static_cast<std::size_t>(i)](c);
        }
        for (int j = 0; j < P.C.s(); ++j) {
            out << ",";
            if (has_step && !traj.etas.empty()) out << traj.etas[static_cast<std::size_t>(i)](j);
        }
        if (bundle) {
            for (int c = 0; c < P.n; ++c) out << "," << bundle->p[static_cast<std::size_t>(i)](c);
            for (int c = 0; c < P.n; ++c) out << "," << bundle->q[static_cast<std::size_t>(i)](c);
            for (int j = 0; j < P.C.s(); ++j) {
                out << ",";
                if (has_step) out << bundle->gamma[static_cast<std::size_t>(i)](j);
            }
        }
        out << "\n";
    }
}

} // namespace polysweep

#endif
