#ifndef POLYSWEEP_SPECFILE_HPP
#define POLYSWEEP_SPECFILE_HPP

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sweeping.hpp"

namespace polysweep {

using json = nlohmann::json;

namespace detail {

inline Vec json_to_vec(const json& j, const std::string& where) {
    if (!j.is_array()) throw parse_error(where + ": expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw parse_error(where + ": entry " + std::to_string(i) + " not numeric");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline Mat json_to_mat(const json& j, const std::string& where) {
    if (!j.is_array()) throw parse_error(where + ": expected an array of rows");
    if (j.empty()) return Mat(0, 0);
    Mat M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
        Vec row = json_to_vec(j[r], where + " row " + std::to_string(r));
        if (row.size() != M.cols()) throw parse_error(where + ": ragged rows");
        M.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return M;
}

inline json vec_to_json(const Vec& v) {
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

inline json mat_to_json(const Mat& M) {
    json j = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) j.push_back(vec_to_json(M.row(r).transpose()));
    return j;
}

} // namespace detail

struct ProblemSpecFile {
    std::string name;
    SweepingProblem problem;
};

inline ProblemSpecFile parse_problem_spec(const json& j) {
    ProblemSpecFile spec;
    try {
        spec.name = j.contains("meta") && j["meta"].contains("name")
                        ? j["meta"]["name"].get<std::string>()
                        : "unnamed";
        SweepingProblem& P = spec.problem;
        P.n = j.at("dims").at("n").get<int>();
        P.d = j.at("dims").at("d").get<int>();
        const json& poly = j.at("polyhedron").at("rows");
        if (!poly.is_array() || poly.empty()) throw parse_error("polyhedron.rows: need at least one row");
        P.C.dim = P.n;
        for (std::size_t r = 0; r < poly.size(); ++r) {
            PolyhedronRow row;
            row.normal = detail::json_to_vec(poly[r].at("normal"),
                                             "polyhedron.rows[" + std::to_string(r) + "].normal");
            const double nrm = row.normal.norm();
            if (nrm < 1e-12)
                throw parse_error("polyhedron.rows[" + std::to_string(r) + "]: normal has length 0");
            if (std::abs(nrm - 1.0) > 1e-9)
                std::cerr << "warning: renormalizing polyhedron row " << r + 1
                          << " (norm was " << nrm << ")\n";
            row.normal /= nrm;
            row.offset0 = poly[r].at("offset0").get<double>();
            row.offset_slope = poly[r].at("offset_slope").get<double>();
            P.C.rows.push_back(row);
        }
        P.g_A = detail::json_to_mat(j.at("dynamics").at("A"), "dynamics.A");
        P.g_B = detail::json_to_mat(j.at("dynamics").at("B"), "dynamics.B");
        P.g_c = detail::json_to_vec(j.at("dynamics").at("c"), "dynamics.c");
        P.U_lo = detail::json_to_vec(j.at("controls").at("lo"), "controls.lo");
        P.U_hi = detail::json_to_vec(j.at("controls").at("hi"), "controls.hi");
        P.phi_wT = j.at("cost").at("wT").get<double>();
        P.phi_W = detail::json_to_vec(j.at("cost").at("W"), "cost.W");
        P.phi_xref = detail::json_to_vec(j.at("cost").at("xref"), "cost.xref");
        P.omega_x_E = detail::json_to_mat(j.at("endpoint").at("E"), "endpoint.E");
        P.omega_x_e = detail::json_to_vec(j.at("endpoint").at("e"), "endpoint.e");
        Vec Ti = detail::json_to_vec(j.at("endpoint").at("T_interval"), "endpoint.T_interval");
        if (Ti.size() != 2) throw parse_error("endpoint.T_interval: expected [lo, hi]");
        P.omega_T_lo = Ti(0);
        P.omega_T_hi = Ti(1);
        P.x0 = detail::json_to_vec(j.at("init").at("x0"), "init.x0");
        if (j.contains("lipschitz_cap")) P.lipschitz_cap = j["lipschitz_cap"].get<double>();
        if (P.omega_x_E.rows() == 0) P.omega_x_E = Mat(0, P.n);
        P.validate();
    } catch (const json::exception& e) {
        throw parse_error(std::string("problem spec: ") + e.what());
    }
    return spec;
}

inline ProblemSpecFile load_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    return parse_problem_spec(j);
}

inline json emit_problem_spec(const ProblemSpecFile& spec) {
    const SweepingProblem& P = spec.problem;
    json j;
    j["meta"]["name"] = spec.name;
    j["dims"]["n"] = P.n;
    j["dims"]["d"] = P.d;
    j["polyhedron"]["rows"] = json::array();
    for (const PolyhedronRow& row : P.C.rows)
        j["polyhedron"]["rows"].push_back({{"normal", detail::vec_to_json(row.normal)},
                                           {"offset0", row.offset0},
                                           {"offset_slope", row.offset_slope}});
    j["dynamics"]["A"] = detail::mat_to_json(P.g_A);
    j["dynamics"]["B"] = detail::mat_to_json(P.g_B);
    j["dynamics"]["c"] = detail::vec_to_json(P.g_c);
    j["controls"]["lo"] = detail::vec_to_json(P.U_lo);
    j["controls"]["hi"] = detail::vec_to_json(P.U_hi);
    j["cost"]["wT"] = P.phi_wT;
    j["cost"]["W"] = detail::vec_to_json(P.phi_W);
    j["cost"]["xref"] = detail::vec_to_json(P.phi_xref);
    j["endpoint"]["E"] = detail::mat_to_json(P.omega_x_E);
    j["endpoint"]["e"] = detail::vec_to_json(P.omega_x_e);
    j["endpoint"]["T_interval"] = {P.omega_T_lo, P.omega_T_hi};
    j["init"]["x0"] = detail::vec_to_json(P.x0);
    j["lipschitz_cap"] = P.lipschitz_cap;
    return j;
}

// Trajectory (de)serialization used by cmd_certify and report round-trips.
inline json trajectory_to_json(const DiscreteTrajectory& traj) {
    json j;
    j["T"] = traj.T;
    j["k"] = traj.k;
    j["states"] = json::array();
    for (const Vec& x : traj.states) j["states"].push_back(detail::vec_to_json(x));
    j["controls"] = json::array();
    for (const Vec& u : traj.controls) j["controls"].push_back(detail::vec_to_json(u));
    j["etas"] = json::array();
    for (const Vec& e : traj.etas) j["etas"].push_back(detail::vec_to_json(e));
    return j;
}

inline DiscreteTrajectory trajectory_from_json(const json& root) {
    const json& j = root.contains("trajectory") ? root["trajectory"] : root;
    DiscreteTrajectory traj;
    try {
        traj.T = j.at("T").get<double>();
        traj.k = j.at("k").get<int>();
        for (const json& x : j.at("states"))
            traj.states.push_back(detail::json_to_vec(x, "trajectory.states"));
        for (const json& u : j.at("controls"))
            traj.controls.push_back(detail::json_to_vec(u, "trajectory.controls"));
        if (j.contains("etas"))
            for (const json& e : j["etas"])
                traj.etas.push_back(detail::json_to_vec(e, "trajectory.etas"));
    } catch (const json::exception& e) {
        throw parse_error(std::string("trajectory file: ") + e.what());
    }
    if (traj.states.size() != static_cast<std::size_t>(traj.k) + 1 ||
        traj.controls.size() != static_cast<std::size_t>(traj.k))
        throw parse_error("trajectory file: states/controls shape disagrees with k");
    return traj;
}

} // namespace polysweep

#endif
