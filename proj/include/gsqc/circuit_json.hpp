#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsqc/circuit.hpp"

namespace gsqc {

using nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXcd& u) {
    json rows = json::array();
    for (int r = 0; r < u.rows(); ++r)
        for (int c = 0; c < u.cols(); ++c)
            rows.push_back(json::array({u(r, c).real(), u(r, c).imag()}));
    return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
    int n2 = static_cast<int>(j.size());
    int n = n2 == 4 ? 2 : (n2 == 16 ? 4 : -1);
    if (n < 0) throw std::invalid_argument("gate matrix must have 4 or 16 entries");
    Eigen::MatrixXcd u(n, n);
    int k = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c, ++k) u(r, c) = cd(j[k][0].get<double>(), j[k][1].get<double>());
    return u;
}

/// {"M":..,"n":..,"layout":"1d"|"all-to-all"|"custom","gates":[{"t":..,"q":[..],"u":[[re,im],..]}]}
/// Generated layouts list only their non-identity gates; custom circuits add
/// "N", "o", "f" and list every gate.
inline json circuit_to_json(const Circuit& c) {
    json j;
    j["M"] = c.m;
    j["n"] = c.n_core;
    j["layout"] = layout_name(c.layout);
    json gates = json::array();
    bool full = c.layout == Layout::custom;
    for (const Gate& g : c.gates) {
        if (!full && g.is_identity()) continue;
        json e;
        e["t"] = g.time;
        e["q"] = g.kind == Gate::Kind::one_qubit ? json::array({g.a}) : json::array({g.a, g.b});
        e["u"] = matrix_to_json(g.u);
        gates.push_back(e);
    }
    j["gates"] = gates;
    if (full) {
        j["N"] = c.depth;
        j["o"] = json(std::vector<int>(c.first_step.begin() + 1, c.first_step.end()));
        j["f"] = json(std::vector<int>(c.last_step.begin() + 1, c.last_step.end()));
    }
    return j;
}

inline Circuit circuit_from_json(const json& j) {
    std::string layout = j.at("layout").get<std::string>();
    if (layout == "1d" || layout == "all-to-all") {
        CoreGates core;
        for (const auto& e : j.at("gates")) {
            std::vector<int> q = e.at("q").get<std::vector<int>>();
            core[{e.at("t").get<int>(), q}] = matrix_from_json(e.at("u"));
        }
        int m = j.at("M").get<int>();
        int n = j.at("n").get<int>();
        return layout == "1d" ? build_1d_circuit(m, n, core) : build_all_to_all_circuit(m, n, core);
    }
    Circuit c;
    c.m = j.at("M").get<int>();
    c.n_core = j.value("n", 0);
    c.depth = j.at("N").get<int>();
    c.layout = Layout::custom;
    auto o = j.at("o").get<std::vector<int>>();
    auto f = j.at("f").get<std::vector<int>>();
    c.first_step.assign(c.m + 1, 0);
    c.last_step.assign(c.m + 1, 0);
    for (int q = 1; q <= c.m; ++q) {
        c.first_step[q] = o[q - 1];
        c.last_step[q] = f[q - 1];
    }
    for (const auto& e : j.at("gates")) {
        std::vector<int> q = e.at("q").get<std::vector<int>>();
        Gate g;
        g.time = e.at("t").get<int>();
        g.u = matrix_from_json(e.at("u"));
        if (q.size() == 1) {
            g.kind = Gate::Kind::one_qubit;
            g.a = q[0];
        } else {
            g.kind = Gate::Kind::two_qubit;
            g.a = q[0];
            g.b = q[1];
        }
        c.gates.push_back(g);
    }
    c.rebuild_index();
    return c;
}

inline void save_circuit(const Circuit& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << circuit_to_json(c).dump(2) << "\n";
}

inline Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return circuit_from_json(j);
}

}  // namespace gsqc
