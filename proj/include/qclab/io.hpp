// Deterministic CSV/JSON export of orbits, indicial tables, symplectic
// matrices, radial profiles, and asymptote fits.  All floating-point output
// uses 17 significant digits so identical inputs produce byte-identical
// files.

#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qclab/conformal.hpp"
#include "qclab/cylinder_ode.hpp"
#include "qclab/linearization.hpp"
#include "qclab/symplectic.hpp"

namespace qclab {

inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

// ---- orbit -----------------------------------------------------------------

inline void write_orbit_csv(std::ostream& os, const DelaunaySolution& sol) {
    os << "t,v,v1,v2,v3,H\n";
    for (const CylState& s : sol.period_samples()) {
        os << g17(s.t) << ',' << g17(s.y[0]) << ',' << g17(s.y[1]) << ',' << g17(s.y[2]) << ','
           << g17(s.y[3]) << ',' << g17(hamiltonian(s, sol.params)) << '\n';
    }
}

inline nlohmann::json orbit_json(const DelaunaySolution& sol, const ToleranceConfig& tol) {
    nlohmann::json j;
    j["metadata"] = {{"n", sol.params.n},
                     {"eps", sol.eps},
                     {"vpp0", sol.vpp0},
                     {"period", sol.period},
                     {"energy", sol.energy},
                     {"tolerances",
                      {{"ode_rel", tol.ode_rel},
                       {"ode_abs", tol.ode_abs},
                       {"shoot_tol", tol.shoot_tol}}}};
    nlohmann::json rows = nlohmann::json::array();
    for (const CylState& s : sol.period_samples()) {
        rows.push_back({{"t", s.t},
                        {"v", s.y[0]},
                        {"v1", s.y[1]},
                        {"v2", s.y[2]},
                        {"v3", s.y[3]},
                        {"H", hamiltonian(s, sol.params)}});
    }
    j["samples"] = std::move(rows);
    return j;
}

// ---- indicial roots --------------------------------------------------------

inline void write_indicial_csv(std::ostream& os, const IndicialSet& set) {
    os << "eps,j,gamma,multiplicity\n";
    for (const IndicialRoot& r : set.roots) {
        os << g17(set.eps) << ',' << r.j << ',' << g17(r.gamma) << ',' << r.multiplicity << '\n';
    }
}

inline nlohmann::json indicial_json(const IndicialSet& set, const DimensionParams& d) {
    nlohmann::json j;
    j["metadata"] = {{"n", d.n},
                     {"eps", set.eps},
                     {"gamma_1", set.gamma_1},
                     {"gamma_1_excluding_j0", set.gamma_1_excl_j0},
                     {"near_defective_warning", set.near_defective_warning}};
    nlohmann::json rows = nlohmann::json::array();
    for (const IndicialRoot& r : set.roots)
        rows.push_back({{"j", r.j}, {"gamma", r.gamma}, {"multiplicity", r.multiplicity}});
    j["roots"] = std::move(rows);
    return j;
}

// ---- symplectic matrix -----------------------------------------------------

inline nlohmann::json omega_json(const OmegaMatrix& om) {
    nlohmann::json j;
    j["k"] = om.k;
    j["eps_list"] = om.eps_list;
    j["blocks"] = om.blocks;
    j["matrix"] = om.matrix;
    return j;
}

inline void write_omega_csv(std::ostream& os, const OmegaMatrix& om) {
    for (const auto& row : om.matrix) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << g17(row[c]);
        }
        os << '\n';
    }
}

// ---- radial profiles and fits ----------------------------------------------

inline void write_profile_csv(std::ostream& os, const RadialProfile& prof) {
    os << "r,u\n";
    for (std::size_t i = 0; i < prof.r_grid.size(); ++i)
        os << g17(prof.r_grid[i]) << ',' << g17(prof.u[i]) << '\n';
}

inline RadialProfile read_profile_csv(std::istream& is) {
    RadialProfile prof;
    std::string line;
    if (!std::getline(is, line) || line.rfind("r,u", 0) != 0)
        throw std::invalid_argument("profile CSV: missing 'r,u' header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("profile CSV: malformed row '" + line + "'");
        prof.r_grid.push_back(std::stod(line.substr(0, comma)));
        prof.u.push_back(std::stod(line.substr(comma + 1)));
    }
    return prof;
}

inline nlohmann::json fit_json(const AsymptoteData& fit) {
    return nlohmann::json{{"eps", fit.eps},
                          {"T", fit.T},
                          {"residual", fit.residual},
                          {"hamiltonian", fit.hamiltonian}};
}

} // namespace qclab
