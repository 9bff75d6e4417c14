// qclab: command-line driver exposing the Delaunay laboratory as reproducible
// runs.  Subcommands: solve, period-table, indicial, symplectic, qcheck.
//
// Exit codes: 0 success, 1 usage / invalid input, 2 numeric failure.
// All floating-point output is printed with 17 significant digits so identical
// invocations produce byte-identical files and stdout.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qclab/conformal.hpp"
#include "qclab/cylinder_ode.hpp"
#include "qclab/dimension.hpp"
#include "qclab/io.hpp"
#include "qclab/linearization.hpp"
#include "qclab/symplectic.hpp"

namespace {

struct CommonOpts {
    int n = 5;
    std::string output_dir = ".";
    std::string format = "csv";
    double tol_ode = 1e-10;
    double tol_shoot = 1e-9;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--n", c.n, "Ambient dimension (n >= 5)")
        ->envname("QLAB_N")
        ->check(CLI::Range(5, 32));
    sub->add_option("--output-dir", c.output_dir, "Directory for exported files")
        ->envname("QLAB_OUTPUT_DIR");
    sub->add_option("--format", c.format, "Export format")
        ->envname("QLAB_FORMAT")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol-ode", c.tol_ode, "Relative ODE tolerance")
        ->envname("QLAB_TOL_ODE")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-shoot", c.tol_shoot, "Shooting residual tolerance")
        ->envname("QLAB_TOL_SHOOT")
        ->check(CLI::PositiveNumber);
}

qclab::ToleranceConfig tolerances(const CommonOpts& c) {
    qclab::ToleranceConfig tol;
    tol.ode_rel = c.tol_ode;
    tol.ode_abs = c.tol_ode * 1e-2;
    tol.shoot_tol = c.tol_shoot;
    return tol;
}

std::filesystem::path out_path(const CommonOpts& c, const std::string& name) {
    std::filesystem::create_directories(c.output_dir);
    return std::filesystem::path(c.output_dir) / name;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + p.string());
    os << body;
}

// ---- solve -----------------------------------------------------------------

int cmd_solve(const CommonOpts& c, double eps) {
    const auto d = qclab::make_params(c.n);
    const auto tol = tolerances(c);
    const auto sol = qclab::shoot_delaunay(eps, tol, d);
    if (c.format == "csv") {
        std::ostringstream ss;
        qclab::write_orbit_csv(ss, sol);
        write_text(out_path(c, "orbit.csv"), ss.str());
    } else {
        write_text(out_path(c, "orbit.json"), qclab::orbit_json(sol, tol).dump(2) + "\n");
    }
    std::cout << "eps=" << qclab::g17(sol.eps) << " vpp0=" << qclab::g17(sol.vpp0)
              << " period=" << qclab::g17(sol.period) << " energy=" << qclab::g17(sol.energy)
              << "\n";
    return 0;
}

// ---- period-table ----------------------------------------------------------

int cmd_period_table(const CommonOpts& c, std::vector<double> grid) {
    const auto d = qclab::make_params(c.n);
    const auto tol = tolerances(c);
    std::sort(grid.begin(), grid.end());

    struct Row {
        double eps, period, energy, vpp0;
    };
    // Fan out per-eps shots; assembly below is in grid order, so the output is
    // deterministic regardless of completion order.
    std::vector<std::future<Row>> futs;
    futs.reserve(grid.size());
    for (double eps : grid) {
        futs.push_back(std::async(std::launch::async, [eps, tol, d]() -> Row {
            const auto sol = qclab::shoot_delaunay(eps, tol, d);
            return {sol.eps, sol.period, sol.energy, sol.vpp0};
        }));
    }
    std::vector<Row> rows;
    rows.reserve(grid.size());
    for (auto& f : futs) rows.push_back(f.get());

    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].energy < rows[i - 1].energy))
            throw std::runtime_error("period-table: energy column is not strictly decreasing");
    }

    if (c.format == "csv") {
        std::ostringstream ss;
        ss << "eps,period,energy,vpp0\n";
        for (const Row& r : rows)
            ss << qclab::g17(r.eps) << ',' << qclab::g17(r.period) << ',' << qclab::g17(r.energy)
               << ',' << qclab::g17(r.vpp0) << '\n';
        write_text(out_path(c, "period_table.csv"), ss.str());
        std::cout << ss.str();
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const Row& r : rows)
            j.push_back({{"eps", r.eps}, {"period", r.period}, {"energy", r.energy},
                         {"vpp0", r.vpp0}});
        const std::string body = j.dump(2) + "\n";
        write_text(out_path(c, "period_table.json"), body);
        std::cout << body;
    }
    return 0;
}

// ---- indicial --------------------------------------------------------------

int cmd_indicial(const CommonOpts& c, double eps, int j_max) {
    const auto d = qclab::make_params(c.n);
    const auto tol = tolerances(c);
    const auto sol = qclab::shoot_delaunay(eps, tol, d);
    const auto set = qclab::indicial_roots(sol, j_max, 4.0 * d.n, tol);
    if (c.format == "csv") {
        std::ostringstream ss;
        qclab::write_indicial_csv(ss, set);
        write_text(out_path(c, "indicial.csv"), ss.str());
        std::cout << ss.str();
    } else {
        const std::string body = qclab::indicial_json(set, d).dump(2) + "\n";
        write_text(out_path(c, "indicial.json"), body);
        std::cout << body;
    }
    return 0;
}

// ---- symplectic ------------------------------------------------------------

int cmd_symplectic(const CommonOpts& c, const std::vector<double>& eps_list) {
    const auto d = qclab::make_params(c.n);
    const auto tol = tolerances(c);
    const auto om = qclab::omega_matrix(eps_list, 0.0, d, tol);

    double det = 1.0;
    for (int i = 0; i < om.k; ++i) {
        det *= om.blocks[i] * om.blocks[i];
        const double eps = om.eps_list[i];
        // Centered FD step for dH/deps, kept inside (0, eps_bar).
        const double h = std::min(0.02 * d.eps_bar, 0.45 * (d.eps_bar - eps));
        std::cout << "end " << (i + 1) << ": eps=" << qclab::g17(eps)
                  << " A=" << qclab::g17(om.blocks[i]);
        if (h > 1e-6 * d.eps_bar) {
            const double dh = qclab::dH_deps(eps, h, d, tol);
            std::cout << " dH/deps=" << qclab::g17(dh)
                      << " |A + dH/deps|=" << qclab::g17(std::fabs(om.blocks[i] + dh));
        } else {
            std::cout << " dH/deps=n/a (eps at the constant endpoint)";
        }
        std::cout << "\n";
    }
    std::cout << "det=" << qclab::g17(det) << (det > 0 ? " (> 0)" : " (NOT positive)") << "\n";

    if (c.format == "csv") {
        std::ostringstream ss;
        qclab::write_omega_csv(ss, om);
        write_text(out_path(c, "omega.csv"), ss.str());
    } else {
        write_text(out_path(c, "omega.json"), qclab::omega_json(om).dump(2) + "\n");
    }
    if (!(det > 0)) throw std::runtime_error("symplectic: det(Omega) not positive");
    return 0;
}

// ---- qcheck ----------------------------------------------------------------

int cmd_qcheck(const CommonOpts& c, double eps) {
    const auto d = qclab::make_params(c.n);
    const auto tol = tolerances(c);
    const auto sol = qclab::shoot_delaunay(eps, tol, d);

    // Log-uniform radial grid covering six periods at dt = 0.04 in t = -log r:
    // fine enough for the 4th-order stencils to reach the 1e-4 target with
    // headroom, coarse enough to stay above the shot-accuracy noise floor.
    const double dt = 0.04;
    const double span = 6.0 * (sol.is_constant() ? 5.0 : sol.period);
    const std::size_t m = static_cast<std::size_t>(span / dt) + 1;
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = std::exp(-dt * static_cast<double>(i));
    const auto prof = qclab::delaunay_euclidean_profile(sol, r);
    const auto qr = qclab::q_curvature_radial(prof, d);

    const double q_target = d.n * (d.n * d.n - 4.0) / 8.0;
    double max_rel = 0;
    for (double q : qr.q) {
        if (std::isnan(q)) continue;
        max_rel = std::max(max_rel, std::fabs(q - q_target) / q_target);
    }
    std::cout << "q_target=" << qclab::g17(q_target) << " max_rel_err=" << qclab::g17(max_rel)
              << (qr.coarse_grid_warning ? " (coarse grid warning)" : "") << "\n";

    if (c.format == "csv") {
        std::ostringstream ss;
        qclab::write_profile_csv(ss, prof);
        write_text(out_path(c, "profile.csv"), ss.str());
    } else {
        nlohmann::json j;
        j["q_target"] = q_target;
        j["max_rel_err"] = max_rel;
        j["coarse_grid_warning"] = qr.coarse_grid_warning;
        write_text(out_path(c, "qcheck.json"), j.dump(2) + "\n");
    }
    if (!(max_rel < 1e-4)) throw std::runtime_error("qcheck: relative error exceeds 1e-4");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qclab: Delaunay-type constant Q-curvature solution laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key=value); flags take precedence");
    app.allow_config_extras(false);

    CommonOpts c_solve, c_table, c_ind, c_sym, c_q;
    double eps_solve = 0.5, eps_ind = 0.5, eps_q = 0.5;
    int j_max = 10;
    std::vector<double> grid, eps_list;

    auto* solve = app.add_subcommand("solve", "Shoot a single Delaunay orbit");
    add_common(solve, c_solve);
    solve->add_option("--eps", eps_solve, "Necksize in (0, eps_bar]")
        ->envname("QLAB_EPS")
        ->required();

    auto* table = app.add_subcommand("period-table", "Tabulate (eps, period, energy, vpp0)");
    add_common(table, c_table);
    table->add_option("--eps-grid", grid, "Comma-separated necksize grid")
        ->envname("QLAB_EPS_GRID")
        ->delimiter(',');

    auto* ind = app.add_subcommand("indicial", "Indicial roots of the Delaunay end");
    add_common(ind, c_ind);
    ind->add_option("--eps", eps_ind, "Necksize in (0, eps_bar]")->envname("QLAB_EPS")->required();
    ind->add_option("--jmax", j_max, "Highest spherical-harmonic mode")
        ->envname("QLAB_JMAX")
        ->check(CLI::Range(1, 32));

    auto* sym = app.add_subcommand("symplectic", "Omega matrix on the deficiency basis");
    add_common(sym, c_sym);
    sym->add_option("--eps", eps_list, "Comma-separated necksizes, one per end")
        ->envname("QLAB_EPS")
        ->delimiter(',')
        ->required();

    auto* qchk = app.add_subcommand("qcheck", "Q-curvature residual of a computed profile");
    add_common(qchk, c_q);
    qchk->add_option("--eps", eps_q, "Necksize in (0, eps_bar]")->envname("QLAB_EPS")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(c_solve, eps_solve);
        if (table->parsed()) return cmd_period_table(c_table, grid);
        if (ind->parsed()) return cmd_indicial(c_ind, eps_ind, j_max);
        if (sym->parsed()) return cmd_symplectic(c_sym, eps_list);
        if (qchk->parsed()) return cmd_qcheck(c_q, eps_q);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
