// Command-line front end: closed-form effective conductivities, parameter
// sweeps with CSV/SVG output, the periodic-cell solver on cell files, and the
// validation suites.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "interphase/interphase.hpp"

namespace {

struct GeometryArgs {
    double theta1 = 0;
    double r1 = 3.0;
    double r3 = 4.0;
    bool theta1_given = false;
    bool r1_given = false;

    // theta1 and r1/r3 are redundant; accept either and keep them consistent.
    void resolve() {
        if (theta1_given) {
            double derived = std::pow(r1 / r3, 3);
            if (r1_given) {
                interphase::require(std::abs(theta1 - derived) <=
                                        1e-9 * std::max(theta1, derived),
                                    "--theta1 is inconsistent with (r1/r3)^3");
            } else {
                r1 = r3 * std::cbrt(theta1);
            }
        } else {
            theta1 = std::pow(r1 / r3, 3);
        }
    }
};

void add_geometry_options(CLI::App* cmd, GeometryArgs& g) {
    auto* t1 = cmd->add_option("--theta1", g.theta1, "core volume fraction");
    auto* r1 = cmd->add_option("--r1", g.r1, "core radius (default 3)");
    cmd->add_option("--r3", g.r3, "outer radius (default 4)");
    cmd->callback([&g, t1, r1]() {
        g.theta1_given = t1->count() > 0;
        g.r1_given = r1->count() > 0;
    });
}

void print_value(double v) { std::printf("%.17g\n", v); }

interphase::Vec axis_field(const std::string& name, int dim) {
    int axis = -1;
    if (name == "x") axis = 0;
    if (name == "y") axis = 1;
    if (name == "z") axis = 2;
    interphase::require(axis >= 0, "--e0 must be one of x, y, z");
    interphase::require(axis < dim, "applied field axis exceeds the cell dimension");
    interphase::Vec e0 = interphase::Vec::zero(dim);
    e0[axis] = 1.0;
    return e0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective conductivity of composites with thin interphase layers"};
    app.require_subcommand(1);

    // --- closed-form one-shots -------------------------------------------
    double sigma1 = 0, sigma2 = 0, sigma3 = 0, theta2 = 0;
    GeometryArgs geo_exact, geo_approx, geo_ref;

    CLI::App* exact = app.add_subcommand(
        "exact", "exact effective conductivity of the three-phase assemblage");
    exact->add_option("--sigma1", sigma1, "core conductivity")->required();
    exact->add_option("--sigma2", sigma2, "layer conductivity")->required();
    exact->add_option("--sigma3", sigma3, "matrix conductivity")->required();
    exact->add_option("--theta2", theta2, "layer volume fraction")->required();
    add_geometry_options(exact, geo_exact);

    CLI::App* approx = app.add_subcommand(
        "approx", "reference value plus first-order thin-layer correction");
    approx->add_option("--sigma1", sigma1, "core conductivity")->required();
    approx->add_option("--sigma2", sigma2, "layer conductivity")->required();
    approx->add_option("--sigma3", sigma3, "matrix conductivity")->required();
    approx->add_option("--theta2", theta2, "layer volume fraction")->required();
    add_geometry_options(approx, geo_approx);

    CLI::App* reference = app.add_subcommand(
        "reference", "two-phase effective conductivity without the layer");
    reference->add_option("--sigma1", sigma1, "core conductivity")->required();
    reference->add_option("--sigma3", sigma3, "matrix conductivity")->required();
    add_geometry_options(reference, geo_ref);

    // --- sweep / plot ------------------------------------------------------
    std::string config_path, out_path, in_path, title;
    bool log_y = false;

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate curves over a sigma2 range");
    sweep->add_option("--config", config_path, "JSON sweep configuration")->required();
    sweep->add_option("--out", out_path, "CSV output path (default: stdout)");

    CLI::App* plot = app.add_subcommand("plot", "render a sweep CSV as an SVG chart");
    plot->add_option("--in", in_path, "CSV produced by the sweep command")->required();
    plot->add_option("--out", out_path, "SVG output path")->required();
    plot->add_option("--title", title, "chart title (default: name from CSV metadata)");
    plot->add_flag("--log-y", log_y, "logarithmic value axis (default: linear)");

    // --- validation ----------------------------------------------------------
    std::string suite, config_dir = "configs", json_path;
    CLI::App* validate = app.add_subcommand("validate", "run a named validation suite");
    validate->add_option("--suite", suite, "suite name, or 'all'")->required();
    validate->add_option("--config-dir", config_dir,
                         "directory with the committed sweep configurations");
    validate->add_option("--json", json_path, "also write the report as JSON");

    // --- periodic-cell solver -------------------------------------------------
    std::string cell_path, e0_name, solution_path;
    double tol = 1e-8;
    int max_iterations = 20000;
    CLI::App* solve = app.add_subcommand("solve", "solve a periodic cell file");
    solve->add_option("--cell", cell_path, "cell file (see README for the format)")->required();
    solve->add_option("--e0", e0_name, "applied mean field direction: x, y or z")->required();
    solve->add_option("--tol", tol, "residual tolerance (default 1e-8)");
    solve->add_option("--max-iterations", max_iterations, "iteration cap (default 20000)");
    solve->add_option("--out", solution_path, "write the full solution to this file");

    // --- cell builder -------------------------------------------------------
    std::string kind;
    int n = 256, dim = 2, axis = 0;
    double sigma_a = 1.0, sigma_b = 10.0, fraction = 0.5, radius = 0.25;
    bool smoothed = false;
    CLI::App* make_cell = app.add_subcommand("make-cell", "write a canonical cell file");
    make_cell->add_option("--kind", kind, "uniform | laminate | checkerboard | circle")
        ->required();
    make_cell->add_option("--out", out_path, "cell file to write")->required();
    make_cell->add_option("--n", n, "grid points per axis (default 256)");
    make_cell->add_option("--dim", dim, "cell dimension for uniform/laminate (default 2)");
    make_cell->add_option("--axis", axis, "laminate normal axis (default 0)");
    make_cell->add_option("--sigma-a", sigma_a, "first phase conductivity (default 1)");
    make_cell->add_option("--sigma-b", sigma_b, "second phase conductivity (default 10)");
    make_cell->add_option("--fraction", fraction, "first phase fraction for laminate");
    make_cell->add_option("--radius", radius, "inclusion radius for circle (default 0.25)");
    make_cell->add_flag("--smoothed", smoothed, "area-weighted boundary voxels for circle");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exact->parsed()) {
            geo_exact.resolve();
            print_value(
                interphase::exact_sigma_star(sigma1, sigma2, sigma3, geo_exact.theta1, theta2));
        } else if (approx->parsed()) {
            geo_approx.resolve();
            double h =
                interphase::radius_from_fraction(geo_approx.r1, geo_approx.r3, theta2) -
                geo_approx.r1;
            print_value(interphase::approx_sigma_star(sigma1, sigma2, sigma3, geo_approx.theta1,
                                                      geo_approx.r1, h));
        } else if (reference->parsed()) {
            geo_ref.resolve();
            print_value(interphase::reference_sigma_star(sigma1, sigma3, geo_ref.theta1));
        } else if (sweep->parsed()) {
            interphase::SweepConfig cfg = interphase::load_sweep_config(config_path);
            auto rows = interphase::run_sweep(cfg);
            if (out_path.empty()) {
                interphase::write_sweep_csv(std::cout, cfg, rows);
            } else {
                interphase::write_sweep_csv(out_path, cfg, rows);
                std::cerr << "wrote " << rows.size() << " rows to " << out_path << '\n';
            }
        } else if (plot->parsed()) {
            interphase::CsvTable table = interphase::parse_csv(in_path);
            interphase::PlotOptions opts;
            opts.log_y = log_y;
            opts.title = title;
            if (opts.title.empty()) {
                for (const auto& meta : table.metadata)
                    if (meta.rfind("name=", 0) == 0) opts.title = meta.substr(5);
            }
            interphase::write_plot(out_path, table, opts);
            std::cerr << "wrote " << out_path << '\n';
        } else if (validate->parsed()) {
            interphase::ValidationReport rep = interphase::run_validation(suite, config_dir);
            std::cout << interphase::report_summary(rep);
            if (!json_path.empty()) {
                std::ofstream os(json_path);
                interphase::require(static_cast<bool>(os),
                                    "cannot open for writing: " + json_path);
                os << interphase::report_to_json(rep).dump(2) << '\n';
            }
            return rep.all_passed() ? 0 : 1;
        } else if (solve->parsed()) {
            interphase::PeriodicCell cell = interphase::load_cell(cell_path);
            interphase::SolveOptions opts;
            opts.tolerance = tol;
            opts.max_iterations = max_iterations;
            auto sol =
                interphase::solve_periodic(cell, axis_field(e0_name, cell.dim()), opts);
            std::printf("iterations %zu\n", sol.residual_history.size());
            std::printf("residual %.17g\n", sol.residual);
            for (int c = 0; c < sol.dim; ++c)
                std::printf("mean_current[%d] %.17g\n", c, sol.mean_current[c]);
            if (!solution_path.empty()) {
                interphase::save_solution(sol, solution_path);
                std::cerr << "wrote " << solution_path << '\n';
            }
        } else if (make_cell->parsed()) {
            auto iso_a = [&](int d) { return interphase::make_isotropic(sigma_a, d); };
            auto iso_b = [&](int d) { return interphase::make_isotropic(sigma_b, d); };
            std::optional<interphase::PeriodicCell> cell;
            if (kind == "uniform") {
                cell = interphase::uniform_cell(dim, n, iso_a(dim));
            } else if (kind == "laminate") {
                cell = interphase::laminate_cell(dim, n, axis, {fraction, 1.0 - fraction},
                                                 {iso_a(dim), iso_b(dim)});
            } else if (kind == "checkerboard") {
                cell = interphase::checkerboard_cell(n, iso_a(2), iso_b(2));
            } else if (kind == "circle") {
                cell = interphase::circular_inclusion_cell(n, radius, iso_a(2), iso_b(2),
                                                           smoothed);
            } else {
                throw std::invalid_argument(
                    "unknown cell kind '" + kind +
                    "'; expected uniform, laminate, checkerboard or circle");
            }
            interphase::save_cell(*cell, out_path);
            std::cerr << "wrote " << out_path << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
