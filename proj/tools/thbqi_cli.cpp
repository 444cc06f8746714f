// Command-line front end: reproduction runs, mesh import/export and table
// comparison. See README.md for usage examples.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "thbqi/harness.hpp"

namespace {

thbqi::Degrees parse_degrees(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--degrees", "expected 'd1,d2'");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

int run_command(const thbqi::ExperimentConfig& config) {
    const thbqi::ExperimentResult result = thbqi::run_experiment(config);
    thbqi::write_table_text(std::cout, result.rows);
    if (result.adaptive) {
        std::cout << "epsilon " << result.epsilon << ", terminated "
                  << (result.by_tolerance ? "by tolerance" : "by level budget") << "\n";
    }
    if (!config.out_dir.empty())
        std::cout << "artifacts written to " << config.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical Hermite spline quasi-interpolation"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run an experiment and emit error tables");
    std::string function = "f1", degrees = "3,3", qi = "hier", fd_order = "3,3";
    std::string out_dir;
    int levels = 5;
    double eps_factor = 1.5;
    run->set_config("--config", "", "experiment config file (key = value)");
    run->add_option("--function", function, "target function: f1 or f2");
    run->add_option("--degrees", degrees, "bidegree d1,d2 (components in {2,3,4})");
    run->add_option("--levels", levels, "maximum number of levels K");
    run->add_option("--qi", qi, "operator: tensor|that|fd|hier|that-hier|fd-hier");
    run->add_option("--fd-order", fd_order, "finite-difference orders k1,k2");
    run->add_option("--eps-factor", eps_factor, "tolerance factor over the tensor error");
    run->add_option("--out", out_dir, "output directory for tables and meshes");

    // --- mesh --------------------------------------------------------------
    auto* mesh_cmd = app.add_subcommand("mesh", "mesh file utilities");
    auto* mesh_export = mesh_cmd->add_subcommand("export", "re-emit a mesh as text/SVG");
    std::string mesh_in, mesh_svg, mesh_text;
    mesh_export->add_option("--in", mesh_in, "input mesh text file")->required();
    mesh_export->add_option("--svg", mesh_svg, "SVG output path");
    mesh_export->add_option("--text", mesh_text, "text output path");

    // --- tables ------------------------------------------------------------
    auto* tables_cmd = app.add_subcommand("tables", "table utilities");
    auto* tables_compare =
        tables_cmd->add_subcommand("compare", "diff a produced CSV against expected values");
    std::string produced_path, expected_path;
    std::vector<std::string> tol_specs;
    double default_tol = 0.01;
    tables_compare->add_option("--produced", produced_path, "CSV to check")->required();
    tables_compare->add_option("--expected", expected_path, "reference CSV")->required();
    tables_compare->add_option("--tol", tol_specs,
                               "per-column relative tolerance, e.g. err_sup=0.02");
    tables_compare->add_option("--default-tol", default_tol,
                               "relative tolerance for unlisted float columns");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            thbqi::ExperimentConfig config;
            config.function = function;
            config.degrees = parse_degrees(degrees);
            config.levels = levels;
            config.qi = qi;
            const thbqi::Degrees fd = parse_degrees(fd_order);
            config.fd_order1 = fd.d1;
            config.fd_order2 = fd.d2;
            config.eps_factor = eps_factor;
            config.out_dir = out_dir;
            return run_command(config);
        }
        if (*mesh_export) {
            const thbqi::HierarchicalMesh mesh = thbqi::import_mesh_text(mesh_in);
            if (mesh_svg.empty() && mesh_text.empty())
                throw CLI::ValidationError("mesh export", "need --svg and/or --text");
            if (!mesh_svg.empty()) thbqi::export_mesh_svg(mesh, mesh_svg);
            if (!mesh_text.empty()) thbqi::export_mesh_text(mesh, mesh_text);
            std::cout << "mesh with " << mesh.depth() << " level(s), "
                      << mesh.all_active_cells().size() << " active cells exported\n";
            return 0;
        }
        if (*tables_compare) {
            std::map<std::string, double> tols;
            for (const std::string& spec : tol_specs) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--tol", "expected column=value");
                tols[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
            }
            std::ifstream produced(produced_path);
            if (!produced) throw std::runtime_error("cannot open " + produced_path);
            std::ifstream expected(expected_path);
            if (!expected) throw std::runtime_error("cannot open " + expected_path);
            const bool ok =
                thbqi::compare_tables(produced, expected, tols, default_tol, std::cout);
            std::cout << (ok ? "tables match\n" : "tables differ\n");
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
