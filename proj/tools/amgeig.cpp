// Command-line driver for the multilevel eigensolver convergence studies.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <amgeig/amgeig.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Multilevel eigensolver experiments on unit-square model problems"};

    std::string problem = "laplace";
    app.add_option("--problem", problem, "model problem")
        ->check(CLI::IsMember({"laplace", "coulomb"}))
        ->capture_default_str();

    std::int64_t structured = 0;
    std::string mesh_path;
    auto* structured_opt =
        app.add_option("--structured", structured,
                       "structured unit-square mesh with N cells per side")
            ->check(CLI::PositiveNumber);
    auto* mesh_opt = app.add_option("--mesh", mesh_path, "triangulation file to load");
    structured_opt->excludes(mesh_opt);
    mesh_opt->excludes(structured_opt);

    std::int64_t pairs = 13;
    app.add_option("--q", pairs, "number of eigenpairs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    double theta = 0.25;
    app.add_option("--theta", theta, "strength threshold, strictly between 0 and 1")
        ->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();

    std::int64_t amg_iters = 2;
    app.add_option("--m", amg_iters, "V-cycles applied to each basis vector")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    std::int64_t smooth = 2;
    app.add_option("--smooth", smooth, "CG smoothing steps before and after coarse correction")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    std::vector<std::int64_t> sweep_counts{1, 2, 3, 4, 5, 6};
    app.add_option("--P", sweep_counts, "correction sweeps per level, one run per value")
        ->delimiter(',')
        ->capture_default_str();

    std::int64_t n1 = 0;
    auto* n1_opt = app.add_option("--n1", n1,
                                  "starting level of the nested solve, 1 = finest "
                                  "(default: next-to-coarsest)")
                       ->check(CLI::PositiveNumber);

    std::int64_t max_coarse = 500;
    app.add_option("--max-coarse", max_coarse, "largest dimension kept uncoarsened")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string out = "experiment.csv";
    app.add_option("--out", out, "output table path")->capture_default_str();

    std::string dump_dir;
    app.add_option("--dump-hierarchy", dump_dir, "write every level's matrices to this directory");

    bool raw = false;
    app.add_flag("--raw", raw, "add an unclamped error column");

    CLI11_PARSE(app, argc, argv);

    if (structured_opt->count() == 0 && mesh_opt->count() == 0) {
        std::cerr << "error: give either --structured N or --mesh PATH\n";
        return 1;
    }

    amgeig::ExperimentConfig cfg;
    cfg.problem.kind = problem == "coulomb" ? amgeig::ProblemSpec::Kind::coulomb
                                            : amgeig::ProblemSpec::Kind::laplace;
    cfg.structured_n = structured;
    cfg.mesh_path = mesh_path;
    cfg.num_pairs = pairs;
    cfg.theta = theta;
    cfg.amg_iters = amg_iters;
    cfg.smooth_steps = smooth;
    cfg.sweep_counts.assign(sweep_counts.begin(), sweep_counts.end());
    if (n1_opt->count() > 0) cfg.start_level = n1 - 1;
    cfg.max_coarse_dim = max_coarse;
    cfg.output_path = out;
    cfg.dump_dir = dump_dir;
    cfg.raw_errors = raw;

    try {
        amgeig::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
