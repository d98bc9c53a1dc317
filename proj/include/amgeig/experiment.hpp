#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "correction.hpp"
#include "eig.hpp"
#include "fem.hpp"
#include "hierarchy.hpp"
#include "matrix_market.hpp"
#include "mesh.hpp"
#include "types.hpp"

namespace amgeig {

/// One convergence-study run: assemble a model problem, build the
/// hierarchy, solve with every requested sweep count, and compare against
/// the dense reference solve.
struct ExperimentConfig {
    ProblemSpec problem;
    index_t structured_n = 0;  // structured unit-square mesh when positive
    std::string mesh_path;     // mesh file otherwise
    index_t num_pairs = 13;
    double theta = 0.25;
    index_t amg_iters = 2;
    index_t smooth_steps = 2;
    std::vector<index_t> sweep_counts{1, 2, 3, 4, 5, 6};
    std::optional<index_t> start_level; // 0-based; default next-to-coarsest
    index_t max_coarse_dim = 500;
    index_t max_levels = 25;
    std::string output_path = "experiment.csv";
    std::string dump_dir; // hierarchy matrices are written here when set
    bool raw_errors = false;
};

/// Dense reference solve for the q smallest pairs. Guarded so an oversized
/// problem fails fast instead of grinding.
inline EigenpairSet direct_oracle(const SparseMatrix& a, const SparseMatrix& m, index_t q) {
    if (a.nrows > 6000)
        throw std::invalid_argument("direct reference solve is limited to dimension 6000 (got " +
                                    std::to_string(a.nrows) + "); use a smaller mesh");
    return generalized_eig(DenseSymPair(to_dense(a), to_dense(m)), q);
}

/// FNV-1a over the mesh bytes; identifies a mesh for reference-solve reuse.
inline std::uint64_t mesh_hash(const TriMesh& mesh) {
    std::uint64_t h = 14695981039346656037ULL;
    auto absorb = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& p : mesh.vertices) absorb(p.data(), sizeof(double) * 2);
    if (!mesh.boundary.empty()) absorb(mesh.boundary.data(), mesh.boundary.size());
    for (const auto& t : mesh.triangles) absorb(t.data(), sizeof(index_t) * 3);
    return h;
}

namespace detail {

using OracleKey = std::tuple<std::uint64_t, int, index_t>; // mesh hash, problem kind, pairs

inline std::map<OracleKey, EigenpairSet>& oracle_cache() {
    static std::map<OracleKey, EigenpairSet> cache;
    return cache;
}

} // namespace detail

/// Writes every level's matrices (and prolongations) as Matrix Market files
/// under `dir`, creating it if needed.
inline void dump_hierarchy(const Hierarchy& h, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (index_t k = 0; k < h.num_levels(); ++k) {
        const std::string base = (fs::path(dir) / ("level" + std::to_string(k))).string();
        write_matrix_market(h.levels[k].a, base + "_A.mtx");
        write_matrix_market(h.levels[k].m, base + "_M.mtx");
        if (k < h.coarsest()) write_matrix_market(h.prolongations[k], base + "_P.mtx");
    }
}

inline void run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    auto elapsed = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    if ((cfg.structured_n > 0) == !cfg.mesh_path.empty())
        throw std::invalid_argument("run_experiment: give exactly one mesh source");
    if (cfg.num_pairs < 1) throw std::invalid_argument("run_experiment: need at least one pair");
    if (cfg.sweep_counts.empty())
        throw std::invalid_argument("run_experiment: empty sweep-count list");

    std::vector<index_t> sweep_counts = cfg.sweep_counts;
    std::sort(sweep_counts.begin(), sweep_counts.end());
    sweep_counts.erase(std::unique(sweep_counts.begin(), sweep_counts.end()),
                       sweep_counts.end());
    if (sweep_counts.front() < 1)
        throw std::invalid_argument("run_experiment: sweep counts must be positive");

    TriMesh mesh;
    std::string mesh_desc;
    index_t reoriented = 0;
    if (!cfg.mesh_path.empty()) {
        MeshLoadResult lr = load_mesh(cfg.mesh_path);
        mesh = std::move(lr.mesh);
        reoriented = lr.reoriented;
        mesh_desc = "file " + cfg.mesh_path;
    } else {
        mesh = structured_mesh(cfg.structured_n);
        mesh_desc = "structured " + std::to_string(cfg.structured_n);
    }

    auto t_setup = clock::now();
    const DirichletReduction prob = assemble_problem(mesh, cfg.problem);
    SetupParams sp;
    sp.theta = cfg.theta;
    sp.max_coarse_dim = cfg.max_coarse_dim;
    sp.max_levels = cfg.max_levels;
    const Hierarchy h = build_hierarchy(prob.a, prob.m, sp);
    const double setup_seconds = elapsed(t_setup);

    const index_t start = cfg.start_level.value_or(std::max<index_t>(h.coarsest() - 1, 0));
    if (start < 0 || start >= h.num_levels())
        throw std::invalid_argument("run_experiment: start level " + std::to_string(start + 1) +
                                    " out of range for " + std::to_string(h.num_levels()) +
                                    " levels");

    const int kind = static_cast<int>(cfg.problem.kind);
    const detail::OracleKey key{mesh_hash(mesh), kind, cfg.num_pairs};
    auto t_oracle = clock::now();
    auto& cache = detail::oracle_cache();
    auto cache_it = cache.find(key);
    if (cache_it == cache.end())
        cache_it = cache.emplace(key, direct_oracle(prob.a, prob.m, cfg.num_pairs)).first;
    const EigenpairSet& reference = cache_it->second;
    const double oracle_seconds = elapsed(t_oracle);

    CorrectionParams cp;
    cp.num_pairs = cfg.num_pairs;
    cp.amg_iters = cfg.amg_iters;
    cp.start_level = start;
    cp.solve = {cfg.smooth_steps, cfg.smooth_steps};

    std::vector<std::pair<index_t, EigensolveResult>> runs;
    std::vector<double> run_seconds;
    for (index_t sweeps : sweep_counts) {
        cp.uniform_sweeps = sweeps;
        auto t_run = clock::now();
        runs.emplace_back(sweeps, amg_eigensolve(h, cp));
        run_seconds.push_back(elapsed(t_run));
    }

    if (!cfg.dump_dir.empty()) dump_hierarchy(h, cfg.dump_dir);

    const std::string meta_path = cfg.output_path + ".meta";
    try {
        std::ofstream csv(cfg.output_path);
        if (!csv)
            throw std::runtime_error("cannot open '" + cfg.output_path + "' for writing");
        csv << "P,j,lambda,lambda_dir,abs_err";
        if (cfg.raw_errors) csv << ",abs_err_raw";
        csv << "\n";
        for (const auto& [sweeps, res] : runs)
            for (index_t j = 0; j < cfg.num_pairs; ++j) {
                const double raw = std::abs(res.pairs.values[j] - reference.values[j]);
                csv << sweeps << "," << (j + 1) << ","
                    << detail::format_g17(res.pairs.values[j]) << ","
                    << detail::format_g17(reference.values[j]) << ","
                    << detail::format_g17(std::max(raw, 1e-14));
                if (cfg.raw_errors) csv << "," << detail::format_g17(raw);
                csv << "\n";
            }
        if (!csv.flush())
            throw std::runtime_error("write to '" + cfg.output_path + "' failed");

        std::ofstream meta(meta_path);
        if (!meta) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
        meta << "problem: " << (cfg.problem.kind == ProblemSpec::Kind::laplace ? "laplace"
                                                                               : "coulomb")
             << "\n";
        meta << "mesh: " << mesh_desc << " (" << mesh.num_vertices() << " vertices, "
             << mesh.num_triangles() << " triangles)\n";
        if (reoriented > 0) meta << "reoriented triangles: " << reoriented << "\n";
        meta << "interior unknowns: " << prob.a.nrows << "\n";
        meta << "pairs: " << cfg.num_pairs << "\n";
        meta << "strength threshold: " << detail::format_g17(cfg.theta) << "\n";
        meta << "vcycles per basis vector: " << cfg.amg_iters << "\n";
        meta << "cg smoothing steps: " << cfg.smooth_steps << "+" << cfg.smooth_steps << "\n";
        meta << "max coarse dim: " << cfg.max_coarse_dim << "\n";
        meta << "sweep counts:";
        for (index_t sweeps : sweep_counts) meta << " " << sweeps;
        meta << "\n";
        meta << "N_Dof=[";
        for (index_t k = 0; k < h.num_levels(); ++k)
            meta << (k ? ", " : "") << h.dim(k);
        meta << "] and n_1=" << (start + 1) << "\n";
        meta << "setup seconds: " << setup_seconds << "\n";
        meta << "reference seconds: " << oracle_seconds << "\n";
        for (std::size_t r = 0; r < runs.size(); ++r)
            meta << "run seconds (P=" << runs[r].first << "): " << run_seconds[r] << "\n";
        if (!meta.flush()) throw std::runtime_error("write to '" + meta_path + "' failed");
    } catch (...) {
        std::error_code ec;
        fs::remove(cfg.output_path, ec);
        fs::remove(meta_path, ec);
        throw;
    }
}

} // namespace amgeig
