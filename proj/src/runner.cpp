#include "augeig/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "augeig/adaptive.hpp"
#include "augeig/errors.hpp"
#include "augeig/fespace.hpp"
#include "augeig/matrix_market.hpp"
#include "augeig/mesh.hpp"
#include "json.hpp"

namespace augeig {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.16e", v);
    return b;
}

PrecondMode precond_from(const std::string& name) {
    if (name == "none") return PrecondMode::none;
    if (name == "a") return PrecondMode::corner_a;
    if (name == "b") return PrecondMode::corner_b;
    return PrecondMode::corner_b_a;
}

PaseConfig pase_config_from(const RunConfig& cfg) {
    PaseConfig p;
    p.nev = cfg.nev;
    p.tol = cfg.tol;
    p.max_outer = cfg.max_outer;
    p.cg.max_iters = cfg.cg_max_iters;
    p.precond_mode = precond_from(cfg.precond);
    p.seed = cfg.seed;
    if (!cfg.batch_sizes.empty()) {
        BatchConfig b;
        b.batch_sizes = cfg.batch_sizes;
        if (cfg.oversample > 0) b.oversample = cfg.oversample;
        p.batch = std::move(b);
    }
    p.batch_shift_minus = cfg.shift_minus;
    return p;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
    if (!out) throw IoError("runner: cannot open '" + path.string() + "' for writing");
    return out;
}

void write_eigenvalues_csv(const fs::path& dir, const std::vector<double>& lam,
                           const std::vector<double>& res) {
    std::ofstream out = open_out(dir / "eigenvalues.csv");
    out << "index,eigenvalue,residual\n";
    for (std::size_t j = 0; j < lam.size(); ++j)
        out << j << "," << fmt(lam[j]) << "," << fmt(res[j]) << "\n";
}

void write_history_csv(const fs::path& dir, const ConvergenceReport& rep) {
    std::ofstream out = open_out(dir / "history.csv");
    out << "outer,pair,residual\n";
    for (std::size_t it = 0; it < rep.residual_history.size(); ++it)
        for (std::size_t j = 0; j < rep.residual_history[it].size(); ++j)
            out << it << "," << j << "," << fmt(rep.residual_history[it][j]) << "\n";
}

void write_summary(const fs::path& dir, const json& j) {
    std::ofstream out = open_out(dir / "summary.json");
    out << j.dump(2) << "\n";
}

json base_summary(const RunConfig& cfg) {
    json j;
    j["mode"] = cfg.mode;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["nev"] = cfg.nev;
    j["tol"] = cfg.tol;
    j["warnings"] = cfg.warnings;
    return j;
}

struct TwoGrid {
    FeSpace coarse;
    FeSpace fine;
    Hierarchy h;
};

TwoGrid build_square_hierarchy(const RunConfig& cfg) {
    if (cfg.coarse_n < 2) throw ConfigError("square mode: coarse_n must be at least 2");
    if (cfg.fine_n < cfg.coarse_n)
        throw ConfigError("square mode: fine_n must not be smaller than coarse_n");
    auto mesh = build_unit_square_mesh(cfg.coarse_n);
    TwoGrid g;
    g.coarse = make_space(mesh);
    int n = cfg.coarse_n;
    while (n < cfg.fine_n) {
        mesh = refine_uniform(mesh);
        n *= 2;
    }
    if (n != cfg.fine_n)
        throw ConfigError("square mode: fine_n must be coarse_n times a power of two");
    g.fine = make_space(mesh);

    const AssembledForms fc = assemble(g.coarse);
    const AssembledForms ff = assemble(g.fine);
    const SparseMatrix p = n == cfg.coarse_n ? SparseMatrix::identity(g.fine.num_dofs())
                                             : build_prolongation(g.coarse, g.fine);
    g.h = Hierarchy{fc.a, fc.b, ff.a, ff.b, p};
    return g;
}

json report_json(const ConvergenceReport& rep) {
    json j;
    j["outer_iterations"] = rep.outer_iterations;
    j["converged"] = rep.converged;
    j["contraction_factors"] = rep.contraction_factors;
    j["notes"] = rep.notes;
    return j;
}

int run_square(const RunConfig& cfg, const fs::path& dir) {
    const TwoGrid g = build_square_hierarchy(cfg);
    const PaseConfig pcfg = pase_config_from(cfg);
    const PaseResult r = pase_solve(g.h, pcfg);

    write_eigenvalues_csv(dir, r.eigenvalues, r.report.residual_history.back());
    write_history_csv(dir, r.report);
    json j = base_summary(cfg);
    j["n_dofs_coarse"] = g.coarse.num_dofs();
    j["n_dofs_fine"] = g.fine.num_dofs();
    j["eigenvalues"] = r.eigenvalues;
    j["run"] = report_json(r.report);
    write_summary(dir, j);
    return r.report.converged ? 0 : 1;
}

int run_precond_compare(const RunConfig& cfg, const fs::path& dir) {
    const TwoGrid g = build_square_hierarchy(cfg);
    const std::vector<std::string> modes{"none", "a", "b", "b-a"};
    std::vector<PaseResult> results;
    json runs = json::array();
    bool all_converged = true;
    for (const auto& name : modes) {
        RunConfig sub = cfg;
        sub.precond = name;
        const PaseResult r = pase_solve(g.h, pase_config_from(sub));
        all_converged = all_converged && r.report.converged;
        json jr = report_json(r.report);
        jr["precond"] = name;
        jr["eigenvalues"] = r.eigenvalues;
        runs.push_back(std::move(jr));
        results.push_back(r);
    }

    double max_gap = 0.0;
    for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b)
            for (int j = 0; j < cfg.nev; ++j)
                max_gap = std::max(max_gap,
                                   std::abs(results[a].eigenvalues[j] -
                                            results[b].eigenvalues[j]) /
                                       (1.0 + std::abs(results[a].eigenvalues[j])));
    const bool agreement_ok = max_gap <= 1e-9;

    const PaseResult& base = results.front();
    write_eigenvalues_csv(dir, base.eigenvalues, base.report.residual_history.back());
    write_history_csv(dir, base.report);
    json j = base_summary(cfg);
    j["n_dofs_coarse"] = g.coarse.num_dofs();
    j["n_dofs_fine"] = g.fine.num_dofs();
    j["eigenvalues"] = base.eigenvalues;
    j["runs"] = std::move(runs);
    j["max_disagreement"] = max_gap;
    j["agreement_ok"] = agreement_ok;
    write_summary(dir, j);
    return (all_converged && agreement_ok) ? 0 : 1;
}

int run_batch(const RunConfig& cfg, const fs::path& dir) {
    const TwoGrid g = build_square_hierarchy(cfg);
    const PaseConfig pcfg = pase_config_from(cfg);
    const BatchResult r = batch_solve(g.h, pcfg);
    const std::vector<double> res =
        criterion_residuals(g.h.a_fine, g.h.b_fine, r.eigenvalues, r.eigenvectors);

    write_eigenvalues_csv(dir, r.eigenvalues, res);
    {
        std::ofstream out = open_out(dir / "history.csv");
        out << "batch,outer,pair,residual\n";
        for (std::size_t b = 0; b < r.reports.size(); ++b) {
            const auto& hist = r.reports[b].residual_history;
            for (std::size_t it = 0; it < hist.size(); ++it)
                for (std::size_t j = 0; j < hist[it].size(); ++j)
                    out << b << "," << it << "," << j << "," << fmt(hist[it][j]) << "\n";
        }
    }
    bool all_converged = true;
    json batches = json::array();
    for (const auto& rep : r.reports) {
        all_converged = all_converged && rep.converged;
        batches.push_back(report_json(rep));
    }
    json j = base_summary(cfg);
    j["n_dofs_coarse"] = g.coarse.num_dofs();
    j["n_dofs_fine"] = g.fine.num_dofs();
    j["batch_sizes"] = cfg.batch_sizes;
    j["eigenvalues"] = r.eigenvalues;
    j["batches"] = std::move(batches);
    write_summary(dir, j);
    return all_converged ? 0 : 1;
}

int run_adaptive(const RunConfig& cfg, const fs::path& dir) {
    AdaptiveConfig acfg;
    acfg.nev = cfg.nev;
    acfg.tol = cfg.tol;
    acfg.rounds = cfg.rounds;
    acfg.fraction = cfg.fraction;
    acfg.max_outer = cfg.max_outer;
    acfg.cg.max_iters = cfg.cg_max_iters;
    acfg.seed = cfg.seed;
    const AdaptiveResult r = adaptive_solve(build_lshape_mesh(cfg.lshape_n0), acfg);

    const AssembledForms forms = assemble(r.space);
    const std::vector<double> res =
        criterion_residuals(forms.a, forms.b, r.eigenvalues, r.eigenvectors);
    write_eigenvalues_csv(dir, r.eigenvalues, res);
    {
        std::ofstream out = open_out(dir / "history.csv");
        out << "round,num_dofs,num_triangles,total_eta2,num_marked,pair,eigenvalue,residual\n";
        for (std::size_t i = 0; i < r.rounds.size(); ++i) {
            const auto& rec = r.rounds[i];
            for (std::size_t j = 0; j < rec.eigenvalues.size(); ++j)
                out << i << "," << rec.num_dofs << "," << rec.num_triangles << ","
                    << fmt(rec.total_eta2) << "," << rec.num_marked << "," << j << ","
                    << fmt(rec.eigenvalues[j]) << "," << fmt(rec.residuals[j]) << "\n";
        }
    }
    for (std::size_t i = 0; i < r.rounds.size(); ++i) {
        std::ofstream out =
            open_out(dir / ("indicators_round" + std::to_string(i) + ".csv"));
        out << "triangle,eta2\n";
        const auto& per = r.rounds[i].indicators.per_triangle;
        for (std::size_t t = 0; t < per.size(); ++t)
            out << t << "," << fmt(per[t]) << "\n";
    }

    bool all_converged = true;
    json rounds = json::array();
    for (std::size_t i = 0; i < r.rounds.size(); ++i) {
        const auto& rec = r.rounds[i];
        all_converged = all_converged && rec.converged;
        json jr;
        jr["round"] = i;
        jr["num_dofs"] = rec.num_dofs;
        jr["num_triangles"] = rec.num_triangles;
        jr["total_eta2"] = rec.total_eta2;
        jr["num_marked"] = rec.num_marked;
        jr["converged"] = rec.converged;
        jr["eigenvalues"] = rec.eigenvalues;
        rounds.push_back(std::move(jr));
    }
    json j = base_summary(cfg);
    j["n_dofs_coarse"] = r.rounds.front().num_dofs;
    j["n_dofs_fine"] = r.rounds.back().num_dofs;
    j["eigenvalues"] = r.eigenvalues;
    j["rounds"] = std::move(rounds);
    write_summary(dir, j);
    return all_converged ? 0 : 1;
}

int run_algebraic(const RunConfig& cfg, const fs::path& dir) {
    const Hierarchy h = load_pencil(cfg.file_a, cfg.file_b, cfg.file_p, cfg.file_coarse_a,
                                    cfg.file_coarse_b);
    const PaseConfig pcfg = pase_config_from(cfg);
    const PaseResult r = pase_solve(h, pcfg);

    write_eigenvalues_csv(dir, r.eigenvalues, r.report.residual_history.back());
    write_history_csv(dir, r.report);
    json j = base_summary(cfg);
    j["n_dofs_coarse"] = h.a_coarse.nrows;
    j["n_dofs_fine"] = h.a_fine.nrows;
    j["eigenvalues"] = r.eigenvalues;
    j["run"] = report_json(r.report);
    write_summary(dir, j);
    return r.report.converged ? 0 : 1;
}

int run_impl(const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    if (cfg.mode == "square-convergence") return run_square(cfg, dir);
    if (cfg.mode == "precond-compare") return run_precond_compare(cfg, dir);
    if (cfg.mode == "batch") return run_batch(cfg, dir);
    if (cfg.mode == "adaptive-lshape") return run_adaptive(cfg, dir);
    if (cfg.mode == "algebraic") return run_algebraic(cfg, dir);
    throw ConfigError("config: unknown mode '" + cfg.mode + "'");
}

}  // namespace

Hierarchy load_pencil(const std::string& a_path, const std::string& b_path,
                      const std::string& p_path, const std::string& coarse_a_path,
                      const std::string& coarse_b_path) {
    Hierarchy h;
    h.a_fine = read_matrix_market_file(a_path);
    h.b_fine = read_matrix_market_file(b_path);
    h.prolong = read_matrix_market_file(p_path);
    if (h.a_fine.nrows != h.a_fine.ncols || h.b_fine.nrows != h.b_fine.ncols ||
        h.a_fine.nrows != h.b_fine.nrows)
        throw IoError("pencil: fine matrices must be square and equally sized");
    if (h.prolong.nrows != h.a_fine.nrows)
        throw IoError("pencil: interpolation row count differs from the fine matrices");
    if (!h.a_fine.is_symmetric(1e-12) || !h.b_fine.is_symmetric(1e-12))
        throw IoError("pencil: fine matrices must be symmetric");

    if (!coarse_a_path.empty() || !coarse_b_path.empty()) {
        if (coarse_a_path.empty() || coarse_b_path.empty())
            throw IoError("pencil: coarse matrices must be given together");
        h.a_coarse = read_matrix_market_file(coarse_a_path);
        h.b_coarse = read_matrix_market_file(coarse_b_path);
        if (h.a_coarse.nrows != h.prolong.ncols || h.b_coarse.nrows != h.prolong.ncols)
            throw IoError("pencil: coarse size differs from the interpolation columns");
        if (!h.a_coarse.is_symmetric(1e-12) || !h.b_coarse.is_symmetric(1e-12))
            throw IoError("pencil: coarse matrices must be symmetric");
    } else {
        const SparseMatrix pt = transpose(h.prolong);
        h.a_coarse = csr_matmul(pt, csr_matmul(h.a_fine, h.prolong));
        h.b_coarse = csr_matmul(pt, csr_matmul(h.b_fine, h.prolong));
    }
    return h;
}

int run(const RunConfig& cfg) {
    try {
        return run_impl(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const IndefiniteError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const SingularError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const ShiftProximityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const CaptureError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const DegenerateInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const MeshError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const NestingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 6;
    }
}

}  // namespace augeig
