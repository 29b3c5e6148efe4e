#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "moments/cells.hpp"
#include "moments/diagnostics.hpp"
#include "moments/forward.hpp"
#include "moments/io.hpp"
#include "moments/solver.hpp"

namespace fs = std::filesystem;
using namespace moments;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void emit_manifest(const std::string& out_dir, RunManifest m) {
    m.outputs.push_back("manifest.json");
    write_file(out_dir + "/manifest.json", manifest_to_json(m));
}

int cmd_solve(const std::string& measure_path, const std::string& config_path,
              const std::string& out_dir, std::uint64_t seed, double tol, int threads,
              bool have_tol, bool have_seed) {
    Timer timer;
    DiscreteMeasure mu;
    SolverConfig cfg;
    RunManifest man;
    man.command = "solve";
    try {
        const std::string mtext = read_file(measure_path);
        man.inputs.emplace_back(measure_path, fnv1a64_hex(mtext));
        mu = measure_path.size() >= 4 &&
                     measure_path.substr(measure_path.size() - 4) == ".csv"
                 ? measure_from_csv(mtext)
                 : measure_from_json(mtext);
        if (!config_path.empty()) {
            const std::string ctext = read_file(config_path);
            man.inputs.emplace_back(config_path, fnv1a64_hex(ctext));
            cfg = to_solver_config(parse_config(ctext));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (have_seed) cfg.seed = seed;
    if (have_tol) cfg.gradient_tol = tol;
    if (threads > 0) cfg.threads = threads;
    man.seed = cfg.seed;
    man.config = config_snapshot(cfg);

    try {
        require_valid(mu);
    } catch (const std::exception& e) {
        std::cerr << "invalid measure: " << e.what() << "\n";
        return 1;
    }

    fs::create_directories(out_dir);
    auto [potential, report] = solve(mu, cfg);

    write_file(out_dir + "/potential.json", potential_to_json(potential));
    write_file(out_dir + "/report.json", solve_report_to_json(report));
    write_file(out_dir + "/trace.csv", trace_to_csv(report));
    man.outputs = {"potential.json", "report.json", "trace.csv"};
    if (potential.dim == 2) {
        const CellDecomposition cells = build_cells(potential, cfg.threads);
        write_file(out_dir + "/cells.csv", cells_to_csv(cells));
        man.outputs.push_back("cells.csv");
    }
    man.wall_time_s = timer.seconds();
    emit_manifest(out_dir, man);

    std::cout << (report.converged ? "converged" : "NOT converged") << " in "
              << report.iterations << " iterations; grad_inf="
              << report.final_grad_norm << "\n";
    return report.converged ? 0 : 2;
}

int cmd_forward(const std::string& potential_path, const std::string& builtin_case,
                int dim, std::size_t samples, std::uint64_t seed,
                const std::string& out_dir, int threads) {
    Timer timer;
    RunManifest man;
    man.command = "forward";
    man.seed = seed;
    MomentMeasureEstimate est;
    try {
        if (!potential_path.empty()) {
            const std::string text = read_file(potential_path);
            man.inputs.emplace_back(potential_path, fnv1a64_hex(text));
            const PolyhedralPotential p = potential_from_json(text);
            if (p.dim <= 2) {
                est = moment_measure_polyhedral(p, {}, threads);
            } else {
                McOptions opt;
                opt.samples = samples;
                opt.seed = seed;
                opt.threads = threads;
                est = moment_measure_polyhedral_mc(p, opt);
            }
        } else if (!builtin_case.empty()) {
            AnalyticPotential a;
            if (builtin_case == "cube")
                a = cube_potential(dim);
            else if (builtin_case == "gaussian")
                a = gaussian_potential(dim);
            else if (builtin_case == "sphere")
                a = norm_potential(dim);
            else if (builtin_case == "simplex")
                a = simplex_potential(dim);
            else
                throw std::invalid_argument("unknown builtin case '" + builtin_case +
                                            "'");
            est = moment_measure_sampled(a, samples, seed, threads);
        } else {
            throw std::invalid_argument("forward: need --potential or --case");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    fs::create_directories(out_dir);
    write_file(out_dir + "/moment_measure.csv", estimate_to_csv(est));
    const ValidationReport rep = necessary_conditions_report(est);
    write_file(out_dir + "/necessary_conditions.json", validation_report_to_json(rep));
    man.outputs = {"moment_measure.csv", "necessary_conditions.json"};
    man.wall_time_s = timer.seconds();
    emit_manifest(out_dir, man);
    std::cout << "necessary conditions: mass=" << rep.mass_ok
              << " span=" << rep.span_ok << " barycenter=" << rep.barycenter_ok
              << "\n";
    return 0;
}

int cmd_validate(const std::string& measure_path, double tol) {
    try {
        const DiscreteMeasure mu = load_measure(measure_path);
        const ValidationReport rep = validate(mu, tol);
        std::cout << validation_report_to_json(rep);
        if (!rep.mass_ok)
            std::cerr << "condition (i) fails: total mass must be finite and positive\n";
        if (!rep.span_ok)
            std::cerr << "condition (ii) fails: atoms lie in a lower-dimensional "
                         "subspace\n";
        if (!rep.barycenter_ok)
            std::cerr << "condition (iii) fails: barycenter is not at the origin\n";
        return rep.all_ok() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_gallery(const std::string& case_name, int dim, std::size_t samples,
                std::uint64_t seed, const std::string& out_dir, int threads) {
    Timer timer;
    std::vector<CheckResult> results;
    try {
        results = gallery_run(case_name, dim, samples, seed, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
                  << " margin=" << r.margin << "\n";
        all = all && r.pass;
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(out_dir + "/ledger.csv", ledger_to_csv(results));
        RunManifest man;
        man.command = "gallery " + case_name;
        man.seed = seed;
        man.outputs = {"ledger.csv"};
        man.wall_time_s = timer.seconds();
        emit_manifest(out_dir, man);
    }
    return all ? 0 : 1;
}

int cmd_check(const std::string& suite, int seeds, const std::string& out_dir,
              int threads) {
    Timer timer;
    std::vector<CheckResult> results;
    bool all = true;
    auto run_suite = [&](const std::string& name) {
        SweepResult sw;
        if (name == "prekopa")
            sw = sweep_prekopa_midpoint(seeds, threads);
        else if (name == "subgradient-prekopa")
            sw = sweep_subgradient_prekopa(seeds, threads);
        else if (name == "santalo")
            sw = sweep_santalo(seeds, threads);
        else if (name == "fradelizi")
            sw = sweep_fradelizi(seeds, threads);
        else if (name == "lower-bound")
            sw = sweep_lower_bound(seeds, threads);
        else if (name == "negative-controls")
            sw = negative_controls();
        else
            throw std::invalid_argument("unknown suite '" + name + "'");
        all = all && sw.all_pass;
        results.insert(results.end(), sw.results.begin(), sw.results.end());
    };
    try {
        if (suite == "all") {
            for (const char* s : {"prekopa", "subgradient-prekopa", "santalo",
                                  "fradelizi", "lower-bound", "negative-controls"})
                run_suite(s);
        } else {
            run_suite(suite);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    int failures = 0;
    for (const auto& r : results) failures += r.pass ? 0 : 1;
    std::cout << results.size() << " checks, " << failures << " failures\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(out_dir + "/ledger.csv", ledger_to_csv(results));
        RunManifest man;
        man.command = "check " + suite;
        man.seed = static_cast<std::uint64_t>(seeds);
        man.outputs = {"ledger.csv"};
        man.wall_time_s = timer.seconds();
        emit_manifest(out_dir, man);
    }
    return all ? 0 : 1;
}

int cmd_report(const std::string& run_dir) {
    if (!fs::is_directory(run_dir)) {
        std::cerr << "error: no such run directory: " << run_dir << "\n";
        return 1;
    }
    std::ostringstream summary;
    bool produced = false;

    const std::string trace_path = run_dir + "/trace.csv";
    if (fs::exists(trace_path)) {
        const std::string text = read_file(trace_path);
        write_file(run_dir + "/plot_objective.csv", text);
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        double first = 0.0, last = 0.0;
        bool monotone = true, have = false;
        double prev = -kInfinity;
        while (std::getline(in, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            const double obj = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            if (!have) first = obj;
            have = true;
            last = obj;
            monotone = monotone && obj >= prev - 1e-12;
            prev = obj;
        }
        summary << "objective: first=" << first << " last=" << last
                << " monotone=" << (monotone ? "yes" : "no") << "\n";
        produced = true;
    }

    const std::string cells_path = run_dir + "/cells.csv";
    if (fs::exists(cells_path)) {
        const std::string text = read_file(cells_path);
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        std::ostringstream flat;
        flat << "atom_index,x,y\n";
        int ncells = 0;
        while (std::getline(in, line)) {
            std::vector<std::string> cols;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cols.push_back(cell);
            if (cols.size() < 2) continue;
            ++ncells;
            const int nv = std::stoi(cols[1]);
            for (int k = 0; k < nv; ++k)
                flat << cols[0] << "," << cols[2 + 2 * k] << "," << cols[3 + 2 * k]
                     << "\n";
        }
        write_file(run_dir + "/plot_cells.csv", flat.str());
        summary << "cells: " << ncells << " polygons\n";
        produced = true;
    }

    const std::string mm_path = run_dir + "/moment_measure.csv";
    if (fs::exists(mm_path)) {
        const MomentMeasureEstimate est = estimate_from_csv(read_file(mm_path));
        write_file(run_dir + "/plot_scatter.csv", estimate_to_csv(est));
        summary << "push-forward: " << est.size() << " points, barycenter = (";
        for (int k = 0; k < est.dim; ++k)
            summary << (k ? ", " : "") << est.barycenter[k];
        summary << ")\n";
        produced = true;
    }

    if (!produced) {
        std::cerr << "error: run directory has no recognized outputs\n";
        return 1;
    }
    write_file(run_dir + "/summary.txt", summary.str());
    std::cout << summary.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment-solver: moment measures of convex potentials — "
                 "inverse solver, forward push-forwards, inequality checks"};
    app.require_subcommand(1);

    std::string measure_path, config_path, potential_path, out_dir, run_dir;
    std::string case_name, suite = "all";
    std::uint64_t seed = 1;
    double tol = 1e-8;
    double vtol = kDefaultValidateTol;
    int threads = 0;
    int dim = 2;
    int seeds = 100;
    std::size_t samples = 1000000;

    auto* solve_cmd = app.add_subcommand("solve", "solve the inverse problem");
    solve_cmd->add_option("--measure", measure_path, "measure file (json|csv)")
        ->required();
    solve_cmd->add_option("--config", config_path, "flat key=value config");
    solve_cmd->add_option("--out", out_dir, "output directory")->required();
    auto* seed_opt = solve_cmd->add_option("--seed", seed, "rng seed");
    auto* tol_opt = solve_cmd->add_option("--tol", tol, "gradient tolerance");
    solve_cmd->add_option("--threads", threads, "worker threads");

    auto* fwd = app.add_subcommand("forward", "forward moment measure");
    fwd->add_option("--potential", potential_path, "potential json");
    fwd->add_option("--case", case_name, "builtin case (cube|gaussian|sphere|simplex)");
    fwd->add_option("--dim", dim, "dimension for builtin cases");
    fwd->add_option("--samples", samples, "sample count");
    fwd->add_option("--seed", seed, "rng seed");
    fwd->add_option("--out", out_dir, "output directory")->required();
    fwd->add_option("--threads", threads, "worker threads");

    auto* val = app.add_subcommand("validate", "check the existence conditions");
    val->add_option("--measure", measure_path, "measure file")->required();
    val->add_option("--tol", vtol, "validation tolerance");

    auto* gal = app.add_subcommand("gallery", "closed-form forward gallery");
    gal->add_option("--case", case_name, "case name")->required();
    gal->add_option("--dim", dim, "dimension");
    gal->add_option("--samples", samples, "sample count");
    gal->add_option("--seed", seed, "rng seed");
    gal->add_option("--out", out_dir, "output directory");
    gal->add_option("--threads", threads, "worker threads");

    auto* chk = app.add_subcommand("check", "inequality sweeps");
    chk->add_option("--suite", suite,
                    "prekopa|subgradient-prekopa|santalo|fradelizi|lower-bound|"
                    "negative-controls|all");
    chk->add_option("--seeds", seeds, "number of seeded instances");
    chk->add_option("--out", out_dir, "output directory");
    chk->add_option("--threads", threads, "worker threads");

    auto* rep = app.add_subcommand("report", "emit plot data for a run directory");
    rep->add_option("--run", run_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed())
            return cmd_solve(measure_path, config_path, out_dir, seed, tol, threads,
                             tol_opt->count() > 0, seed_opt->count() > 0);
        if (fwd->parsed())
            return cmd_forward(potential_path, case_name, dim, samples, seed, out_dir,
                               threads);
        if (val->parsed()) return cmd_validate(measure_path, vtol);
        if (gal->parsed())
            return cmd_gallery(case_name, dim, samples, seed, out_dir, threads);
        if (chk->parsed()) return cmd_check(suite, seeds, out_dir, threads);
        if (rep->parsed()) return cmd_report(run_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
