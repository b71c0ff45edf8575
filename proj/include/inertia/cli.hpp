#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "inertia/integrator.hpp"
#include "inertia/io.hpp"
#include "inertia/lyapunov.hpp"
#include "inertia/oracle.hpp"
#include "inertia/problems.hpp"
#include "inertia/solver.hpp"
#include "inertia/version.hpp"

namespace inertia::cli {

namespace fs = std::filesystem;

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadArgs = 2;
inline constexpr int kExitIntegrationFailure = 3;
inline constexpr int kExitDiverged = 4;

inline Vec parse_vector(const std::string& text) {
    Vec v;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find(',', start);
        const std::string cell =
            text.substr(start, pos == std::string::npos ? pos : pos - start);
        if (cell.empty()) throw std::invalid_argument("empty component in vector '" + text + "'");
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (used != cell.size())
            throw std::invalid_argument("bad vector component '" + cell + "'");
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return v;
}

struct ResolvedProblem {
    CompositeProblem problem;
    json desc;
};

/// --problem accepts a catalog family name or a path to a spec JSON file.
inline ResolvedProblem resolve_problem(const std::string& spec, std::uint64_t seed) {
    ResolvedProblem r;
    if (fs::exists(spec) && fs::is_regular_file(spec)) {
        r.problem = load_problem_spec(spec);
        r.desc["source"] = spec;
        r.desc["kind"] = "spec-file";
    } else {
        r.problem = catalog(spec, {{"seed", static_cast<double>(seed)}});
        r.desc["source"] = spec;
        r.desc["kind"] = "catalog";
        r.desc["seed"] = seed;
    }
    r.desc["id"] = r.problem.id;
    return r;
}

struct SimulateArgs {
    std::string problem;
    std::uint64_t seed = 0;
    double alpha = 3.0;
    double t0 = 1.0;
    double t_end = 100.0;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int samples = 200;
    long max_steps = 2000000;
    std::string x0;          // comma vector; empty = catalog suggestion
    std::string v0 = "zero"; // zero | gradient | prox-dir | comma vector
    double fit_window = 0.5;
    bool envelope = false;
    std::string out = "out";
};

struct SolveArgs {
    std::string problem;
    std::uint64_t seed = 0;
    double alpha = 3.0;
    std::string gamma = "auto";
    long iters = 10000;
    std::string x0;
    std::optional<double> stop_gap;
    std::optional<double> stop_step;
    double fit_window = 0.5;
    bool envelope = true;
    std::string out = "out";
};

struct CellOutcome {
    bool ok = false;
    int exit_code = kExitOk;
    std::string error;
    RateFit fit;
    double sup_tsq_gap = std::numeric_limits<double>::quiet_NaN();
};

inline json manifest_skeleton(const std::string& command, const std::vector<std::string>& argv) {
    json m;
    m["command"] = command;
    m["argv"] = argv;
    m["tool_version"] = kVersion;
    m["outputs"] = json::array();
    m["notes"] = json::array();
    return m;
}

inline void finish_manifest(json& m, const fs::path& dir,
                            std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    m["wall_time_s"] = elapsed.count();
    write_text_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

inline CellOutcome simulate_cell(const SimulateArgs& a, const std::vector<std::string>& argv,
                                 bool quiet = false) {
    CellOutcome outcome;
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir(a.out);
    fs::create_directories(dir);
    json manifest = manifest_skeleton("simulate", argv);

    try {
        auto resolved = resolve_problem(a.problem, a.seed);
        CompositeProblem problem = resolved.problem;
        bool surrogate = false;
        if (problem.nonsmooth) {
            problem = smooth_surrogate(problem);
            surrogate = true;
            if (!quiet)
                std::cout << "note: nonsmooth term dropped for the continuous dynamics ("
                          << problem.id << ")\n";
            manifest["notes"].push_back("continuous dynamics use the smooth surrogate");
        }
        resolved.desc["surrogate"] = surrogate;
        resolved.desc["effective_id"] = problem.id;
        manifest["problem"] = resolved.desc;

        const Vec x0 = a.x0.empty() ? problem.suggested_x0 : parse_vector(a.x0);
        Vec v0;
        std::string v0_desc = a.v0;
        if (a.v0 == "zero")
            v0 = initial_velocity(problem, x0, a.alpha, a.t0, VelocityInit::zero);
        else if (a.v0 == "gradient")
            v0 = initial_velocity(problem, x0, a.alpha, a.t0, VelocityInit::gradient);
        else if (a.v0 == "prox-dir")
            v0 = initial_velocity(resolved.problem, x0, a.alpha, a.t0, VelocityInit::prox_dir);
        else
            v0 = parse_vector(a.v0);

        IntegratorConfig config;
        config.alpha = a.alpha;
        config.t0 = a.t0;
        config.t_end = a.t_end;
        config.rel_tol = a.rel_tol;
        config.abs_tol = a.abs_tol;
        config.sample_count = a.samples;
        config.max_steps = a.max_steps;

        manifest["config"] = {{"alpha", a.alpha},       {"t0", a.t0},
                              {"t_end", a.t_end},       {"rel_tol", a.rel_tol},
                              {"abs_tol", a.abs_tol},   {"samples", a.samples},
                              {"max_steps", a.max_steps},
                              {"x0", x0},               {"v0", v0_desc},
                              {"v0_vector", v0},        {"fit_window", a.fit_window},
                              {"envelope", a.envelope}, {"seed", a.seed}};

        Trajectory traj = integrate(problem, config, x0, v0);
        write_text_file((dir / "trajectory.csv").string(), trajectory_csv(traj));
        manifest["outputs"].push_back("trajectory.csv");

        if (traj.status != IntegrationStatus::ok) {
            manifest["error"] = traj.message;
            finish_manifest(manifest, dir, started);
            outcome.exit_code = kExitIntegrationFailure;
            outcome.error = traj.message;
            if (!quiet) std::cerr << "integration failure: " << traj.message << "\n";
            return outcome;
        }

        EnergyReport rep = energy_report(traj, problem, a.alpha);
        write_text_file((dir / "energy.csv").string(), energy_csv(rep));
        manifest["outputs"].push_back("energy.csv");

        RateFit fit;
        if (rep.gap_known) {
            auto [ts, gs] = gap_series(traj, problem);
            fit = fit_rate(ts, gs, a.fit_window, a.envelope);
        } else {
            fit.note = "gap unknown: no reference minimum";
        }
        write_text_file((dir / "ratefit.json").string(), rate_fit_json(fit).dump(2) + "\n");
        manifest["outputs"].push_back("ratefit.json");

        json summary;
        summary["w_monotone"] = rep.w_verdict.ok;
        summary["w_max_violation"] = rep.w_verdict.max_violation;
        if (rep.anchored) {
            summary["e_lx_monotone"] = rep.e_lx_verdict.ok;
            summary["e_lp_monotone"] = rep.e_lp_verdict.ok;
            summary["value_rate_bound_ok"] = rep.value_rate_bound_ok;
            summary["e_bound_at_t0"] = rep.value_rate_bound;
        }
        if (rep.gap_known) summary["sup_tsq_gap"] = rep.sup_tsq_gap;
        for (const auto& [name, val] : rep.integrals) summary["integral_" + name] = val;
        manifest["diagnostics"] = summary;

        finish_manifest(manifest, dir, started);
        outcome.ok = true;
        outcome.fit = fit;
        outcome.sup_tsq_gap = rep.gap_known ? rep.sup_tsq_gap
                                            : std::numeric_limits<double>::quiet_NaN();
        if (!quiet) {
            std::cout << "simulate: " << problem.id << " alpha=" << a.alpha << " samples="
                      << traj.states.size() << " -> " << dir.string() << "\n";
            if (fit.defined)
                std::cout << "  gap rate exponent " << fit.exponent << " (residual "
                          << fit.residual << ")\n";
            else
                std::cout << "  gap rate: " << fit.note << "\n";
        }
        return outcome;
    } catch (const std::exception& e) {
        manifest["error"] = e.what();
        finish_manifest(manifest, dir, started);
        outcome.exit_code = kExitBadArgs;
        outcome.error = e.what();
        if (!quiet) std::cerr << "error: " << e.what() << "\n";
        return outcome;
    }
}

inline CellOutcome solve_cell(const SolveArgs& a, const std::vector<std::string>& argv,
                              bool quiet = false) {
    CellOutcome outcome;
    const auto started = std::chrono::steady_clock::now();
    const fs::path dir(a.out);
    fs::create_directories(dir);
    json manifest = manifest_skeleton("solve", argv);

    try {
        auto resolved = resolve_problem(a.problem, a.seed);
        CompositeProblem problem = resolved.problem;
        manifest["problem"] = resolved.desc;

        SolverConfig config;
        config.alpha = a.alpha;
        config.max_iters = a.iters;
        config.x0 = a.x0.empty() ? problem.suggested_x0 : parse_vector(a.x0);
        config.stop_gap = a.stop_gap;
        config.stop_step = a.stop_step;
        if (a.gamma != "auto") {
            std::size_t used = 0;
            config.gamma = std::stod(a.gamma, &used);
            if (used != a.gamma.size() || !(config.gamma > 0.0))
                throw std::invalid_argument("--gamma must be 'auto' or a positive number");
        }

        std::optional<double> reference;
        if (!problem.known_min_value && problem.smooth.lipschitz_constant) {
            const auto& ref = oracle::reference_minimum_cached(problem);
            reference = ref.min_value;
            manifest["reference_min"] = {{"value", ref.min_value},
                                         {"certificate", ref.certificate},
                                         {"certified", ref.certified},
                                         {"iterations", ref.iterations_used}};
            if (!ref.certified)
                manifest["notes"].push_back("reference minimum uncertified within budget");
            else
                problem.known_minimizer = ref.minimizer;  // anchor for the energy diagnostic
        }

        if (a.alpha < 3.0) manifest["notes"].push_back("alpha < 3: no rate guarantee");

        IterateHistory hist = run(problem, config, reference);
        for (const auto& w : hist.warnings) {
            manifest["notes"].push_back(w);
            if (!quiet) std::cout << "warning: " << w << "\n";
        }

        manifest["config"] = {{"alpha", a.alpha},
                              {"gamma", a.gamma},
                              {"gamma_used", hist.gamma_used},
                              {"iters", a.iters},
                              {"x0", config.x0},
                              {"fit_window", a.fit_window},
                              {"envelope", a.envelope},
                              {"seed", a.seed}};

        write_text_file((dir / "history.csv").string(), history_csv(hist));
        manifest["outputs"].push_back("history.csv");

        DiscreteDiagnostics diag = discrete_diagnostics(hist);
        write_text_file((dir / "diagnostics.csv").string(), diagnostics_csv(diag));
        manifest["outputs"].push_back("diagnostics.csv");

        RateFit fit;
        if (hist.reference_min) {
            std::vector<double> ks, gs;
            for (const auto& r : hist.records) {
                if (!r.gap) continue;
                ks.push_back(static_cast<double>(r.k));
                gs.push_back(*r.gap);
            }
            fit = fit_rate(ks, gs, a.fit_window, a.envelope);
        } else {
            fit.note = "gap unknown: no reference minimum";
        }
        write_text_file((dir / "ratefit.json").string(), rate_fit_json(fit).dump(2) + "\n");
        manifest["outputs"].push_back("ratefit.json");

        json summary;
        summary["status"] = to_string(hist.status);
        summary["iterations"] = hist.iterations;
        summary["k2gap_final_decade_increase"] = diag.k2gap_final_decade_increase;
        summary["k2gap_envelope_stable"] = diag.k2gap_envelope_stable;
        summary["sum_k_step2_tail_fraction"] = diag.step_sum_tail.tail_fraction;
        summary["sum_k_gap_tail_fraction"] = diag.gap_sum_tail.tail_fraction;
        summary["tail_cauchy_asserted"] = diag.step_sum_tail.asserted;
        if (!std::isnan(diag.energy_monotone_fraction))
            summary["discrete_energy_monotone_fraction"] = diag.energy_monotone_fraction;
        manifest["diagnostics"] = summary;

        finish_manifest(manifest, dir, started);

        if (hist.status == SolveStatus::diverged) {
            outcome.exit_code = kExitDiverged;
            outcome.error = hist.message;
            if (!quiet) std::cerr << "divergence: " << hist.message << "\n";
            return outcome;
        }
        outcome.ok = true;
        outcome.fit = fit;
        outcome.sup_tsq_gap = diag.cummax_k2gap.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : diag.cummax_k2gap.back();
        if (!quiet) {
            std::cout << "solve: " << problem.id << " alpha=" << a.alpha << " iters="
                      << hist.iterations << " status=" << to_string(hist.status) << " -> "
                      << dir.string() << "\n";
            if (fit.defined)
                std::cout << "  gap rate exponent " << fit.exponent << " (residual "
                          << fit.residual << ")\n";
            else
                std::cout << "  gap rate: " << fit.note << "\n";
        }
        return outcome;
    } catch (const std::exception& e) {
        manifest["error"] = e.what();
        finish_manifest(manifest, dir, started);
        outcome.exit_code = kExitBadArgs;
        outcome.error = e.what();
        if (!quiet) std::cerr << "error: " << e.what() << "\n";
        return outcome;
    }
}

inline std::vector<double> parse_alpha_grid(const std::string& text) {
    std::vector<double> alphas;
    if (text.find(':') != std::string::npos) {
        const auto p1 = text.find(':');
        const auto p2 = text.find(':', p1 + 1);
        if (p2 == std::string::npos)
            throw std::invalid_argument("--alpha grid must be lo:hi:step or a comma list");
        const double lo = std::stod(text.substr(0, p1));
        const double hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
        const double step = std::stod(text.substr(p2 + 1));
        if (!(step > 0.0) || hi < lo) throw std::invalid_argument("--alpha grid: need hi >= lo, step > 0");
        const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) alphas.push_back(lo + step * static_cast<double>(i));
        return alphas;
    }
    for (double a : parse_vector(text)) alphas.push_back(a);
    return alphas;
}

inline int resolve_jobs(int jobs_flag) {
    if (jobs_flag > 0) return jobs_flag;
    if (const char* env = std::getenv("INERTIA_LAB_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct SweepArgs {
    std::string alpha_grid;
    std::string mode = "simulate";
    int jobs = 0;
    std::string out = "sweep-out";
    SimulateArgs sim;
    SolveArgs sol;
};

inline int run_sweep(const SweepArgs& s, const std::vector<std::string>& argv) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<double> alphas;
    try {
        alphas = parse_alpha_grid(s.alpha_grid);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArgs;
    }
    const fs::path dir(s.out);
    fs::create_directories(dir);

    std::vector<CellOutcome> results(alphas.size());
    std::vector<std::string> cell_dirs(alphas.size());
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, std::min<int>(resolve_jobs(s.jobs),
                                               static_cast<int>(alphas.size())));

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= alphas.size()) return;
            std::ostringstream name;
            name << "alpha-" << alphas[i];
            const fs::path cell = dir / name.str();
            cell_dirs[i] = cell.string();
            if (s.mode == "simulate") {
                SimulateArgs a = s.sim;
                a.alpha = alphas[i];
                a.out = cell.string();
                results[i] = simulate_cell(a, argv, /*quiet=*/true);
            } else {
                SolveArgs a = s.sol;
                a.alpha = alphas[i];
                a.out = cell.string();
                results[i] = solve_cell(a, argv, /*quiet=*/true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "alpha,fit_exponent,residual,sup_t2gap\n";
    std::size_t ok_count = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto& r = results[i];
        csv << fmt17(alphas[i]) << ",";
        if (r.ok && r.fit.defined) csv << fmt17(r.fit.exponent);
        csv << ",";
        if (r.ok && r.fit.defined) csv << fmt17(r.fit.residual);
        csv << ",";
        if (r.ok && !std::isnan(r.sup_tsq_gap)) csv << fmt17(r.sup_tsq_gap);
        csv << "\n";
        if (r.ok) ++ok_count;
        std::cout << "alpha=" << alphas[i] << ": "
                  << (r.ok ? (r.fit.defined ? "exponent " + std::to_string(r.fit.exponent)
                                            : "ok (" + r.fit.note + ")")
                           : "FAILED (" + r.error + ")")
                  << "\n";
    }
    write_text_file((dir / "summary.csv").string(), csv.str());

    json manifest = manifest_skeleton("sweep", argv);
    manifest["mode"] = s.mode;
    manifest["alphas"] = alphas;
    manifest["jobs"] = jobs;
    manifest["cells"] = cell_dirs;
    manifest["ok_cells"] = ok_count;
    manifest["outputs"].push_back("summary.csv");
    finish_manifest(manifest, dir, started);

    std::cout << "sweep: " << ok_count << "/" << alphas.size() << " cells ok -> "
              << (dir / "summary.csv").string() << "\n";
    return ok_count > 0 ? kExitOk : kExitIntegrationFailure;
}

struct ReportArgs {
    std::string in;
    std::string col = "gap";
    double fit_window = 0.5;
    bool envelope = false;
};

inline int run_report(const ReportArgs& a) {
    CsvTable table;
    try {
        table = read_csv(a.in);
    } catch (const CsvError& e) {
        std::cerr << "malformed CSV: " << e.what() << "\n";
        return kExitBadArgs;
    }
    const auto ycol = table.column(a.col);
    if (!ycol) {
        std::cerr << "error: column '" << a.col << "' not present in " << a.in << "\n";
        return kExitBadArgs;
    }
    const std::vector<double> xs = table.column_values(0);
    const std::vector<double> ys = table.column_values(*ycol);
    const RateFit fit = fit_rate(xs, ys, a.fit_window, a.envelope);

    json out;
    out["ratefit"] = rate_fit_json(fit);
    json verdicts = json::object();
    for (const std::string name : {"W", "E_lx", "E_lp"}) {
        const auto c = table.column(name);
        if (!c) continue;
        std::vector<double> q;
        for (double v : table.column_values(*c))
            if (!std::isnan(v)) q.push_back(v);
        if (q.size() < 2) continue;
        const MonotoneVerdict v = monotone_verdict(q, true);
        verdicts[name] = {{"nonincreasing", v.ok}, {"max_violation", v.max_violation}};
    }
    out["monotonicity"] = verdicts;

    std::cout << "report: " << a.in << " (" << table.rows.size() << " rows, x = '"
              << table.header[0] << "', y = '" << a.col << "')\n";
    if (fit.defined)
        std::cout << "  rate exponent " << fit.exponent << ", intercept " << fit.intercept
                  << ", residual " << fit.residual << ", window [" << fit.window_lo << ", "
                  << fit.window_hi << "]" << (fit.envelope_used ? ", envelope" : "") << "\n";
    else
        std::cout << "  rate: " << fit.note << "\n";
    for (auto it = verdicts.begin(); it != verdicts.end(); ++it)
        std::cout << "  " << it.key() << ": "
                  << (it.value()["nonincreasing"].get<bool>() ? "nonincreasing" : "INCREASES")
                  << " (max violation " << it.value()["max_violation"].get<double>() << ")\n";
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"inertia-lab: inertial gradient dynamics with vanishing viscosity"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    std::vector<std::string> argv_echo(argv, argv + argc);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "integrate the damped flow and report energies");
    simulate->add_option("--problem", sim.problem, "catalog family or spec-file path")->required();
    simulate->add_option("--alpha", sim.alpha, "damping coefficient alpha");
    simulate->add_option("--t0", sim.t0, "start time (> 0)");
    simulate->add_option("--t-end", sim.t_end, "end time");
    simulate->add_option("--x0", sim.x0, "initial point, comma separated");
    simulate->add_option("--v0", sim.v0, "zero | gradient | prox-dir | comma vector");
    simulate->add_option("--rel-tol", sim.rel_tol, "relative tolerance");
    simulate->add_option("--abs-tol", sim.abs_tol, "absolute tolerance");
    simulate->add_option("--samples", sim.samples, "geometric sample count");
    simulate->add_option("--max-steps", sim.max_steps, "step budget");
    simulate->add_option("--fit-window", sim.fit_window, "trailing log-range fraction for rate fits");
    simulate->add_flag("--envelope", sim.envelope, "fit on the upper envelope");
    simulate->add_option("--seed", sim.seed, "seed for generated problems");
    simulate->add_option("--out", sim.out, "output directory");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "run the inertial forward-backward solver");
    solve->add_option("--problem", sol.problem, "catalog family or spec-file path")->required();
    solve->add_option("--alpha", sol.alpha, "momentum parameter alpha");
    solve->add_option("--gamma", sol.gamma, "step size, or 'auto' for 1/L");
    solve->add_option("--iters", sol.iters, "iteration budget");
    solve->add_option("--x0", sol.x0, "initial point, comma separated");
    double stop_gap_flag = -1.0, stop_step_flag = -1.0;
    solve->add_option("--stop-gap", stop_gap_flag, "stop when the gap drops below this");
    solve->add_option("--stop-step", stop_step_flag, "stop when the step norm drops below this");
    solve->add_option("--fit-window", sol.fit_window, "trailing log-range fraction for rate fits");
    solve->add_flag("--envelope,!--no-envelope", sol.envelope, "fit on the upper envelope");
    solve->add_option("--seed", sol.seed, "seed for generated problems");
    solve->add_option("--out", sol.out, "output directory");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "run a grid of alphas concurrently");
    sweep->add_option("--alpha", sw.alpha_grid, "lo:hi:step or comma list")->required();
    sweep->add_option("--mode", sw.mode, "simulate | solve")
        ->check(CLI::IsMember({"simulate", "solve"}));
    sweep->add_option("--jobs", sw.jobs, "concurrent cells (default: cores, env INERTIA_LAB_JOBS)");
    sweep->add_option("--problem", sw.sim.problem, "catalog family or spec-file path")->required();
    sweep->add_option("--t0", sw.sim.t0, "start time");
    sweep->add_option("--t-end", sw.sim.t_end, "end time");
    sweep->add_option("--x0", sw.sim.x0, "initial point");
    sweep->add_option("--v0", sw.sim.v0, "initial velocity strategy or vector");
    sweep->add_option("--rel-tol", sw.sim.rel_tol, "relative tolerance");
    sweep->add_option("--samples", sw.sim.samples, "geometric sample count");
    sweep->add_option("--gamma", sw.sol.gamma, "solver step size or 'auto'");
    sweep->add_option("--iters", sw.sol.iters, "solver iteration budget");
    sweep->add_option("--fit-window", sw.sim.fit_window, "fit window fraction");
    sweep->add_flag("--envelope", sw.sim.envelope, "fit on the upper envelope");
    sweep->add_option("--seed", sw.sim.seed, "seed for generated problems");
    sweep->add_option("--out", sw.out, "output directory");

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "recompute rate fits from a stored CSV");
    report->add_option("--in", rep.in, "input CSV")->required();
    report->add_option("--col", rep.col, "value column (default gap)");
    report->add_option("--fit-window", rep.fit_window, "trailing log-range fraction");
    report->add_flag("--envelope", rep.envelope, "fit on the upper envelope");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    if (simulate->parsed()) return simulate_cell(sim, argv_echo).exit_code;
    if (solve->parsed()) {
        if (stop_gap_flag > 0.0) sol.stop_gap = stop_gap_flag;
        if (stop_step_flag > 0.0) sol.stop_step = stop_step_flag;
        return solve_cell(sol, argv_echo).exit_code;
    }
    if (sweep->parsed()) {
        sw.sol.problem = sw.sim.problem;
        sw.sol.seed = sw.sim.seed;
        sw.sol.x0 = sw.sim.x0;
        sw.sol.fit_window = sw.sim.fit_window;
        if (sw.sim.envelope) sw.sol.envelope = true;
        return run_sweep(sw, argv_echo);
    }
    if (report->parsed()) return run_report(rep);
    return kExitBadArgs;
}

}  // namespace inertia::cli
