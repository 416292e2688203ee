#pragma once

// Named experiments behind the command-line interface. Every subcommand
// reads an already-parsed RunConfig, writes CSV/text files into the
// configured output directory, and returns a process exit code: 0 success,
// 1 configuration or validation failure (thrown as std::invalid_argument and
// mapped by the caller), 2 numerical failure (thrown as numerical_error or
// returned directly for non-converged inversions).

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "traceinv/config.hpp"
#include "traceinv/csv.hpp"
#include "traceinv/extended.hpp"
#include "traceinv/forward.hpp"
#include "traceinv/fwi.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/solver.hpp"

namespace traceinv {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string out_path(const RunConfig& c, const std::string& name) {
    return (std::filesystem::path(c.out_dir) / name).string();
}

inline void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw numerical_error(what + " is not finite");
}

}  // namespace detail

inline int run_validate(const RunConfig& cfg) {
    const Geometry g = make_geometry(cfg);
    const GeometryReport rep = validate_geometry(g);
    bool scenario_ok = true;
    std::string problem;
    try {
        validate_config(cfg);
    } catch (const std::invalid_argument& e) {
        scenario_ok = false;
        problem = e.what();
    }
    std::ofstream out(detail::out_path(cfg, "validate.txt"), std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: validate.txt");
    out << "slowness_positive = " << csv_bool(rep.slowness_positive) << '\n'
        << "window_contains = " << csv_bool(rep.window_contains) << '\n'
        << "required_lo = " << csv_num(rep.required_lo) << '\n'
        << "required_hi = " << csv_num(rep.required_hi) << '\n'
        << "available_lo = " << csv_num(rep.available_lo) << '\n'
        << "available_hi = " << csv_num(rep.available_hi) << '\n'
        << "geometry_pass = " << csv_bool(rep.pass()) << '\n'
        << "scenario_pass = " << csv_bool(scenario_ok) << '\n';
    if (!scenario_ok) out << "problem = " << problem << '\n';
    out.close();
    if (!rep.pass() || !scenario_ok)
        throw std::invalid_argument(problem.empty() ? "geometry validation failed" : problem);
    return 0;
}

inline int run_synth(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const SynthesizedData syn = synthesize_data(s);
    CsvWriter csv(detail::out_path(cfg, "traces.csv"));
    csv.row({"t", "d", "d_star", "n"});
    for (std::size_t k = 0; k < s.geom.grid.n; ++k)
        csv.row({csv_num(s.geom.grid.time(k)), csv_num(syn.d.samples[k]),
                 csv_num(syn.d_star.samples[k]), csv_num(syn.n.samples[k])});
    csv.close();
    return 0;
}

inline int run_sweep_fwi(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const std::vector<double> m_grid = make_m_grid(cfg);
    const SynthesizedData syn = synthesize_data(s);
    const std::vector<FwiPoint> pts = fwi_landscape(syn.d, s.lambda, m_grid, s.geom, cfg.threads);
    CsvWriter csv(detail::out_path(cfg, "fwi_sweep.csv"));
    csv.row({"m", "e_reduced"});
    for (const FwiPoint& p : pts) {
        detail::require_finite(p.value, "reduced misfit");
        csv.row({csv_num(p.m), csv_num(p.value)});
    }
    csv.close();
    return 0;
}

inline int run_sweep_ext(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const std::vector<double> m_grid = make_m_grid(cfg);
    const std::vector<double> alphas = parse_double_list(cfg.alpha_list);
    const SynthesizedData syn = synthesize_data(s);
    CsvWriter csv(detail::out_path(cfg, "ext_sweep.csv"));
    csv.row({"m", "alpha", "jtilde", "misfit", "penalty", "grad"});
    std::vector<ReducedEval> evals(m_grid.size());
    for (double alpha : alphas) {
        const PenaltySpec p = make_penalty(s.geom, alpha);
        parallel_for(m_grid.size(), cfg.threads, [&](std::size_t i) {
            evals[i] = reduced_objective(m_grid[i], syn.d, p, s.geom);
            evals[i].gradient = reduced_gradient(m_grid[i], syn.d, p, s.geom);
        });
        for (const ReducedEval& ev : evals) {
            detail::require_finite(ev.objective, "reduced objective");
            detail::require_finite(ev.gradient, "reduced gradient");
            csv.row({csv_num(ev.m), csv_num(alpha), csv_num(ev.objective), csv_num(ev.misfit_term),
                     csv_num(ev.penalty_term), csv_num(ev.gradient)});
        }
    }
    csv.close();
    return 0;
}

inline int run_gradcheck(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const std::vector<double> m_grid = make_m_grid(cfg);
    const SynthesizedData syn = synthesize_data(s);
    const PenaltySpec p = make_penalty(s.geom, cfg.alpha);
    const double h = 1e-6;

    struct Row {
        double m = 0.0, analytic = 0.0, fd = 0.0, comm = 0.0;
        bool usable = false;
    };
    std::vector<Row> rows(m_grid.size());
    parallel_for(m_grid.size(), cfg.threads, [&](std::size_t i) {
        const double m = m_grid[i];
        if (m - h < s.geom.m_min || m + h > s.geom.m_max) return;  // no room for the stencil
        Row& row = rows[i];
        row.m = m;
        row.analytic = reduced_gradient(m, syn.d, p, s.geom);
        const double up = reduced_objective(m + h, syn.d, p, s.geom).objective;
        const double dn = reduced_objective(m - h, syn.d, p, s.geom).objective;
        row.fd = (up - dn) / (2.0 * h);
        row.comm = commutator_gradient(m, syn.d, p, s.geom);
        row.usable = true;
    });

    CsvWriter csv(detail::out_path(cfg, "gradcheck.csv"));
    csv.row({"m", "analytic", "fd", "commutator", "rel_err_fd", "rel_err_comm"});
    for (const Row& row : rows) {
        if (!row.usable) continue;
        detail::require_finite(row.analytic, "reduced gradient");
        const double scale = std::max({std::abs(row.analytic), std::abs(row.fd), 1e-300});
        csv.row({csv_num(row.m), csv_num(row.analytic), csv_num(row.fd), csv_num(row.comm),
                 csv_num(std::abs(row.analytic - row.fd) / scale),
                 csv_num(std::abs(row.analytic - row.comm) /
                         std::max({std::abs(row.analytic), std::abs(row.comm), 1e-300}))});
    }
    csv.close();
    return 0;
}

inline void write_roots_csv(const std::string& path, const std::vector<StationaryPoint>& roots) {
    CsvWriter csv(path);
    csv.row({"m_root", "grad_residual", "bracket_lo", "bracket_hi"});
    for (const StationaryPoint& r : roots) {
        detail::require_finite(r.m_root, "stationary point");
        csv.row({csv_num(r.m_root), csv_num(r.grad_at_root), csv_num(r.bracket_lo),
                 csv_num(r.bracket_hi)});
    }
    csv.close();
}

inline int run_scan(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const std::vector<double> m_grid = make_m_grid(cfg);
    const SynthesizedData syn = synthesize_data(s);
    const PenaltySpec p = make_penalty(s.geom, cfg.alpha);
    const std::vector<StationaryPoint> roots =
        scan_stationary_points(syn.d, p, s.geom, m_grid, cfg.threads);
    write_roots_csv(detail::out_path(cfg, "roots.csv"), roots);
    return 0;
}

inline int run_invert(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const SynthesizedData syn = synthesize_data(s);
    InvertOptions opts;
    opts.m0 = cfg.invert_m0;
    opts.max_outer = cfg.invert_max_outer;
    const InversionResult res = invert_discrepancy(syn.d, s, cfg.invert_alpha0, opts);

    CsvWriter csv(detail::out_path(cfg, "invert_log.csv"));
    csv.row({"iter", "m", "alpha", "misfit", "grad"});
    for (const IterationRecord& it : res.iterations)
        csv.row({csv_num(it.iter), csv_num(it.m), csv_num(it.alpha), csv_num(it.misfit),
                 csv_num(it.grad)});
    csv.close();

    const PenaltySpec p = make_penalty(s.geom, res.alpha_final);
    const InversionResult cert = truncate_and_certify(res.m_hat, res.wavelet, s, syn.d, p);

    std::ofstream out(detail::out_path(cfg, "result.txt"), std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: result.txt");
    out << "m_hat = " << csv_num(res.m_hat) << '\n'
        << "m_error = " << csv_num(std::abs(res.m_hat - s.m_star)) << '\n'
        << "alpha_final = " << csv_num(res.alpha_final) << '\n'
        << "relative_residual = " << csv_num(res.relative_residual) << '\n'
        << "converged = " << csv_bool(res.converged) << '\n'
        << "message = " << res.message << '\n'
        << "truncated_residual = " << csv_num(cert.relative_residual) << '\n'
        << "certified = " << csv_bool(cert.certified) << '\n'
        << "epsilon_sufficient = " << csv_num(cert.epsilon_sufficient) << '\n';
    out.close();

    if (!std::isfinite(res.m_hat) || !std::isfinite(res.relative_residual))
        throw numerical_error("inversion produced non-finite results");
    return res.converged ? 0 : 2;
}

inline int run_noise_study(const RunConfig& cfg) {
    const Scenario base = validate_config(cfg);
    const std::vector<double> etas = parse_double_list(cfg.eta_list);
    const std::vector<unsigned long long> seeds = parse_seed_list(cfg.noise_seeds);
    const std::vector<double> m_grid = make_m_grid(cfg);
    const double mu = base.w_star.support_radius;

    CsvWriter csv(detail::out_path(cfg, "noise_study.csv"));
    csv.row({"seed", "eta", "m_root", "bound_49", "within_bound"});
    for (double eta : etas) {
        const CalibratedPenalty cal = calibrate_noise_penalty(eta, mu, base.geom.r);
        Scenario s = base;
        s.lambda = cal.lambda;
        s.noise.eta = eta;
        const PenaltySpec p = make_penalty(s.geom, cal.alpha);
        const double bound = eq49_bound(eta, mu, base.geom.r);
        for (unsigned long long seed : seeds) {
            s.noise.seed = seed;
            const SynthesizedData syn = synthesize_data(s);
            const BoundReport rep = evaluate_bounds(s, p, s.m_star);
            const BoundEntry* adm = rep.find("eq44_noise_admissible");
            if (adm == nullptr || !adm->satisfied)
                throw numerical_error("calibrated penalty fails the noise admissibility bound");
            const std::vector<StationaryPoint> roots =
                scan_stationary_points(syn.d, p, s.geom, m_grid, cfg.threads);
            if (roots.empty())
                throw numerical_error("no stationary point found for seed " + std::to_string(seed));
            for (const StationaryPoint& root : roots) {
                const bool within = std::abs(root.m_root - s.m_star) <= bound;
                csv.row({csv_num(static_cast<std::size_t>(seed)), csv_num(eta),
                         csv_num(root.m_root), csv_num(bound), csv_bool(within)});
            }
        }
    }
    csv.close();
    return 0;
}

inline int run_two_event(const RunConfig& cfg) {
    RunConfig local = cfg;
    local.noise_mode = "two-event";
    if (!(local.eta > 0.0)) local.eta = 1.0;  // the demo is about 100% noise
    const Scenario s = validate_config(local);
    const std::vector<double> m_grid = make_m_grid(local);
    const SynthesizedData syn = synthesize_data(s);
    const PenaltySpec p = make_penalty(s.geom, local.alpha);
    const std::vector<StationaryPoint> roots =
        scan_stationary_points(syn.d, p, s.geom, m_grid, local.threads);
    write_roots_csv(detail::out_path(local, "twoevent_roots.csv"), roots);
    return 0;
}

inline int run_bounds(const RunConfig& cfg) {
    const Scenario s = validate_config(cfg);
    const PenaltySpec p = make_penalty(s.geom, cfg.alpha);
    const BoundReport rep = evaluate_bounds(s, p, s.m_star);
    CsvWriter csv(detail::out_path(cfg, "bounds.csv"));
    csv.row({"name", "lhs", "rhs", "satisfied"});
    for (const BoundEntry& e : rep.entries)
        csv.row({e.name, csv_num(e.lhs), csv_num(e.rhs), csv_bool(e.satisfied)});
    csv.close();
    return 0;
}

inline int run_subcommand(const std::string& name, const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (name == "validate") return run_validate(cfg);
    if (name == "synth") return run_synth(cfg);
    if (name == "sweep-fwi") return run_sweep_fwi(cfg);
    if (name == "sweep-ext") return run_sweep_ext(cfg);
    if (name == "gradcheck") return run_gradcheck(cfg);
    if (name == "scan") return run_scan(cfg);
    if (name == "invert") return run_invert(cfg);
    if (name == "noise-study") return run_noise_study(cfg);
    if (name == "two-event") return run_two_event(cfg);
    if (name == "bounds") return run_bounds(cfg);
    throw std::invalid_argument("unknown subcommand: " + name);
}

}  // namespace traceinv
