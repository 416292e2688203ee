#pragma once

// Scenario assembly, noisy-data synthesis, stationary-point location,
// discrepancy-driven adjustment of the penalty weight, support truncation
// with certification, and a numerical audit of the localization bounds that
// justify all of it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "traceinv/extended.hpp"
#include "traceinv/forward.hpp"
#include "traceinv/fwi.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/signal.hpp"

namespace traceinv {

enum class NoiseMode { white, source_filtered, two_event };

/// Additive-noise recipe. eta is the relative level ||n|| / ||d*||; the
/// generated trace is rescaled after the fact so this holds to roundoff.
/// two_event ignores the generator and uses the second arrival F[m_b] w*.
struct NoiseSpec {
    double eta = 0.0;
    unsigned long long seed = 0;
    NoiseMode mode = NoiseMode::white;
    double m_b = 0.0;  // slowness of the interfering event (two_event only)
};

/// Everything a single experiment needs: the acquisition geometry, the true
/// slowness/pulse pair that generates the data, the support radius lambda
/// granted to the inversion, the target relative error, and the noise.
struct Scenario {
    Geometry geom;
    double m_star = 0.4;
    AnalyticWavelet w_star;
    double lambda = 0.05;
    double epsilon = 0.01;
    NoiseSpec noise;
};

inline void require_valid_scenario(const Scenario& s) {
    require_valid_geometry(s.geom);
    require_slowness(s.geom, s.m_star);
    const double mu = s.w_star.support_radius;
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("scenario: pulse support radius must be positive");
    if (!(s.lambda >= mu - 1e-15))
        throw std::invalid_argument("scenario: inversion support radius must cover the pulse");
    if (!(s.lambda <= s.geom.lambda_max + 1e-15))
        throw std::invalid_argument("scenario: inversion support radius exceeds lambda_max");
    if (!(s.epsilon >= 0.0) || !(s.epsilon < 1.0))
        throw std::invalid_argument("scenario: target relative error must lie in [0, 1)");
    if (!(s.noise.eta >= 0.0) || !std::isfinite(s.noise.eta))
        throw std::invalid_argument("scenario: relative noise level must be non-negative");
    if (s.noise.mode == NoiseMode::two_event && s.noise.eta > 0.0)
        require_slowness(s.geom, s.noise.m_b);
}

struct SynthesizedData {
    Trace d;       // what the inversion sees
    Trace d_star;  // noise-free part
    Trace n;       // additive noise, rescaled to ||n|| = eta ||d_star||
};

/// Deterministic per (seed, mode, grid): the generator sequence depends on
/// nothing else, and rescaling is a single multiplication.
inline SynthesizedData synthesize_data(const Scenario& s) {
    require_valid_scenario(s);
    SynthesizedData out;
    out.d_star = apply_forward(s.m_star, s.w_star, s.geom);
    out.n = make_trace(s.geom.grid);
    if (s.noise.eta > 0.0) {
        if (s.noise.mode == NoiseMode::two_event) {
            out.n = apply_forward(s.noise.m_b, s.w_star, s.geom);
        } else {
            std::mt19937_64 rng(s.noise.seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::vector<double> white(s.geom.grid.n);
            for (double& v : white) v = gauss(rng);
            if (s.noise.mode == NoiseMode::white) {
                out.n.samples = white;
            } else {
                // Same spectrum as the source: convolve with the sampled
                // pulse (zero-padded), then rescale like every other mode.
                const double dt = s.geom.grid.dt();
                const double mu = s.w_star.support_radius;
                const std::size_t half = static_cast<std::size_t>(std::ceil(mu / dt - 1e-9));
                const std::size_t klen = 2 * half + 1;
                std::vector<double> kernel(klen);
                for (std::size_t j = 0; j < klen; ++j)
                    kernel[j] = evaluate_wavelet(
                        s.w_star, (static_cast<double>(j) - static_cast<double>(half)) * dt);
                const std::size_t n = white.size();
                for (std::size_t k = 0; k < n; ++k) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < klen; ++j) {
                        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(k) +
                                                   static_cast<std::ptrdiff_t>(half) -
                                                   static_cast<std::ptrdiff_t>(j);
                        if (src >= 0 && src < static_cast<std::ptrdiff_t>(n))
                            acc += kernel[j] * white[static_cast<std::size_t>(src)];
                    }
                    out.n.samples[k] = acc * dt;
                }
            }
        }
        const double raw = norm(out.n);
        if (!(raw > 0.0))
            throw std::runtime_error("synthesize_data: generated noise has zero norm");
        const double gain = s.noise.eta * norm(out.d_star) / raw;
        for (double& v : out.n.samples) v *= gain;
    }
    out.d = make_trace(s.geom.grid);
    for (std::size_t k = 0; k < s.geom.grid.n; ++k)
        out.d.samples[k] = out.d_star.samples[k] + out.n.samples[k];
    return out;
}

struct StationaryPoint {
    double m_root = 0.0;
    double grad_at_root = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Grid scan of the reduced gradient followed by bisection on each sign
/// change. The outer variable is one-dimensional and the gradient is
/// analytic, so sign changes are the honest primitive: no roots are invented
/// where the gradient keeps its sign, none are missed at the scan scale.
inline std::vector<StationaryPoint> scan_stationary_points(const Trace& d, const PenaltySpec& p,
                                                           const Geometry& g,
                                                           const std::vector<double>& m_grid,
                                                           std::size_t threads = 1) {
    require_valid_geometry(g);
    if (!(p.alpha > 0.0))
        throw std::invalid_argument("scan_stationary_points: penalty weight must be positive");
    if (m_grid.size() < 3)
        throw std::invalid_argument("scan_stationary_points: need at least 3 grid points");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        require_slowness(g, m_grid[i]);
        if (i > 0 && !(m_grid[i] > m_grid[i - 1]))
            throw std::invalid_argument("scan_stationary_points: grid must increase strictly");
    }

    std::vector<double> grad(m_grid.size());
    parallel_for(m_grid.size(), threads,
                 [&](std::size_t i) { grad[i] = reduced_gradient(m_grid[i], d, p, g); });

    const auto bisect = [&](double lo, double hi, double glo) {
        while (hi - lo > 1e-8) {
            const double mid = 0.5 * (lo + hi);
            const double gm = reduced_gradient(mid, d, p, g);
            if (gm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((gm > 0.0) == (glo > 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        StationaryPoint root;
        root.bracket_lo = lo;
        root.bracket_hi = hi;
        root.m_root = 0.5 * (lo + hi);
        root.grad_at_root = reduced_gradient(root.m_root, d, p, g);
        return root;
    };

    std::vector<StationaryPoint> out;
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (grad[i] == 0.0) {
            StationaryPoint root;
            root.m_root = root.bracket_lo = root.bracket_hi = m_grid[i];
            root.grad_at_root = 0.0;
            out.push_back(root);
            continue;
        }
        if (i + 1 < m_grid.size() && grad[i + 1] != 0.0 && (grad[i] > 0.0) != (grad[i + 1] > 0.0))
            out.push_back(bisect(m_grid[i], m_grid[i + 1], grad[i]));
    }
    return out;
}

struct IterationRecord {
    std::size_t iter = 0;
    double m = 0.0;
    double alpha = 0.0;
    double misfit = 0.0;  // misfit term of the reduced objective, relative units
    double grad = 0.0;
};

struct InversionResult {
    double m_hat = 0.0;
    double alpha_final = 0.0;
    SampledWavelet wavelet;
    double relative_residual = 0.0;  // ||F w - d|| / ||d||
    std::vector<IterationRecord> iterations;
    bool certified = false;
    bool converged = false;
    double epsilon_sufficient = 0.0;  // smallest target the truncation argument certifies
    std::string message;
};

struct InvertOptions {
    std::size_t max_outer = 60;
    double gtol = 1e-10;            // stationarity tolerance on the reduced gradient
    double dtol = 0.05;             // relative tolerance on misfit vs the target
    double alpha_min = 1e-8;        // floor for the penalty weight
    double trust_radius = 0.05;     // initial slowness step, s/km
    double overshoot_slack = 0.25;  // cap: misfit may exceed the target by this fraction
    double m0 = std::numeric_limits<double>::quiet_NaN();  // start slowness; NaN = mid-range
};

namespace detail {

/// One slowness descent at fixed penalty: walk downhill doubling the step
/// until the gradient changes sign, then bisect the bracket to width 1e-12.
/// A gradient pushing outward at a range endpoint leaves m pinned there.
inline double descend_slowness(const Trace& d, const PenaltySpec& p, const Geometry& g, double m,
                               double gtol, double trust_radius) {
    double radius = std::min(trust_radius, g.m_max - g.m_min);
    double gm = reduced_gradient(m, d, p, g);
    for (int step = 0; step < 64; ++step) {
        if (std::abs(gm) <= gtol) return m;
        const double dir = gm > 0.0 ? -1.0 : 1.0;
        const double cand = std::clamp(m + dir * radius, g.m_min, g.m_max);
        if (cand == m) return m;  // pinned at the boundary
        const double gc = reduced_gradient(cand, d, p, g);
        if (gc == 0.0) return cand;
        if ((gm > 0.0) != (gc > 0.0)) {
            double lo = std::min(m, cand), hi = std::max(m, cand);
            double glo = (lo == m) ? gm : gc;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double gmid = reduced_gradient(mid, d, p, g);
                if (gmid == 0.0) return mid;
                if ((gmid > 0.0) == (glo > 0.0)) {
                    lo = mid;
                    glo = gmid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        m = cand;
        gm = gc;
        radius = std::min(2.0 * radius, g.m_max - g.m_min);
    }
    return m;
}

}  // namespace detail

/// Discrepancy-driven inversion: alternate a slowness descent at fixed
/// penalty weight with a secant update of log(alpha) that steers the misfit
/// term onto the target 1/2 epsilon^2. The misfit grows like alpha^4 at
/// small alpha, so the first update assumes slope 4 in log-log; later
/// updates use the measured secant slope. Increases of alpha are capped so
/// the misfit never exceeds the target by more than the configured slack.
/// Non-convergence is reported in the result, not thrown.
inline InversionResult invert_discrepancy(const Trace& d, const Scenario& s, double alpha0,
                                          const InvertOptions& opts = {}) {
    require_valid_scenario(s);
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
        throw std::invalid_argument("invert_discrepancy: initial penalty weight must be positive");
    if (!(s.epsilon > 0.0))
        throw std::invalid_argument("invert_discrepancy: target relative error must be positive");
    if (!(d.grid == s.geom.grid))
        throw std::invalid_argument("invert_discrepancy: trace grid does not match the geometry");
    const Geometry& g = s.geom;

    double m = std::isnan(opts.m0) ? 0.5 * (g.m_min + g.m_max) : opts.m0;
    require_slowness(g, m);
    double alpha = std::max(alpha0, opts.alpha_min);
    const double target = 0.5 * s.epsilon * s.epsilon;

    InversionResult out;
    bool have_prev = false;
    double prev_log_alpha = 0.0, prev_log_mis = 0.0;

    for (std::size_t outer = 1; outer <= opts.max_outer; ++outer) {
        const PenaltySpec p = make_penalty(g, alpha);
        m = detail::descend_slowness(d, p, g, m, opts.gtol, opts.trust_radius);
        const double mis = reduced_objective(m, d, p, g).misfit_term;
        const double grad = reduced_gradient(m, d, p, g);
        out.iterations.push_back(IterationRecord{outer, m, alpha, mis, grad});

        const bool stationary = std::abs(grad) <= opts.gtol;
        if (stationary && std::abs(mis - target) <= opts.dtol * target) {
            out.converged = true;
            out.message = "stationary point at the discrepancy target";
            break;
        }
        if (!(mis > 0.0) || !std::isfinite(mis)) {
            // degenerate fit; push the weight up and try again
            alpha = std::min(alpha * 10.0, 1e6);
            have_prev = false;
            continue;
        }

        const double log_alpha = std::log(alpha);
        const double log_mis = std::log(mis);
        double slope = 4.0;
        if (have_prev && log_alpha != prev_log_alpha) {
            const double sec = (log_mis - prev_log_mis) / (log_alpha - prev_log_alpha);
            if (std::isfinite(sec) && sec > 1e-3) slope = sec;
        }
        prev_log_alpha = log_alpha;
        prev_log_mis = log_mis;
        have_prev = true;

        double next = std::exp(log_alpha + (std::log(target) - log_mis) / slope);
        next = std::clamp(next, alpha / 100.0, alpha * 100.0);
        next = std::max(next, opts.alpha_min);
        for (int back = 0; back < 60 && next > alpha; ++back) {
            const double probe =
                reduced_objective(m, d, make_penalty(g, next), g).misfit_term;
            if (probe <= target * (1.0 + opts.overshoot_slack)) break;
            next = std::sqrt(next * alpha);
        }
        if (next == alpha && alpha <= opts.alpha_min) {
            out.converged = stationary;
            out.message = "penalty weight floor reached before the discrepancy target";
            break;
        }
        alpha = next;
    }
    if (out.message.empty()) out.message = "outer iteration limit reached";

    const PenaltySpec p = make_penalty(g, alpha);
    out.m_hat = m;
    out.alpha_final = alpha;
    out.wavelet = solve_source_closed(m, d, p, g);
    out.relative_residual = std::sqrt(2.0 * reduced_objective(m, d, p, g).misfit_term);
    return out;
}

/// Success threshold the truncation argument guarantees: the damping of the
/// retained window plus the noise that truncation cannot remove.
inline double eq52_rhs(double alpha, double lambda, double r, double eta) {
    const double u = 8.0 * kPi * r * alpha * lambda;
    return (u * u) / (1.0 + u * u) + eta;
}

/// Zero the source outside [-lambda, lambda], recompute the data residual of
/// the truncated pair from scratch through the forward map, and certify
/// against the scenario target. The penalty spec rides along because the
/// sufficient threshold reported next to the verdict depends on its weight.
inline InversionResult truncate_and_certify(double m_hat, const SampledWavelet& w,
                                            const Scenario& s, const Trace& d,
                                            const PenaltySpec& p) {
    require_valid_scenario(s);
    require_slowness(s.geom, m_hat);
    if (!(d.grid == s.geom.grid))
        throw std::invalid_argument("truncate_and_certify: trace grid does not match the geometry");
    if (w.size() == 0 || !(w.dt > 0.0))
        throw std::invalid_argument("truncate_and_certify: source estimate is empty");

    InversionResult out;
    out.m_hat = m_hat;
    out.alpha_final = p.alpha;
    out.wavelet = w;
    const double tol = window_tol(w.dt);
    for (std::size_t k = 0; k < w.size(); ++k)
        if (!in_closed(w.time(k), -s.lambda, s.lambda, tol)) out.wavelet.samples[k] = 0.0;

    const Trace predicted = apply_forward_sampled(m_hat, out.wavelet, s.geom);
    const double dnorm = norm(d);
    if (!(dnorm > 0.0))
        throw std::invalid_argument("truncate_and_certify: data trace must have positive norm");
    Trace resid = make_trace(s.geom.grid);
    for (std::size_t k = 0; k < resid.samples.size(); ++k)
        resid.samples[k] = predicted.samples[k] - d.samples[k];
    out.relative_residual = norm(resid) / dnorm;
    out.certified = out.relative_residual <= s.epsilon;
    out.converged = true;
    out.epsilon_sufficient = eq52_rhs(p.alpha, s.lambda, s.geom.r, s.noise.eta);
    out.message = out.certified ? "truncated source meets the target residual"
                                : "truncated source exceeds the target residual";
    return out;
}

// ---------------------------------------------------------------------------
// Localization bounds, evaluated as arithmetic on the scenario numbers.

/// Largest relative noise level for which the slowness error bound below can
/// hold at all: the positive root of eta (1 + eta) = 1.
inline double eq48_threshold() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// Slowness error bound under noise; grows from mu/r like (1 + 2 eta) mu/r.
inline double eq49_bound(double eta, double mu, double r) {
    const double q = eta * (1.0 + eta);
    if (!(q < 1.0)) return std::numeric_limits<double>::max();
    return (1.0 + 2.0 * q / (1.0 - q)) * mu / r;
}

/// Smallest truncation radius for which the certification argument closes.
inline double eq51_lower(double eta, double mu) {
    const double q = eta * (1.0 + eta);
    if (!(q < 1.0)) return std::numeric_limits<double>::max();
    return (2.0 + 2.0 * q / (1.0 - q)) * mu;
}

/// Smallest relative error the noise-free truncation argument certifies.
inline double eq40_rhs(double alpha, double mu, double r) {
    const double u = 8.0 * kPi * r * alpha * mu;
    return (u * u) / (1.0 + u * u);
}

/// Gradient floor outside the lambda/r band around the true slowness.
inline double eq38_floor(double alpha, double mu, double lambda, double r) {
    const double b2 = (4.0 * kPi * r * alpha) * (4.0 * kPi * r * alpha);
    const double denom = 1.0 + b2 * (lambda + mu) * (lambda + mu);
    return r * b2 * (lambda - mu) / (denom * denom);
}

/// Slowness error bound with the penalty weight visible (noise over alpha).
inline double eq47_rhs(double eta, double alpha, double mu, double lambda_max, double r) {
    const double u = 8.0 * kPi * r * alpha * lambda_max;
    const double grow = (1.0 + u * u) * (1.0 + u * u);
    return mu / r + (eta / alpha) * (3.0 * std::sqrt(3.0) * (1.0 + eta) / (64.0 * kPi * r * r)) * grow;
}

/// Kernel of the quadratic form whose size controls how much noise can move
/// the reduced gradient.
inline double noise_kernel(double t, double m, double alpha, const Geometry& g) {
    const double beta = 4.0 * kPi * g.r * alpha;
    const double u = t - m * g.r;
    const double denom = 1.0 + beta * u * (beta * u);
    return -(beta * beta) * u / (denom * denom);
}

/// Closed form of max_t |noise_kernel|, attained at |t - m r| = 1/(sqrt(3) beta).
inline double noise_kernel_peak(double alpha, double r) {
    return (3.0 * std::sqrt(3.0) / 16.0) * 4.0 * kPi * r * alpha;
}

/// Grid maximization of the same quantity: coarse scan of the positive lobe
/// followed by golden-section refinement. Cross-checks the closed form.
inline double noise_kernel_peak_grid(double m, double alpha, const Geometry& g) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("noise_kernel_peak_grid: penalty weight must be positive");
    const double beta = 4.0 * kPi * g.r * alpha;
    const auto lobe = [&](double u) {
        const double denom = 1.0 + beta * u * (beta * u);
        return beta * beta * u / (denom * denom);
    };
    const double u_hi = 10.0 / beta;
    const std::size_t count = 20001;
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double u = u_hi * static_cast<double>(i) / static_cast<double>(count - 1);
        const double v = lobe(u);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double step = u_hi / static_cast<double>(count - 1);
    double lo = best_i > 0 ? (static_cast<double>(best_i) - 1.0) * step : 0.0;
    double hi = std::min(u_hi, (static_cast<double>(best_i) + 1.0) * step);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = lobe(x1), f2 = lobe(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * u_hi; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = lobe(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = lobe(x1);
        }
    }
    return std::max(std::abs(noise_kernel(m * g.r + 0.5 * (lo + hi), m, alpha, g)), best);
}

/// Penalty calibration from the error-bound machinery: given a noise level,
/// pick the analysis radius at margin times its critical value and the
/// weight at the exact maximizer of the admissibility curve, so the
/// admissibility inequality holds with slack and the noise bound applies.
struct CalibratedPenalty {
    double lambda = 0.0;
    double alpha = 0.0;
    double delta = 0.0;  // lambda/mu - 1
    double q = 0.0;      // eta (1 + eta)
};

inline CalibratedPenalty calibrate_noise_penalty(double eta, double mu, double r,
                                                 double margin = 1.02) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("calibrate_noise_penalty: noise level must be non-negative");
    if (!(mu > 0.0) || !(r > 0.0))
        throw std::invalid_argument("calibrate_noise_penalty: mu and r must be positive");
    if (!(margin >= 1.0))
        throw std::invalid_argument("calibrate_noise_penalty: margin must be at least 1");
    CalibratedPenalty out;
    out.q = eta * (1.0 + eta);
    if (!(out.q < 1.0))
        throw std::invalid_argument(
            "calibrate_noise_penalty: noise level at or above the admissible threshold");
    out.delta = margin * 2.0 * out.q / (1.0 - out.q);
    out.lambda = (1.0 + out.delta) * mu;
    const double x = 1.0 / (std::sqrt(3.0) * (2.0 + out.delta));
    out.alpha = x / (4.0 * kPi * r * mu);
    return out;
}

struct BoundEntry {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct BoundReport {
    std::vector<BoundEntry> entries;
    // analysis variables behind the admissibility curve
    double delta = 0.0;     // lambda/mu - 1
    double x = 0.0;         // 4 pi r alpha mu
    double c_factor = 0.0;  // 2 + delta
    double d_factor = 0.0;  // 16 delta / (3 sqrt(3))

    const BoundEntry* find(const std::string& name) const {
        for (const BoundEntry& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

/// Evaluate both sides of every localization inequality at the scenario
/// numbers and a candidate slowness. Pure arithmetic (plus one grid
/// maximization used as a cross-check); no simulation. Non-finite values are
/// clamped to the largest finite double so the report stays printable.
inline BoundReport evaluate_bounds(const Scenario& s, const PenaltySpec& p, double m_hat) {
    require_valid_scenario(s);
    require_slowness(s.geom, m_hat);
    const Geometry& g = s.geom;
    const double mu = s.w_star.support_radius;
    const double lambda = s.lambda;
    const double eta = s.noise.eta;
    const double alpha = p.alpha;
    const double err = std::abs(m_hat - s.m_star);
    const double beta = 4.0 * kPi * g.r * alpha;
    const double q = eta * (1.0 + eta);

    const auto finite = [](double v) {
        if (std::isnan(v)) return std::numeric_limits<double>::max();
        if (!std::isfinite(v)) return std::copysign(std::numeric_limits<double>::max(), v);
        return v;
    };

    BoundReport out;
    out.delta = lambda / mu - 1.0;
    out.x = 4.0 * kPi * g.r * alpha * mu;
    out.c_factor = 2.0 + out.delta;
    out.d_factor = 16.0 * out.delta / (3.0 * std::sqrt(3.0));

    const auto push = [&](const std::string& name, double lhs, double rhs, bool ok) {
        out.entries.push_back(BoundEntry{name, finite(lhs), finite(rhs), ok});
    };

    // Gradient floor away from the true slowness, checked on the noise-free
    // gradient; vacuous when the candidate sits inside the lambda/r band.
    {
        const double lhs =
            std::abs(noise_free_objective(m_hat, s.w_star, s.m_star, p, g).gradient);
        const double rhs = eq38_floor(alpha, mu, lambda, g.r);
        const bool outside = err * g.r > lambda;
        push("eq38_gradient_floor", lhs, rhs, !outside || lhs > rhs);
    }
    // Noise-free certification floor on the target relative error.
    {
        const double rhs = eq40_rhs(alpha, mu, g.r);
        push("eq40_epsilon_floor", s.epsilon, rhs, s.epsilon >= rhs);
    }
    // Noise admissibility as printed ...
    {
        const double denom = 1.0 + beta * (lambda + mu) * (beta * (lambda + mu));
        const double rhs = (16.0 / (3.0 * std::sqrt(3.0))) * beta * (lambda - mu) / (denom * denom);
        push("eq44_noise_admissible", q, rhs, q <= rhs);
    }
    // ... and the same inequality as the proof assembles it from the kernel
    // peak and the gradient floor; the two verdicts must agree.
    {
        const double lhs = (3.0 * std::sqrt(3.0) / 16.0) * beta * q;
        const double rhs = eq38_floor(alpha, mu, lambda, g.r) / g.r;
        push("eq44_proof_chain", lhs, rhs, lhs <= rhs);
    }
    // Error bound in units of the analysis radius.
    push("eq45_lambda_bound", err, lambda / g.r, err <= lambda / g.r);
    // Error bound with the penalty weight explicit.
    {
        const double rhs = eq47_rhs(eta, alpha, mu, g.lambda_max, g.r);
        push("eq47_corollary_bound", err, rhs, err <= rhs);
    }
    // Largest admissible relative noise level.
    push("eq48_threshold", eta, eq48_threshold(), eta < eq48_threshold());
    // Error bound in units of the pulse radius, noise-inflated.
    {
        const double rhs = eq49_bound(eta, mu, g.r);
        push("eq49_noise_bound", err, rhs, err <= rhs);
    }
    // Truncation radius large enough for certification.
    {
        const double lhs = eq51_lower(eta, mu);
        push("eq51_lambda_lower", lhs, lambda, lhs <= lambda);
    }
    // Residual threshold the truncation argument guarantees.
    {
        const double rhs = eq52_rhs(alpha, lambda, g.r, eta);
        push("eq52_epsilon_sufficient", s.epsilon, rhs, s.epsilon >= rhs);
    }
    // Kernel peak: grid maximization against the closed form.
    {
        const double lhs = noise_kernel_peak_grid(m_hat, alpha, g);
        const double rhs = noise_kernel_peak(alpha, g.r);
        push("bmax_closed_form", lhs, rhs, std::abs(lhs - rhs) <= 1e-6 * rhs);
    }
    return out;
}

}  // namespace traceinv
