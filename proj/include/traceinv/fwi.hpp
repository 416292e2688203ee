#pragma once

// Classic least-squares waveform misfit and its reduction over source pulses
// supported in [-lambda, lambda]. Because the forward map is a scaled shift,
// the reduction has a closed form: the best source copies the data restricted
// to the moveout window [m r - lambda, m r + lambda], and the reduced value is
//
//     e(m) = 1/2 * (1 - ||d restricted to the window||^2 / ||d||^2),
//
// which sits on the plateau value 1/2 as soon as the window misses the data.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "traceinv/forward.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/signal.hpp"

namespace traceinv {

struct FwiPoint {
    double m = 0.0;
    double value = 0.0;
    double best_wavelet_norm = 0.0;
};

inline void require_support_radius(const Geometry& g, double lambda) {
    if (!std::isfinite(lambda) || !(lambda > 0.0) || lambda > g.lambda_max + 1e-15)
        throw std::invalid_argument("support radius must lie in (0, lambda_max]");
}

inline double require_data_energy(const Trace& d) {
    const double dnorm2 = inner_product(d, d);
    if (!(dnorm2 > 0.0))
        throw std::invalid_argument("data trace must have positive norm");
    return dnorm2;
}

/// Relative misfit 1/2 ||F[m] w - d||^2 / ||d||^2 for a known pulse.
inline double fwi_misfit(double m, const AnalyticWavelet& w, const Trace& d, double lambda,
                         const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    require_support_radius(g, lambda);
    if (w.support_radius > lambda + 1e-15)
        throw std::invalid_argument("fwi_misfit: pulse support exceeds the allowed radius");
    if (!(d.grid == g.grid))
        throw std::invalid_argument("fwi_misfit: trace grid does not match the geometry");
    const double dnorm2 = require_data_energy(d);
    const double scale = spreading_factor(g);
    const double shift = m * g.r;
    const std::size_t n = g.grid.n;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double resid = scale * evaluate_wavelet(w, g.grid.time(k) - shift) - d.samples[k];
        acc += trapezoid_weight(k, n) * resid * resid;
    }
    return 0.5 * acc * g.grid.dt() / dnorm2;
}

struct FwiReduced {
    double value = 0.0;
    SampledWavelet w_opt;  // minimizing pulse, supported in [-lambda, lambda]
    double w_opt_norm = 0.0;
};

/// Misfit minimized over all pulses supported in [-lambda, lambda]. The
/// minimizer is w_opt(t) = 4 pi r * d(t + m r) on [-lambda, lambda], zero
/// outside; both it and the minimum come from a single pass over the data.
inline FwiReduced fwi_reduced(double m, const Trace& d, double lambda, const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    require_support_radius(g, lambda);
    if (!(d.grid == g.grid))
        throw std::invalid_argument("fwi_reduced: trace grid does not match the geometry");
    const double dnorm2 = require_data_energy(d);
    const std::size_t n = g.grid.n;
    const double dt = g.grid.dt();
    const double tol = window_tol(dt);
    const double shift = m * g.r;
    const double gain = 4.0 * kPi * g.r;

    FwiReduced out;
    out.w_opt = SampledWavelet{receive_window_lo(g, m), dt, std::vector<double>(n, 0.0)};
    double inside = 0.0;
    double wnorm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double tw = g.grid.time(k) - shift;  // pulse time of this node
        const double wgt = trapezoid_weight(k, n);
        if (std::abs(tw) <= lambda + tol) {
            const double dk = d.samples[k];
            inside += wgt * dk * dk;
            const double wk = gain * dk;
            out.w_opt.samples[k] = wk;
            wnorm2 += wgt * wk * wk;
        }
    }
    out.value = 0.5 * (1.0 - inside * dt / dnorm2);
    out.w_opt_norm = std::sqrt(wnorm2 * dt);
    return out;
}

/// Reduced misfit along a slowness sweep. Points are independent; each is
/// accumulated sequentially, so the result is identical for every thread
/// count.
inline std::vector<FwiPoint> fwi_landscape(const Trace& d, double lambda,
                                           const std::vector<double>& m_grid, const Geometry& g,
                                           unsigned threads = 1) {
    require_valid_geometry(g);
    require_support_radius(g, lambda);
    for (double m : m_grid) require_slowness(g, m);
    require_data_energy(d);
    std::vector<FwiPoint> out(m_grid.size());
    parallel_for(m_grid.size(), threads, [&](std::size_t i) {
        const FwiReduced red = fwi_reduced(m_grid[i], d, lambda, g);
        out[i] = FwiPoint{m_grid[i], red.value, red.w_opt_norm};
    });
    return out;
}

}  // namespace traceinv
