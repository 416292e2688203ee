#pragma once

// Transmission geometry and the forward/adjoint maps for a single receiver
// at distance r from the source. The forward map is a scaled time shift:
//
//     (F[m] w)(t) = w(t - m r) / (4 pi r),
//
// so its adjoint is the opposite shift restricted to the receiving window
// [t_min - m r, t_max - m r], and the normal operator F^T F is multiplication
// by the window indicator scaled by 1/(4 pi r)^2.

#include <cmath>
#include <stdexcept>

#include "traceinv/signal.hpp"

namespace traceinv {

/// Acquisition description: source-receiver distance r (km), admissible
/// slowness range [m_min, m_max] (s/km), largest admissible source support
/// radius lambda_max (s), and the recording grid.
struct Geometry {
    double r = 1.0;
    double m_min = 0.125;
    double m_max = 0.6;
    double lambda_max = 0.5;
    TimeGrid grid;
};

/// Outcome of the containment check: every admissible arrival window
/// [m r - lambda_max, m r + lambda_max] must land inside the recording
/// interval, which reduces to the two extreme slownesses.
struct GeometryReport {
    bool slowness_positive = false;
    bool window_contains = false;
    double required_lo = 0.0;   // m_min * r - lambda_max
    double required_hi = 0.0;   // m_max * r + lambda_max
    double available_lo = 0.0;  // t_min
    double available_hi = 0.0;  // t_max

    bool pass() const { return slowness_positive && window_contains; }
};

inline GeometryReport validate_geometry(const Geometry& g) {
    GeometryReport rep;
    rep.slowness_positive = std::isfinite(g.r) && g.r > 0.0 && std::isfinite(g.m_min) &&
                            g.m_min > 0.0 && g.m_min <= g.m_max && std::isfinite(g.m_max) &&
                            std::isfinite(g.lambda_max) && g.lambda_max > 0.0;
    rep.required_lo = g.m_min * g.r - g.lambda_max;
    rep.required_hi = g.m_max * g.r + g.lambda_max;
    rep.available_lo = g.grid.t_min;
    rep.available_hi = g.grid.t_max;
    rep.window_contains =
        rep.required_lo >= rep.available_lo && rep.required_hi <= rep.available_hi;
    return rep;
}

inline void require_valid_geometry(const Geometry& g) {
    if (!validate_geometry(g).pass())
        throw std::invalid_argument("geometry: containment condition violated");
}

/// Admissible slowness test. The closed endpoints are accepted (sweeps probe
/// them) with a tiny slop so lattice arithmetic cannot reject them.
inline bool slowness_in_range(const Geometry& g, double m) {
    if (!std::isfinite(m)) return false;
    const double slop = 1e-12 * std::max(1.0, std::abs(g.m_max));
    return m >= g.m_min - slop && m <= g.m_max + slop;
}

inline void require_slowness(const Geometry& g, double m) {
    if (!slowness_in_range(g, m))
        throw std::invalid_argument("slowness outside the admissible range");
}

/// 1 / (4 pi r), the spherical spreading factor and operator norm of F[m].
inline double spreading_factor(const Geometry& g) { return 1.0 / (4.0 * kPi * g.r); }

/// Window on which an adjoint image (or inner-problem solution) at slowness m
/// lives: [t_min - m r, t_max - m r].
inline double receive_window_lo(const Geometry& g, double m) { return g.grid.t_min - m * g.r; }
inline double receive_window_hi(const Geometry& g, double m) { return g.grid.t_max - m * g.r; }

/// Fixed wavelet-side domain covering the receive window of every admissible
/// slowness: [t_min - m_max r, t_max - m_min r].
inline double wavelet_domain_lo(const Geometry& g) { return g.grid.t_min - g.m_max * g.r; }
inline double wavelet_domain_hi(const Geometry& g) { return g.grid.t_max - g.m_min * g.r; }

inline Trace apply_forward(double m, const AnalyticWavelet& w, const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    const double scale = spreading_factor(g);
    const double shift = m * g.r;
    Trace out = make_trace(g.grid);
    for (std::size_t k = 0; k < g.grid.n; ++k)
        out.samples[k] = scale * evaluate_wavelet(w, g.grid.time(k) - shift);
    return out;
}

/// Forward map for a sampled source. Node-aligned shifts are evaluated
/// exactly; otherwise samples come from linear interpolation, which is
/// second-order accurate in dt.
inline Trace apply_forward_sampled(double m, const SampledWavelet& w, const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    const double scale = spreading_factor(g);
    const double shift = m * g.r;
    Trace out = make_trace(g.grid);
    for (std::size_t k = 0; k < g.grid.n; ++k)
        out.samples[k] = scale * sample_at(w, g.grid.time(k) - shift);
    return out;
}

/// Adjoint map: (F^T[m] g)(t) = g(t + m r) / (4 pi r) on the receive window,
/// zero outside. The output is sampled on that window at the data step, so
/// the shift lands on data nodes exactly.
inline SampledWavelet apply_adjoint(double m, const Trace& d, const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    if (!(d.grid == g.grid))
        throw std::invalid_argument("apply_adjoint: trace grid does not match the geometry");
    const double scale = spreading_factor(g);
    const double shift = m * g.r;
    SampledWavelet out{receive_window_lo(g, m), g.grid.dt(),
                       std::vector<double>(g.grid.n, 0.0)};
    for (std::size_t k = 0; k < out.size(); ++k)
        out.samples[k] = scale * trace_at(d, out.time(k) + shift);
    return out;
}

/// Normal operator F^T[m] F[m]: multiplication by the receive-window
/// indicator scaled by 1/(4 pi r)^2, applied on the wavelet's own nodes.
inline SampledWavelet apply_normal(double m, const SampledWavelet& w, const Geometry& g) {
    require_valid_geometry(g);
    require_slowness(g, m);
    const double lo = receive_window_lo(g, m);
    const double hi = receive_window_hi(g, m);
    const double tol = window_tol(w.dt);
    const double s2 = spreading_factor(g) * spreading_factor(g);
    SampledWavelet out = w;
    for (std::size_t k = 0; k < out.size(); ++k)
        out.samples[k] = in_closed(out.time(k), lo, hi, tol) ? s2 * w.samples[k] : 0.0;
    return out;
}

}  // namespace traceinv
