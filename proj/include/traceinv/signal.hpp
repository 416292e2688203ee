#pragma once

// Time grids, sampled traces, trapezoid quadrature, and compactly supported
// analytic source wavelets. Everything here is a small value type; all
// functions are pure and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace traceinv {

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform sampling of the recording interval [t_min, t_max].
/// Node k sits at t_min + k*dt with dt = (t_max - t_min) / (n - 1).
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 1.0;
    std::size_t n = 2;

    double dt() const { return (t_max - t_min) / static_cast<double>(n - 1); }
    double time(std::size_t k) const { return t_min + static_cast<double>(k) * dt(); }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
        return a.t_min == b.t_min && a.t_max == b.t_max && a.n == b.n;
    }
};

inline TimeGrid build_grid(double t_min, double t_max, std::size_t n) {
    if (!std::isfinite(t_min) || !std::isfinite(t_max))
        throw std::invalid_argument("build_grid: interval bounds must be finite");
    if (!(t_min < t_max))
        throw std::invalid_argument("build_grid: require t_min < t_max");
    if (n < 2)
        throw std::invalid_argument("build_grid: require at least two nodes");
    return TimeGrid{t_min, t_max, n};
}

/// Slop used when deciding whether a node lies inside a time window, so that
/// endpoints landing exactly on a node make the same in/out decision no
/// matter how the node time was rounded.
inline double window_tol(double dt) { return 1e-9 * dt; }

inline bool in_closed(double t, double lo, double hi, double tol) {
    return t >= lo - tol && t <= hi + tol;
}

/// A signal sampled on a TimeGrid.
struct Trace {
    TimeGrid grid;
    std::vector<double> samples;
};

inline Trace make_trace(const TimeGrid& g) {
    return Trace{g, std::vector<double>(g.n, 0.0)};
}

inline Trace make_trace(const TimeGrid& g, std::vector<double> samples) {
    if (samples.size() != g.n)
        throw std::invalid_argument("make_trace: sample count does not match the grid");
    for (double v : samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("make_trace: samples must be finite");
    return Trace{g, std::move(samples)};
}

inline double trapezoid_weight(std::size_t k, std::size_t n) {
    return (k == 0 || k + 1 == n) ? 0.5 : 1.0;
}

/// Trapezoid-rule L2 pairing dt * sum_k c_k u_k v_k with endpoint weights 1/2.
/// Accumulation runs in fixed ascending-index order so repeated evaluations
/// (and partitioned sweeps that call this per point) reproduce byte-identical
/// results.
inline double inner_product(const Trace& u, const Trace& v) {
    if (!(u.grid == v.grid))
        throw std::invalid_argument("inner_product: traces must share one grid");
    const std::size_t n = u.grid.n;
    const double dt = u.grid.dt();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += trapezoid_weight(k, n) * u.samples[k] * v.samples[k];
    return acc * dt;
}

inline double norm(const Trace& u) { return std::sqrt(inner_product(u, u)); }

enum class WaveletFamily { bump, modulated_bump };

/// Compactly supported source pulse with exact support [-mu, mu]:
///   bump:            amplitude * (1 - (t/mu)^2)^3
///   modulated_bump:  bump * cos(2 pi f t)
/// Both families are twice continuously differentiable on the whole line and
/// evaluate to a literal 0.0 outside the support.
struct AnalyticWavelet {
    WaveletFamily family = WaveletFamily::bump;
    double support_radius = 0.05;  // mu, seconds
    double modulation_freq = 0.0;  // Hz, only used by modulated_bump
    double amplitude = 1.0;
};

inline AnalyticWavelet make_bump(double mu, double amplitude = 1.0) {
    if (!std::isfinite(mu) || !(mu > 0.0))
        throw std::invalid_argument("make_bump: support radius must be positive");
    if (!std::isfinite(amplitude))
        throw std::invalid_argument("make_bump: amplitude must be finite");
    return AnalyticWavelet{WaveletFamily::bump, mu, 0.0, amplitude};
}

inline AnalyticWavelet make_modulated_bump(double mu, double freq, double amplitude = 1.0) {
    AnalyticWavelet w = make_bump(mu, amplitude);
    if (!std::isfinite(freq))
        throw std::invalid_argument("make_modulated_bump: frequency must be finite");
    w.family = WaveletFamily::modulated_bump;
    w.modulation_freq = freq;
    return w;
}

inline double evaluate_wavelet(const AnalyticWavelet& w, double t) {
    const double mu = w.support_radius;
    if (std::abs(t) > mu) return 0.0;  // exact compact support
    const double u = t / mu;
    const double q = 1.0 - u * u;
    double value = w.amplitude * q * q * q;
    if (w.family == WaveletFamily::modulated_bump)
        value *= std::cos(2.0 * kPi * w.modulation_freq * t);
    return value;
}

/// A source estimate sampled uniformly starting at `offset` (may be
/// negative). The represented function is zero outside the sampled window,
/// so the window must contain the support of whatever it discretizes.
struct SampledWavelet {
    double offset = 0.0;  // time of the first sample, seconds
    double dt = 0.0;
    std::vector<double> samples;

    std::size_t size() const { return samples.size(); }
    double time(std::size_t k) const { return offset + static_cast<double>(k) * dt; }
};

/// Linear interpolation into a uniformly sampled series that vanishes
/// outside its window. Queries within 1e-9*dt of a node return that node's
/// value exactly, so grid-aligned shifts are bit-exact instead of picking up
/// interpolation roundoff.
inline double sample_series(const std::vector<double>& v, double offset, double dt, double t) {
    if (v.empty() || !(dt > 0.0)) return 0.0;
    const double x = (t - offset) / dt;
    const double snapped = std::round(x);
    if (std::abs(x - snapped) < 1e-9 && snapped >= 0.0 &&
        snapped < static_cast<double>(v.size()))
        return v[static_cast<std::size_t>(snapped)];
    if (x <= -1.0 || x >= static_cast<double>(v.size())) return 0.0;
    const double fl = std::floor(x);
    const long i = static_cast<long>(fl);
    const double theta = x - fl;
    const double lo = (i >= 0 && i < static_cast<long>(v.size())) ? v[i] : 0.0;
    const double hi = (i + 1 >= 0 && i + 1 < static_cast<long>(v.size())) ? v[i + 1] : 0.0;
    return (1.0 - theta) * lo + theta * hi;
}

inline double sample_at(const SampledWavelet& w, double t) {
    return sample_series(w.samples, w.offset, w.dt, t);
}

inline double trace_at(const Trace& d, double t) {
    return sample_series(d.samples, d.grid.t_min, d.grid.dt(), t);
}

inline SampledWavelet sample_wavelet(const AnalyticWavelet& w, double offset, double dt,
                                     std::size_t count) {
    if (!(dt > 0.0) || count < 2)
        throw std::invalid_argument("sample_wavelet: need a positive step and two samples");
    SampledWavelet out{offset, dt, std::vector<double>(count, 0.0)};
    for (std::size_t k = 0; k < count; ++k)
        out.samples[k] = evaluate_wavelet(w, out.time(k));
    return out;
}

inline double wavelet_inner(const SampledWavelet& a, const SampledWavelet& b) {
    if (a.size() != b.size() || a.dt != b.dt || std::abs(a.offset - b.offset) > window_tol(a.dt))
        throw std::invalid_argument("wavelet_inner: wavelets must share one sampling window");
    const std::size_t n = a.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += trapezoid_weight(k, n) * a.samples[k] * b.samples[k];
    return acc * a.dt;
}

inline double wavelet_norm(const SampledWavelet& w) { return std::sqrt(wavelet_inner(w, w)); }

}  // namespace traceinv
