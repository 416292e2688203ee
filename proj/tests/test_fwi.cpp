#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "traceinv/forward.hpp"
#include "traceinv/fwi.hpp"
#include "traceinv/signal.hpp"

namespace {

using namespace traceinv;

Geometry default_geometry() {
    Geometry g;
    g.grid = build_grid(-0.5, 1.5, 4001);
    return g;
}

// relative misfit of an arbitrary sampled pulse, recomputed from scratch
// through the forward map: 1/2 ||F w - d||^2 / ||d||^2
double misfit_of(double m, const SampledWavelet& w, const Trace& d, const Geometry& g) {
    const Trace fw = apply_forward_sampled(m, w, g);
    Trace resid = make_trace(g.grid);
    for (std::size_t k = 0; k < g.grid.n; ++k)
        resid.samples[k] = fw.samples[k] - d.samples[k];
    return 0.5 * inner_product(resid, resid) / inner_product(d, d);
}

}  // namespace

TEST_CASE("reduced objective vanishes at the true slowness", "[fwi]") {
    const Geometry g = default_geometry();
    const AnalyticWavelet w = make_bump(0.05);
    const Trace d = apply_forward(0.4, w, g);
    const FwiReduced at_truth = fwi_reduced(0.4, d, 0.05, g);
    CHECK(std::abs(at_truth.value) <= 1e-15);
    // the minimizer recovers the true pulse where the data lives
    const double gain = 4.0 * kPi * g.r;
    CHECK(std::abs(sample_at(at_truth.w_opt, 0.0) -
                   gain * spreading_factor(g) * evaluate_wavelet(w, 0.0)) <= 1e-12);
}

TEST_CASE("reduced objective sits exactly on the plateau once windows separate",
          "[fwi]") {
    const Geometry g = default_geometry();
    const AnalyticWavelet w = make_bump(0.05);
    const Trace d = apply_forward(0.4, w, g);
    // window [m r - lambda, m r + lambda] misses the data support entirely
    // once |m - 0.4| r > 2 lambda = 0.1
    for (double m : {0.15, 0.25, 0.55, 0.6}) {
        const FwiReduced far = fwi_reduced(m, d, 0.05, g);
        CHECK(far.value == 0.5);
        CHECK(far.w_opt_norm == 0.0);
    }
}

TEST_CASE("reduction minimizes over windowed pulses", "[fwi]") {
    const Geometry g = default_geometry();
    Trace d = make_trace(g.grid);
    // broadband deterministic data so the window restriction matters
    for (std::size_t k = 0; k < g.grid.n; ++k) {
        const double t = g.grid.time(k);
        d.samples[k] = std::exp(-8.0 * t * t) * std::cos(11.0 * t) + 0.05;
    }
    const double m = 0.3;  // 0.3 / 5e-4 * 1 = 600 dt: aligned
    const double lambda = 0.05;
    const FwiReduced red = fwi_reduced(m, d, lambda, g);

    // the reported value agrees with pushing the minimizer through the
    // forward map from scratch
    CHECK(std::abs(red.value - misfit_of(m, red.w_opt, d, g)) <= 1e-12);

    // perturbing the minimizer inside the window can only increase the misfit
    const double tol = window_tol(g.grid.dt());
    for (double scale : {1e-3, -1e-3, 0.3, -0.3}) {
        SampledWavelet probe = red.w_opt;
        for (std::size_t k = 0; k < probe.size(); ++k) {
            const double t = probe.time(k);
            if (in_closed(t, -lambda, lambda, tol))
                probe.samples[k] += scale * std::cos(40.0 * t);
        }
        CHECK(misfit_of(m, probe, d, g) >= red.value - 1e-15);
    }
}

TEST_CASE("known-pulse misfit is zero for the generating pulse", "[fwi]") {
    const Geometry g = default_geometry();
    const AnalyticWavelet w = make_bump(0.05, 0.8);
    const Trace d = apply_forward(0.4, w, g);
    CHECK(fwi_misfit(0.4, w, d, 0.05, g) == 0.0);
    CHECK(fwi_misfit(0.55, w, d, 0.05, g) > 0.4);
}

TEST_CASE("landscape sweep equals pointwise evaluation for any thread count",
          "[fwi]") {
    const Geometry g = default_geometry();
    const Trace d = apply_forward(0.4, make_bump(0.05), g);
    std::vector<double> m_grid;
    for (double m = 0.15; m <= 0.56; m += 0.05) m_grid.push_back(m);

    const std::vector<FwiPoint> seq = fwi_landscape(d, 0.05, m_grid, g, 1);
    const std::vector<FwiPoint> par = fwi_landscape(d, 0.05, m_grid, g, 3);
    REQUIRE(seq.size() == m_grid.size());
    REQUIRE(par.size() == m_grid.size());
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        const FwiReduced one = fwi_reduced(m_grid[i], d, 0.05, g);
        CHECK(seq[i].m == m_grid[i]);
        CHECK(seq[i].value == one.value);
        CHECK(seq[i].best_wavelet_norm == one.w_opt_norm);
        CHECK(par[i].value == seq[i].value);
        CHECK(par[i].best_wavelet_norm == seq[i].best_wavelet_norm);
    }
}

TEST_CASE("misfit layer validates its inputs", "[fwi]") {
    const Geometry g = default_geometry();
    const AnalyticWavelet w = make_bump(0.05);
    const Trace d = apply_forward(0.4, w, g);
    REQUIRE_THROWS_AS(fwi_reduced(0.4, d, 0.0, g), std::invalid_argument);
    REQUIRE_THROWS_AS(fwi_reduced(0.4, d, 0.7, g), std::invalid_argument);  // > lambda_max
    REQUIRE_THROWS_AS(fwi_reduced(0.05, d, 0.05, g), std::invalid_argument);
    REQUIRE_THROWS_AS(fwi_misfit(0.4, make_bump(0.2), d, 0.05, g), std::invalid_argument);
    const Trace zero = make_trace(g.grid);
    REQUIRE_THROWS_AS(fwi_reduced(0.4, zero, 0.05, g), std::invalid_argument);
    REQUIRE_THROWS_AS(require_data_energy(zero), std::invalid_argument);
}
