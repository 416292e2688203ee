#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "traceinv/forward.hpp"
#include "traceinv/signal.hpp"

namespace {

using namespace traceinv;

Geometry default_geometry() {
    Geometry g;
    g.grid = build_grid(-0.5, 1.5, 4001);
    return g;
}

// slowness whose moveout m*r is an exact multiple of dt, so the shifted
// samples land on grid nodes and no interpolation happens
double aligned_slowness(const Geometry& g, double target) {
    const double dt = g.grid.dt();
    return std::round(target * g.r / dt) * dt / g.r;
}

}  // namespace

TEST_CASE("geometry containment check reports the window arithmetic", "[forward]") {
    const Geometry g = default_geometry();
    const GeometryReport rep = validate_geometry(g);
    CHECK(rep.slowness_positive);
    CHECK(rep.window_contains);
    CHECK(rep.pass());
    CHECK(rep.required_lo == g.m_min * g.r - g.lambda_max);
    CHECK(rep.required_hi == g.m_max * g.r + g.lambda_max);
    CHECK(rep.available_lo == -0.5);
    CHECK(rep.available_hi == 1.5);

    Geometry shrunk = g;
    shrunk.grid = build_grid(-0.2, 1.5, 4001);  // cuts off the early window
    const GeometryReport bad = validate_geometry(shrunk);
    CHECK(bad.slowness_positive);
    CHECK_FALSE(bad.window_contains);
    CHECK_FALSE(bad.pass());
    REQUIRE_THROWS_AS(require_valid_geometry(shrunk), std::invalid_argument);

    Geometry neg = g;
    neg.m_min = -0.1;
    CHECK_FALSE(validate_geometry(neg).slowness_positive);
}

TEST_CASE("slowness range admits the closed endpoints only", "[forward]") {
    const Geometry g = default_geometry();
    CHECK(slowness_in_range(g, g.m_min));
    CHECK(slowness_in_range(g, g.m_max));
    CHECK(slowness_in_range(g, 0.4));
    CHECK_FALSE(slowness_in_range(g, g.m_min - 1e-6));
    CHECK_FALSE(slowness_in_range(g, g.m_max + 1e-6));
    CHECK_FALSE(slowness_in_range(g, std::nan("")));
    REQUIRE_THROWS_AS(require_slowness(g, 0.7), std::invalid_argument);
    REQUIRE_NOTHROW(require_slowness(g, 0.125));
}

TEST_CASE("forward map is the stated scaled shift at aligned slowness", "[forward]") {
    const Geometry g = default_geometry();
    const double m = aligned_slowness(g, 0.4);
    const AnalyticWavelet w = make_bump(0.05, 1.0);
    const Trace d = apply_forward(m, w, g);
    const double s = spreading_factor(g);
    CHECK(std::abs(s - 1.0 / (4.0 * kPi)) <= 1e-18);
    for (std::size_t k = 0; k < g.grid.n; k += 37) {
        const double expect = s * evaluate_wavelet(w, g.grid.time(k) - m * g.r);
        CHECK(d.samples[k] == expect);
    }
}

TEST_CASE("forward map scales norms by the spreading factor", "[forward]") {
    const Geometry g = default_geometry();
    const double m = aligned_slowness(g, 0.4);
    const AnalyticWavelet w = make_bump(0.05, 1.0);
    const Trace d = apply_forward(m, w, g);
    // sample the pulse on the same lattice to compare trapezoid sums exactly
    const SampledWavelet sw = sample_wavelet(w, receive_window_lo(g, m), g.grid.dt(),
                                             g.grid.n);
    const double ratio = norm(d) / wavelet_norm(sw);
    CHECK(std::abs(ratio - spreading_factor(g)) <= 1e-15);

    const Trace d2 = apply_forward_sampled(m, sw, g);
    for (std::size_t k = 0; k < g.grid.n; ++k)
        CHECK(std::abs(d2.samples[k] - d.samples[k]) <= 1e-18);
}

TEST_CASE("adjoint passes the dot test on aligned slowness", "[forward]") {
    const Geometry g = default_geometry();
    for (double target : {0.2, 0.4, 0.55}) {
        const double m = aligned_slowness(g, target);
        const SampledWavelet w = sample_wavelet(make_bump(0.05, 2.0),
                                                receive_window_lo(g, m), g.grid.dt(),
                                                g.grid.n);
        Trace d = make_trace(g.grid);
        // deterministic synthetic trace with broad support
        for (std::size_t k = 0; k < g.grid.n; ++k)
            d.samples[k] = std::sin(0.01 * static_cast<double>(k)) + 0.1;
        const Trace fw = apply_forward_sampled(m, w, g);
        const SampledWavelet ad = apply_adjoint(m, d, g);
        const double lhs = inner_product(fw, d);
        const double rhs = wavelet_inner(w, ad);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("normal operator equals adjoint after forward", "[forward]") {
    const Geometry g = default_geometry();
    const double m = aligned_slowness(g, 0.3);
    const SampledWavelet w = sample_wavelet(make_bump(0.05, 1.0),
                                            receive_window_lo(g, m), g.grid.dt(),
                                            g.grid.n);
    const SampledWavelet via_maps = apply_adjoint(m, apply_forward_sampled(m, w, g), g);
    const SampledWavelet direct = apply_normal(m, w, g);
    REQUIRE(via_maps.size() == direct.size());
    CHECK(std::abs(via_maps.offset - direct.offset) <= 1e-12);
    for (std::size_t k = 0; k < direct.size(); ++k)
        CHECK(std::abs(via_maps.samples[k] - direct.samples[k]) <= 1e-15);
}

TEST_CASE("receive window and wavelet domain arithmetic", "[forward]") {
    const Geometry g = default_geometry();
    CHECK(receive_window_lo(g, 0.4) == -0.5 - 0.4);
    CHECK(receive_window_hi(g, 0.4) == 1.5 - 0.4);
    CHECK(wavelet_domain_lo(g) == -0.5 - 0.6);
    CHECK(wavelet_domain_hi(g) == 1.5 - 0.125);
}

TEST_CASE("forward of a mismatched grid trace is rejected", "[forward]") {
    const Geometry g = default_geometry();
    Trace d = make_trace(build_grid(-0.5, 1.5, 1001));
    REQUIRE_THROWS_AS(apply_adjoint(0.4, d, g), std::invalid_argument);
}
