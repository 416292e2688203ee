#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "traceinv/signal.hpp"

namespace {

using namespace traceinv;

// Antiderivative of (1 - u^2)^6, expanded by the binomial theorem and
// integrated term by term. P(1) = 1024/3003.
double bump_antiderivative(double u) {
    const double u2 = u * u;
    return u * (1.0 + u2 * (-2.0 + u2 * (3.0 + u2 * (-20.0 / 7.0 +
                u2 * (5.0 / 3.0 + u2 * (-6.0 / 11.0 + u2 / 13.0))))));
}

// integral of (1 - (t/mu)^2)^6 over [-b, b], b <= mu
double bump_partial_integral(double mu, double b) {
    return 2.0 * mu * bump_antiderivative(b / mu);
}

// trapezoid rule for the squared bump on a grid that cuts the support short,
// where the rule is genuinely second order
double truncated_bump_integral(double mu, std::size_t n) {
    const TimeGrid g = build_grid(-0.03, 0.03, n);
    Trace tr = make_trace(g);
    const AnalyticWavelet w = make_bump(mu);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = evaluate_wavelet(w, g.time(k));
        tr.samples[k] = v * v;
    }
    Trace ones = make_trace(g, std::vector<double>(n, 1.0));
    return inner_product(tr, ones);
}

}  // namespace

TEST_CASE("grid construction rejects bad windows", "[signal]") {
    REQUIRE_THROWS_AS(build_grid(0.0, 0.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid(1.0, 0.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid(0.0, 1.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid(std::nan(""), 1.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid(0.0, std::nan(""), 10), std::invalid_argument);
}

TEST_CASE("grid arithmetic lands on the stated nodes", "[signal]") {
    const TimeGrid g = build_grid(-0.5, 1.5, 4001);
    CHECK(g.dt() == 2.0 / 4000.0);
    CHECK(g.time(0) == -0.5);
    CHECK(std::abs(g.time(4000) - 1.5) <= 1e-12);
    CHECK(std::abs(g.time(1000) - 0.0) <= 1e-12);
    CHECK(g == build_grid(-0.5, 1.5, 4001));
    CHECK_FALSE(g == build_grid(-0.5, 1.5, 4000));
}

TEST_CASE("closed-interval membership honours the tolerance", "[signal]") {
    const double tol = window_tol(1e-3);
    CHECK(tol == 1e-9 * 1e-3);  // not the 1e-12 literal: the product rounds differently
    CHECK(std::abs(tol - 1e-12) <= 1e-27);
    CHECK(in_closed(0.0, 0.0, 1.0, tol));
    CHECK(in_closed(-0.5 * tol, 0.0, 1.0, tol));
    CHECK(in_closed(1.0 + 0.5 * tol, 0.0, 1.0, tol));
    CHECK_FALSE(in_closed(-2.0 * tol, 0.0, 1.0, tol));
    CHECK_FALSE(in_closed(1.0 + 2.0 * tol, 0.0, 1.0, tol));
}

TEST_CASE("trapezoid weights halve only the endpoints", "[signal]") {
    REQUIRE(trapezoid_weight(0, 5) == 0.5);
    REQUIRE(trapezoid_weight(4, 5) == 0.5);
    REQUIRE(trapezoid_weight(1, 5) == 1.0);
    REQUIRE(trapezoid_weight(3, 5) == 1.0);
}

TEST_CASE("trace construction validates sample vectors", "[signal]") {
    const TimeGrid g = build_grid(0.0, 1.0, 5);
    Trace z = make_trace(g);
    REQUIRE(z.samples.size() == 5);
    for (double v : z.samples) CHECK(v == 0.0);
    REQUIRE_THROWS_AS(make_trace(g, std::vector<double>(4, 1.0)), std::invalid_argument);
    std::vector<double> bad(5, 1.0);
    bad[2] = std::nan("");
    REQUIRE_THROWS_AS(make_trace(g, bad), std::invalid_argument);
}

TEST_CASE("inner product matches a hand-computed trapezoid sum", "[signal]") {
    const TimeGrid g = build_grid(0.0, 1.0, 3);  // dt = 0.5
    const Trace a = make_trace(g, {1.0, 2.0, 3.0});
    const Trace b = make_trace(g, {4.0, 5.0, 6.0});
    // 0.5 * (0.5*1*4 + 2*5 + 0.5*3*6) = 10.5
    CHECK(inner_product(a, b) == 10.5);
    CHECK(std::abs(norm(a) - std::sqrt(0.5 * (0.5 + 4.0 + 4.5))) <= 1e-15);

    const Trace c = make_trace(build_grid(0.0, 1.0, 5));
    REQUIRE_THROWS_AS(inner_product(a, c), std::invalid_argument);
}

TEST_CASE("pulse evaluation is exact at rational abscissae", "[signal]") {
    const AnalyticWavelet w = make_bump(0.05, 2.0);
    CHECK(evaluate_wavelet(w, 0.0) == 2.0);
    CHECK(evaluate_wavelet(w, 0.05) == 0.0);
    CHECK(evaluate_wavelet(w, -0.05) == 0.0);
    CHECK(evaluate_wavelet(w, 0.0501) == 0.0);
    CHECK(evaluate_wavelet(w, -7.0) == 0.0);
    // t = mu/2: 2 * (1 - 1/4)^3 = 2 * 27/64 = 27/32
    CHECK(std::abs(evaluate_wavelet(w, 0.025) - 27.0 / 32.0) <= 1e-15);
    CHECK(evaluate_wavelet(w, -0.025) == evaluate_wavelet(w, 0.025));

    const AnalyticWavelet mw = make_modulated_bump(0.05, 30.0);
    const double t = 0.013;
    const double u = t / 0.05;
    const double expect = std::pow(1.0 - u * u, 3.0) * std::cos(2.0 * kPi * 30.0 * t);
    CHECK(std::abs(evaluate_wavelet(mw, t) - expect) <= 1e-14);
    CHECK(evaluate_wavelet(mw, 0.06) == 0.0);

    REQUIRE_THROWS_AS(make_bump(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_bump(-0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_bump(std::nan("")), std::invalid_argument);
    REQUIRE_THROWS_AS(make_modulated_bump(0.05, std::nan("")), std::invalid_argument);
}

TEST_CASE("trapezoid energy of a fully resolved pulse hits the exact moment",
          "[signal]") {
    // integral of (1-(t/mu)^2)^6 over the support is mu * 2048/3003; the
    // squared bump is smooth with all derivatives vanishing at the support
    // ends, so the trapezoid rule is accurate to roundoff once resolved.
    const double mu = 0.05;
    const double amp = 1.7;
    const SampledWavelet sw = sample_wavelet(make_bump(mu, amp), -0.06, 1e-4, 1201);
    const double exact = amp * amp * mu * 2048.0 / 3003.0;
    const double got = wavelet_inner(sw, sw);
    CHECK(std::abs(got - exact) <= 1e-10 * exact);
    CHECK(std::abs(wavelet_norm(sw) - std::sqrt(exact)) <= 1e-10);
}

TEST_CASE("trapezoid rule is second order when the grid cuts the support",
          "[signal]") {
    const double mu = 0.05;
    const double exact = bump_partial_integral(mu, 0.03);
    const double e1 = std::abs(truncated_bump_integral(mu, 501) - exact);
    const double e2 = std::abs(truncated_bump_integral(mu, 1001) - exact);
    REQUIRE(e1 > 0.0);
    REQUIRE(e2 > 0.0);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.9);
    CHECK(order <= 2.1);
}

TEST_CASE("series interpolation snaps to nodes and vanishes outside", "[signal]") {
    const std::vector<double> v{10.0, 20.0, 30.0};
    const double dt = 0.1;
    // within snap tolerance of node 1
    CHECK(sample_series(v, 0.0, dt, 0.1 + 5e-11 * dt) == 20.0);
    CHECK(sample_series(v, 0.0, dt, 0.0) == 10.0);
    CHECK(sample_series(v, 0.0, dt, 0.2) == 30.0);
    // linear between nodes
    CHECK(std::abs(sample_series(v, 0.0, dt, 0.05) - 15.0) <= 1e-12);
    CHECK(std::abs(sample_series(v, 0.0, dt, 0.125) - 22.5) <= 1e-12);
    // beyond the window: zero, with a linear taper over the first cell
    CHECK(sample_series(v, 0.0, dt, -0.2) == 0.0);
    CHECK(sample_series(v, 0.0, dt, 0.5) == 0.0);
    CHECK(std::abs(sample_series(v, 0.0, dt, -0.05) - 5.0) <= 1e-12);
    CHECK(std::abs(sample_series(v, 0.0, dt, 0.25) - 15.0) <= 1e-12);
    // degenerate series
    CHECK(sample_series({}, 0.0, dt, 0.0) == 0.0);
}

TEST_CASE("interpolation reproduces linear data exactly", "[signal]") {
    const double dt = 0.01;
    std::vector<double> v(11);
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = 3.0 + 2.0 * static_cast<double>(k) * dt;
    for (double t : {0.0015, 0.033, 0.0777, 0.0999}) {
        const double got = sample_series(v, 0.0, dt, t);
        CHECK(std::abs(got - (3.0 + 2.0 * t)) <= 1e-12);
    }
}

TEST_CASE("sampling an analytic pulse is a faithful round trip", "[signal]") {
    const AnalyticWavelet w = make_bump(0.05, 1.3);
    const SampledWavelet sw = sample_wavelet(w, -0.06, 0.001, 121);
    REQUIRE(sw.size() == 121);
    CHECK(sw.time(0) == -0.06);
    CHECK(std::abs(sw.time(120) - 0.06) <= 1e-12);
    for (std::size_t k = 0; k < sw.size(); ++k)
        CHECK(sw.samples[k] == evaluate_wavelet(w, sw.time(k)));
    // node queries return node values exactly
    CHECK(sample_at(sw, 0.0) == evaluate_wavelet(w, 0.0));
    CHECK(sample_at(sw, -0.06) == evaluate_wavelet(w, -0.06));
    // off-node queries agree with direct evaluation to interpolation accuracy:
    // |f''| <= 6 amp / mu^2 for the bump, so the linear-interp error is below
    // max|f''| h^2 / 8
    const double interp_bound = 6.0 * 1.3 / (0.05 * 0.05) * 0.001 * 0.001 / 8.0;
    CHECK(std::abs(sample_at(sw, 0.0123) - evaluate_wavelet(w, 0.0123)) <= interp_bound);

    REQUIRE_THROWS_AS(sample_wavelet(w, 0.0, 0.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_wavelet(w, 0.0, 0.001, 1), std::invalid_argument);
}

TEST_CASE("trace interpolation uses the trace window", "[signal]") {
    const TimeGrid g = build_grid(-0.5, 1.5, 4001);
    Trace tr = make_trace(g);
    for (std::size_t k = 0; k < g.n; ++k) tr.samples[k] = g.time(k);
    CHECK(trace_at(tr, -0.5) == -0.5);
    CHECK(std::abs(trace_at(tr, 0.33333) - 0.33333) <= 1e-12);
    CHECK(trace_at(tr, 1.7) == 0.0);
}

TEST_CASE("sampled inner products demand a shared window", "[signal]") {
    const AnalyticWavelet w = make_bump(0.05);
    const SampledWavelet a = sample_wavelet(w, -0.06, 0.001, 121);
    const SampledWavelet b = sample_wavelet(w, -0.06, 0.001, 120);
    REQUIRE_THROWS_AS(wavelet_inner(a, b), std::invalid_argument);
    SampledWavelet c = a;
    c.offset += 1.0;
    REQUIRE_THROWS_AS(wavelet_inner(a, c), std::invalid_argument);
    SampledWavelet d = a;
    d.dt *= 2.0;
    d.samples.resize(a.size());
    REQUIRE_THROWS_AS(wavelet_inner(a, d), std::invalid_argument);

    // manual trapezoid oracle on a tiny window
    const SampledWavelet p{0.0, 0.5, {1.0, 4.0, 2.0}};
    const SampledWavelet q{0.0, 0.5, {3.0, 1.0, 5.0}};
    // 0.5 * (0.5*1*3 + 4*1 + 0.5*2*5) = 0.5 * (1.5 + 4 + 5) = 5.25
    CHECK(wavelet_inner(p, q) == 5.25);
}
