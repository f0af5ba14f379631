// Grid and state-preparation tests.
//
// Conventions under test (hbar = m = 1 throughout):
//   Gaussian packet  psi ~ exp(-(x-x0)^2/(4 sigma^2) + i k0 x)
//     => <p> = hbar k0,  p psi / psi = hbar k0 + i hbar (x-x0)/(2 sigma^2)
//   Ring modes       u_m = exp(i k_m x)/sqrt(L),  k_m = 2 pi m / L
//   Parseval         sum_m |<u_m|psi>|^2 = sum_j |psi_j|^2 dx

#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "potmeter/errors.hpp"
#include "potmeter/grid.hpp"
#include "potmeter/rng.hpp"
#include "potmeter/state.hpp"

using namespace potmeter;

TEST_CASE("make_grid validates shape and fills dx by topology") {
    CHECK_THROWS_AS(make_grid(4, 0.0, 1.0, Topology::open), Error);
    CHECK_THROWS_AS(make_grid(64, 2.0, 2.0, Topology::open), Error);
    CHECK_THROWS_AS(make_grid(64, 3.0, -3.0, Topology::ring), Error);

    // ring: n sites on [x_min, x_max), dx = L/n; open: inclusive, dx = L/(n-1)
    const Grid1D r = make_grid(64, -8.0, 8.0, Topology::ring);
    CHECK(r.dx == doctest::Approx(16.0 / 64).epsilon(1e-15));
    const Grid1D o = make_grid(65, -8.0, 8.0, Topology::open);
    CHECK(o.dx == doctest::Approx(16.0 / 64).epsilon(1e-15));
    CHECK(o.x(64) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("quadrature weights implement periodic-trapezoid and trapezoid rules") {
    const Grid1D r = make_grid(32, 0.0, 4.0, Topology::ring);
    double total = 0.0;
    for (std::size_t j = 0; j < r.n; ++j) {
        CHECK(quadrature_weight(r, j) == doctest::Approx(r.dx).epsilon(1e-15));
        total += quadrature_weight(r, j);
    }
    CHECK(total == doctest::Approx(4.0).epsilon(1e-14));

    const Grid1D o = make_grid(33, 0.0, 4.0, Topology::open);
    CHECK(quadrature_weight(o, 0) == doctest::Approx(o.dx / 2).epsilon(1e-15));
    CHECK(quadrature_weight(o, 32) == doctest::Approx(o.dx / 2).epsilon(1e-15));
    CHECK(quadrature_weight(o, 7) == doctest::Approx(o.dx).epsilon(1e-15));
    total = 0.0;
    for (std::size_t j = 0; j < o.n; ++j) total += quadrature_weight(o, j);
    CHECK(total == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("nearest_site wraps on rings and clamps on open grids") {
    const Grid1D r = make_grid(16, 0.0, 16.0, Topology::ring);  // dx = 1
    CHECK(nearest_site(r, 3.4) == 3);
    CHECK(nearest_site(r, 15.6) == 0);   // closer to x=16 == site 0 than to site 15
    CHECK(nearest_site(r, -0.4) == 0);
    CHECK(nearest_site(r, -0.6) == 15);

    const Grid1D o = make_grid(17, 0.0, 16.0, Topology::open);
    CHECK(nearest_site(o, -5.0) == 0);
    CHECK(nearest_site(o, 99.0) == 16);
    CHECK(nearest_site(o, 7.49) == 7);
}

TEST_CASE("prepared Gaussian is normalized and carries momentum hbar k0") {
    const Grid1D g = make_grid(512, -10.0, 10.0, Topology::ring);
    const PhysicalConstants c;
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 2.0, 1.0});
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-14));
    // <p> = hbar k0 up to wrap-image corrections ~exp(-L^2/8 sigma^2) ~ e^-50
    CHECK(expectation_momentum(psi, c) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("ring plane waves snap to exact lattice modes or are rejected") {
    const Grid1D g = make_grid(256, -10.0, 10.0, Topology::ring);  // modes 2 pi m / 20
    const double k5 = 2.0 * M_PI * 5.0 / 20.0;

    // commensurate within 1e-9: accepted and snapped to the exact mode
    const WaveFunction psi = prepare_state(g, PlaneWaveSpec{k5 + 1e-11});
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-13));
    const PhysicalConstants c;
    CHECK(expectation_momentum(psi, c) == doctest::Approx(k5).epsilon(1e-12));

    CHECK_THROWS_AS(prepare_state(g, PlaneWaveSpec{k5 + 0.01}), IncommensurateMode);
}

TEST_CASE("Gaussians narrower than two grid cells are rejected") {
    const Grid1D g = make_grid(64, -8.0, 8.0, Topology::ring);  // dx = 0.25
    CHECK_THROWS_AS(prepare_state(g, GaussianSpec{0.0, 0.0, 0.4}), DegenerateWidth);
    CHECK_NOTHROW(prepare_state(g, GaussianSpec{0.0, 0.0, 0.6}));
}

TEST_CASE("apply_momentum is exact on ring plane waves") {
    const Grid1D g = make_grid(128, 0.0, 16.0, Topology::ring);
    const PhysicalConstants c;
    const double k = 2.0 * M_PI * 7.0 / 16.0;
    const WaveFunction psi = prepare_state(g, PlaneWaveSpec{k});
    const std::vector<cplx> p_psi = apply_momentum(psi, c);
    for (std::size_t j = 0; j < g.n; ++j) {
        // p e^{ikx} = hbar k e^{ikx}: a single lattice mode, so the spectral
        // derivative introduces no truncation error at all
        CHECK(std::abs(p_psi[j] - k * psi.amp[j]) < 1e-12);
    }
}

TEST_CASE("apply_momentum reproduces the Gaussian log-derivative") {
    const Grid1D g = make_grid(1024, -20.0, 20.0, Topology::ring);
    const PhysicalConstants c;
    const GaussianSpec spec{1.0, 2.0, 1.5};
    const WaveFunction psi = prepare_state(g, spec);
    const std::vector<cplx> p_psi = apply_momentum(psi, c);
    // (p psi)/psi = hbar k0 + i hbar (x-x0)/(2 sigma^2), checked where the
    // density is healthy (the identity holds everywhere; the division doesn't)
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        if (std::abs(x - spec.x0) > 5.0) continue;
        const cplx expected = cplx(spec.k0, (x - spec.x0) / (2.0 * spec.sigma * spec.sigma));
        CHECK(std::abs(p_psi[j] / psi.amp[j] - expected) < 1e-8);
    }
}

TEST_CASE("momentum operator is Hermitian on the ring quadrature") {
    const Grid1D g = make_grid(128, -5.0, 5.0, Topology::ring);
    const PhysicalConstants c;
    rng::RandomStream rs(99, 0);
    WaveFunction phi{g, std::vector<cplx>(g.n)};
    WaveFunction psi{g, std::vector<cplx>(g.n)};
    for (std::size_t j = 0; j < g.n; ++j) {
        phi.amp[j] = cplx(rs.next_double() - 0.5, rs.next_double() - 0.5);
        psi.amp[j] = cplx(rs.next_double() - 0.5, rs.next_double() - 0.5);
    }
    const WaveFunction p_psi{g, apply_momentum(psi, c)};
    const WaveFunction p_phi{g, apply_momentum(phi, c)};
    const cplx lhs = inner(phi, p_psi);
    const cplx rhs = std::conj(inner(psi, p_phi));
    CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("momentum amplitudes satisfy Parseval and the mode normalization") {
    const Grid1D g = make_grid(256, -10.0, 10.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.5, 1.0, 1.2});
    const std::vector<cplx> modes = momentum_amplitudes(psi);

    double mode_power = 0.0;
    for (const cplx& m : modes) mode_power += std::norm(m);
    double site_power = 0.0;
    for (const cplx& a : psi.amp) site_power += std::norm(a) * g.dx;
    CHECK(mode_power == doctest::Approx(site_power).epsilon(1e-12));

    // a pure mode has amplitude 1 on itself and 0 elsewhere
    const double k3 = 2.0 * M_PI * 3.0 / 20.0;
    const WaveFunction pw = prepare_state(g, PlaneWaveSpec{k3});
    const std::vector<cplx> pw_modes = momentum_amplitudes(pw);
    for (std::size_t m = 0; m < pw_modes.size(); ++m) {
        const double expect = (m == 3) ? 1.0 : 0.0;
        CHECK(std::abs(std::abs(pw_modes[m]) - expect) < 1e-12);
    }

    const Grid1D open_grid = make_grid(64, -10.0, 10.0, Topology::open);
    const WaveFunction open_psi = prepare_state(open_grid, GaussianSpec{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(momentum_amplitudes(open_psi), NotARing);
}

TEST_CASE("open-grid derivative is 4th order with exact polynomial behaviour") {
    const Grid1D g = make_grid(2049, -10.0, 10.0, Topology::open);
    // cubic: the interior and one-sided 5-point stencils are exact to degree 4
    std::vector<double> cubic(g.n), expect(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        cubic[j] = 0.25 * x * x * x - 2.0 * x + 1.0;
        expect[j] = 0.75 * x * x - 2.0;
    }
    const std::vector<double> dc = derivative(g, cubic);
    for (std::size_t j = 0; j < g.n; ++j) CHECK(std::abs(dc[j] - expect[j]) < 1e-10);

    // Gaussian: truncation ~ f^(5) dx^4 / 30 ~ 1e-9 at this resolution
    std::vector<double> f(g.n), fp(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        f[j] = std::exp(-x * x / 4.0);
        fp[j] = -x / 2.0 * f[j];
    }
    const std::vector<double> df = derivative(g, f);
    for (std::size_t j = 0; j < g.n; ++j) CHECK(std::abs(df[j] - fp[j]) < 1e-8);
}

TEST_CASE("superpositions are renormalized weighted sums") {
    const Grid1D g = make_grid(512, -16.0, 16.0, Topology::ring);
    SuperpositionSpec spec;
    spec.terms.push_back({cplx(1.0, 0.0), GaussianSpec{-4.0, 0.0, 1.0}});
    spec.terms.push_back({cplx(-1.0, 0.0), GaussianSpec{4.0, 0.0, 1.0}});
    const WaveFunction psi = prepare_state(g, spec);
    CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-13));
    // odd combination of well-separated packets: antisymmetric about x = 0
    const std::size_t mid = g.n / 2;  // x = 0
    CHECK(std::abs(psi.amp[mid]) < 1e-8);
    for (std::size_t j = 1; j < 200; ++j) {
        CHECK(std::abs(psi.amp[mid + j] + psi.amp[mid - j]) < 1e-10);
    }
}

TEST_CASE("truncated Gaussians on open grids raise a resolution warning") {
    const Grid1D g = make_grid(512, -10.0, 10.0, Topology::open);
    CHECK(resolution_warnings(g, GaussianSpec{0.0, 0.0, 1.0}).empty());
    // 4-sigma interval [5, 13] leaves the box
    CHECK(!resolution_warnings(g, GaussianSpec{9.0, 0.0, 1.0}).empty());
}
