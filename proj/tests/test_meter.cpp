// Pointer-measurement tests (hbar = m = q = 1).
//
// The coupled meter state after postselecting position x is
//   phi(Q) = sum_m u_m(x) Psi_m Phi0(Q - g hbar k_m),
//   Phi0(Q) = (2 pi sigma_q^2)^{-1/4} exp(-Q^2/(4 sigma_q^2) + i k_pointer Q),
// so the pointer reads out the weak value <p>_w = <x|p|Psi>/<x|Psi>:
//   <Q>  = g Re<p>_w + O(g^2),
//   <P>  = hbar k_pointer + 2 g (hbar^2/4 sigma_q^2) Im<p>_w + O(g^2),
// and the postselection probability is rho(x) (1 + 2 g k_pointer Im<p>_w) + O(g^2)
// (Aharonov/Albert/Vaidman 1988; Jozsa, Phys. Rev. A 76, 044103 for the
// imaginary part and the k_pointer dependence).

#include "doctest.h"

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "potmeter/errors.hpp"
#include "potmeter/grid.hpp"
#include "potmeter/meter.hpp"
#include "potmeter/rng.hpp"
#include "potmeter/state.hpp"
#include "potmeter/weak_value.hpp"

using namespace potmeter;

namespace {
double exact_probability(const WaveFunction& psi, int site, const MeterSettings& s,
                         const PhysicalConstants& c) {
    return pointer_moments(conditional_pointer_state(psi, site, s, c), c).prob_density;
}
}  // namespace

TEST_CASE("postselection probabilities over all sites sum to one") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(128, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.2});
    MeterSettings s;
    s.g = 0.05;
    s.sigma_q = 1.0;
    s.k_pointer = 0.3;
    double total = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) total += exact_probability(psi, (int)j, s, c) * g.dx;
    CHECK(std::fabs(total - 1.0) < 1e-9);  // measured 4.3e-13
}

TEST_CASE("at g = 0 the pointer is untouched and the probability is the density") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(128, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.2});
    const std::vector<double> dens = density(psi);
    MeterSettings s;
    s.g = 0.0;
    s.sigma_q = 1.0;
    s.k_pointer = 0.4;
    const int site = (int)nearest_site(g, 0.7);
    const PointerMoments m = pointer_moments(conditional_pointer_state(psi, site, s, c), c);
    CHECK(std::fabs(m.prob_density - dens[site]) < 1e-9 * dens[site]);
    CHECK(std::fabs(m.mean_q) < 1e-10);
    CHECK(std::fabs(m.var_q - s.sigma_q * s.sigma_q) < 1e-9);
    CHECK(std::fabs(m.mean_p - c.hbar * s.k_pointer) < 1e-9);
    CHECK(std::fabs(m.var_p - c.hbar * c.hbar / (4.0 * s.sigma_q * s.sigma_q)) < 1e-9);
}

TEST_CASE("a plane wave shifts the pointer rigidly by g hbar k at every order") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(256, -8.0, 8.0, Topology::ring);
    const double k = 2.0 * M_PI * 13.0 / 16.0;
    const WaveFunction psi = prepare_state(g, PlaneWaveSpec{k});
    MeterSettings s;
    s.g = 0.05;
    s.sigma_q = 1.0;
    s.k_pointer = 0.0;
    const PointerState st = conditional_pointer_state(psi, 31, s, c);
    const PointerMoments m = pointer_moments(st, c);
    CHECK(std::fabs(m.mean_q - s.g * c.hbar * k) < 1e-10);      // measured 8.9e-12
    CHECK(std::fabs(m.var_q - s.sigma_q * s.sigma_q) < 1e-9);   // no broadening for one mode
    CHECK(std::fabs(m.mean_p - c.hbar * s.k_pointer) < 1e-12);  // momentum marginal untouched

    // the moment estimator recovers <p>_w = hbar k with no weak-order bias
    const WeakValueEstimate e = estimate_from_moments(m, 0, s, c);
    CHECK(std::fabs(e.re - c.hbar * k) < 1e-8);  // measured 1.8e-10
    CHECK(std::fabs(e.im) < 1e-10);              // measured 3.6e-13

    // sampling the position channel reproduces the shift within 4 standard errors
    const ChannelDistribution pos = position_channel(st);
    rng::RandomStream rs(2026, 5);
    const SampleSummary sum = sample_channel(pos, 50000, rs);
    const double sd_model = std::sqrt(m.var_q + pos.cell * pos.cell / 12.0);
    CHECK(std::fabs(sum.mean - m.mean_q) < 4.0 * sd_model / std::sqrt(50000.0));
    CHECK(sum.sd == doctest::Approx(sd_model).epsilon(0.1));
}

TEST_CASE("the probability deviates from its first-order form at O(g^2)") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(512, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.0});
    const WeakValueField wv = weak_value_momentum(psi, c, 1e-8);
    const std::vector<double> dens = density(psi);
    const int site = (int)nearest_site(g, 1.7);  // Im<p>_w = 0.85 here, nothing cancels
    MeterSettings s;
    s.sigma_q = 1.0;

    SUBCASE("with a pointer carrier the first-order term is exercised") {
        s.k_pointer = 0.7;
        std::vector<double> errs;
        for (double gg : {0.04, 0.02, 0.01}) {
            s.g = gg;
            const double fo = first_order_density(dens[site], wv.wv[site].imag(), s, c);
            errs.push_back(std::fabs(exact_probability(psi, site, s, c) - fo));
        }
        const double o1 = std::log2(errs[0] / errs[1]);
        const double o2 = std::log2(errs[1] / errs[2]);
        CHECK(o1 > 1.9);  // measured 1.9977
        CHECK(o2 > 1.9);  // measured 1.9990
        CHECK(o1 < 2.1);
        CHECK(o2 < 2.1);
    }

    SUBCASE("without a carrier the probability is the density through O(g)") {
        s.k_pointer = 0.0;
        std::vector<double> errs;
        for (double gg : {0.04, 0.02, 0.01}) {
            s.g = gg;
            errs.push_back(std::fabs(exact_probability(psi, site, s, c) - dens[site]));
        }
        CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.05));  // 1.9996
        CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.05));  // 1.9999
    }
}

TEST_CASE("one pointer width from the packet centre the quadratic error cancels too") {
    const PhysicalConstants c;
    // |x - x0| = sigma with x = 1.0 exactly on the lattice: the g^2 coefficient
    // of the postselection probability passes through zero and the residual
    // against the density drops to O(g^4)
    const Grid1D g = make_grid(1024, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.0});
    const int site = (int)nearest_site(g, 1.0);
    REQUIRE(g.x(site) == 1.0);
    const std::vector<double> dens = density(psi);
    MeterSettings s;
    s.sigma_q = 1.0;
    s.k_pointer = 0.0;
    std::vector<double> errs;
    for (double gg : {0.04, 0.02, 0.01}) {
        s.g = gg;
        errs.push_back(std::fabs(exact_probability(psi, site, s, c) - dens[site]));
    }
    CHECK(std::log2(errs[0] / errs[1]) > 2.9);  // measured 3.9986
    CHECK(std::log2(errs[1] / errs[2]) > 2.9);  // measured 3.9815
}

TEST_CASE("the weak-coupling guard warns exactly when the shift competes with sigma_q") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(64, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.0});
    MeterSettings s;
    s.sigma_q = 1.0;
    s.k_pointer = 0.0;

    s.g = 0.5;  // g * hbar * k_max ~ 2.9 >> 0.1 sigma_q
    const PointerState noisy = conditional_pointer_state(psi, 32, s, c);
    REQUIRE(noisy.warnings.size() == 1);
    CHECK(noisy.warnings[0].find("not weak") != std::string::npos);
    // the retained band is set by the packet, not by the grid Nyquist (12.6 here)
    CHECK(noisy.max_mode_k == doctest::Approx(5.89).epsilon(0.05));

    s.g = 0.001;  // shift 0.0059 < 0.1 sigma_q
    CHECK(conditional_pointer_state(psi, 32, s, c).warnings.empty());
}

TEST_CASE("undersized pointer grids are rejected, not silently truncated") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(64, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.0});
    MeterSettings s;
    s.g = 0.001;
    s.sigma_q = 1.0;

    s.pointer_halfwidth = 3.0;  // below the shift + 5 sigma_q floor: rejected up front
    CHECK_THROWS_AS(conditional_pointer_state(psi, 32, s, c), PointerGridTooNarrow);

    s.pointer_halfwidth = 5.2;  // above the floor but the 5.2-sigma tail still leaks
    CHECK_THROWS_AS(conditional_pointer_state(psi, 32, s, c), PointerGridTooNarrow);

    s.pointer_halfwidth = 0.0;  // automatic sizing is safe
    CHECK_NOTHROW(conditional_pointer_state(psi, 32, s, c));
}

TEST_CASE("first-order probability shortcut matches its ingredients and masks nodes") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(512, -16.0, 16.0, Topology::ring);
    const SuperpositionSpec odd{{{cplx(1.0, 0.0), GaussianSpec{-2.0, 0.0, 1.0}},
                                 {cplx(-1.0, 0.0), GaussianSpec{2.0, 0.0, 1.0}}}};
    const WaveFunction psi = prepare_state(g, odd);
    MeterSettings s;
    s.g = 0.01;
    s.sigma_q = 1.0;
    s.k_pointer = 0.7;

    const int node = (int)nearest_site(g, 0.0);  // odd state: exact zero
    CHECK_THROWS_AS(postselection_probability_first_order(psi, node, s, c, 1e-6), MaskedSite);

    const int good = (int)nearest_site(g, -2.5);
    const WeakValueField wv = weak_value_momentum(psi, c, 1e-6);
    const double expect =
        first_order_density(std::norm(psi.amp[good]), wv.wv[good].imag(), s, c);
    const double got = postselection_probability_first_order(psi, good, s, c, 1e-6);
    CHECK(got == doctest::Approx(expect).epsilon(1e-14));
    // and the shortcut sits within O(g^2) of the exact probability
    CHECK(std::fabs(got - exact_probability(psi, good, s, c)) < 1e-4 * std::norm(psi.amp[good]));
}

TEST_CASE("estimators refuse g = 0 and empty distributions refuse to sample") {
    const PhysicalConstants c;
    MeterSettings s;
    s.g = 0.0;
    s.sigma_q = 1.0;
    CHECK_THROWS_AS(estimate_weak_value(0.1, 1.0, 0.0, 0.5, 100, s, c), ZeroCoupling);

    ChannelDistribution empty;
    empty.values = {0.0, 1.0, 2.0};
    empty.pmf = {0.0, 0.0, 0.0};
    empty.cell = 1.0;
    rng::RandomStream rs(1, 0);
    CHECK_THROWS_AS(sample_channel(empty, 10, rs), ZeroProbability);
}

TEST_CASE("moment-based and summary-based estimates agree by construction") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(256, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 2.0, 1.0});
    MeterSettings s;
    s.g = 0.05;
    s.sigma_q = 1.0;
    s.k_pointer = 0.0;
    const PointerMoments m =
        pointer_moments(conditional_pointer_state(psi, (int)nearest_site(g, 0.9), s, c), c);
    const WeakValueEstimate a = estimate_from_moments(m, 4096, s, c);
    const WeakValueEstimate b =
        estimate_weak_value(m.mean_q, std::sqrt(m.var_q + m.dq * m.dq / 12.0), m.mean_p,
                            std::sqrt(m.var_p + m.dp * m.dp / 12.0), 4096, s, c);
    CHECK(a.re == b.re);
    CHECK(a.im == b.im);
    CHECK(a.se_re == b.se_re);
    CHECK(a.se_im == b.se_im);
}

TEST_CASE("sampled readout reproduces the exact moments and the weak value") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(256, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 2.0, 1.0});
    const int site = (int)nearest_site(g, 0.9);
    MeterSettings s;
    s.g = 0.05;
    s.sigma_q = 1.0;
    s.k_pointer = 0.0;
    const PointerState st = conditional_pointer_state(psi, site, s, c);
    const PointerMoments m = pointer_moments(st, c);
    const ChannelDistribution pos = position_channel(st);
    const ChannelDistribution mom = momentum_channel(st, c);

    const long long n = 200000;
    rng::RandomStream rq(424242, 0), rp(424242, 1);
    const SampleSummary sq = sample_channel(pos, n, rq);
    const SampleSummary sp = sample_channel(mom, n, rp);

    const double sd_q = std::sqrt(m.var_q + pos.cell * pos.cell / 12.0);
    const double sd_p = std::sqrt(m.var_p + mom.cell * mom.cell / 12.0);
    CHECK(std::fabs(sq.mean - m.mean_q) < 4.0 * sd_q / std::sqrt((double)n));  // 0.42 se
    CHECK(std::fabs(sp.mean - m.mean_p) < 4.0 * sd_p / std::sqrt((double)n));  // 0.28 se
    CHECK(sq.sd == doctest::Approx(sd_q).epsilon(0.1));  // ratio 1.0007
    CHECK(sp.sd == doctest::Approx(sd_p).epsilon(0.1));  // ratio 1.0038

    // the sampled estimate agrees with the exact-moment estimate within its
    // own standard error; the g-bias common to both drops out of the comparison
    const WeakValueEstimate exact = estimate_from_moments(m, n, s, c);
    const WeakValueEstimate est = estimate_weak_value(sq.mean, sq.sd, sp.mean, sp.sd, n, s, c);
    CHECK(std::fabs(est.re - exact.re) < 4.0 * est.se_re);
    CHECK(std::fabs(est.im - exact.im) < 4.0 * est.se_im);
}

TEST_CASE("sampling is a pure function of the stream coordinates") {
    const PhysicalConstants c;
    const Grid1D g = make_grid(128, -8.0, 8.0, Topology::ring);
    const WaveFunction psi = prepare_state(g, GaussianSpec{0.0, 1.0, 1.0});
    MeterSettings s;
    s.g = 0.05;
    s.sigma_q = 1.0;
    const ChannelDistribution pos =
        position_channel(conditional_pointer_state(psi, 40, s, c));

    rng::RandomStream a(777, 3), b(777, 3), other(777, 4), reseeded(778, 3);
    const SampleSummary sa = sample_channel(pos, 5000, a);
    const SampleSummary sb = sample_channel(pos, 5000, b);
    CHECK(sa.mean == sb.mean);  // bitwise replay
    CHECK(sa.sd == sb.sd);
    CHECK(sample_channel(pos, 5000, other).mean != sa.mean);
    CHECK(sample_channel(pos, 5000, reseeded).mean != sa.mean);
}
