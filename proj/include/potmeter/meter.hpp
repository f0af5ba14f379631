#pragma once

#include <string>
#include <vector>

#include "potmeter/grid.hpp"
#include "potmeter/rng.hpp"
#include "potmeter/state.hpp"

namespace potmeter {

// Pointer-based momentum measurement.  A Gaussian pointer of width sigma_q
// (optionally carrying initial wavenumber k_pointer) is coupled to the system
// momentum by exp(-i g p ⊗ p_meter / hbar) and the system is post-selected at
// one grid site.  Each system momentum mode hk translates the pointer by g*hk,
// so the conditional pointer wave is a coherent sum of displaced Gaussians.
struct MeterSettings {
    double g = 0.05;                 // measurement coupling strength
    double sigma_q = 1.0;            // pointer position width
    double k_pointer = 0.0;          // initial pointer wavenumber
    int pointer_n = 512;             // pointer grid points
    double pointer_halfwidth = 0.0;  // <= 0 selects automatic sizing
    // Drop modes with |c_k|^2 below this * max. Must sit above the FFT roundoff
    // floor (~1e-32 of the peak power), or noise populates every mode up to
    // Nyquist and the retained k_max loses meaning.
    double mode_cutoff = 1e-24;
};

struct PointerGrid {
    int n = 0;
    double halfwidth = 0.0;
    double dq = 0.0;  // Q_j = -halfwidth + j*dq
    double q(int j) const { return -halfwidth + dq * j; }
};

struct PointerState {
    PointerGrid qgrid;
    std::vector<cplx> phi;      // conditional pointer wave, unnormalized
    double prob_density = 0.0;  // integral |phi|^2 dQ: post-selection density at the site
    double max_mode_k = 0.0;    // largest |k| retained from the system state
    std::vector<std::string> warnings;
};

PointerState conditional_pointer_state(const WaveFunction& psi, int site, const MeterSettings& s,
                                       const PhysicalConstants& consts);

// Moments of the discretized pointer distributions: position from the
// trapezoid-weighted |phi|^2, momentum from the DFT power spectrum.  These are
// the exact limits the finite-sample estimators converge to.
struct PointerMoments {
    double prob_density = 0.0;
    double mean_q = 0.0, var_q = 0.0;
    double mean_p = 0.0, var_p = 0.0;
    double dq = 0.0, dp = 0.0;  // cell widths, entering the sampling variance
};

PointerMoments pointer_moments(const PointerState& st, const PhysicalConstants& consts);

// Lowest-order post-selection density |psi(x)|^2 (1 + 2 g hbar k_pointer Im w),
// where w is the momentum weak value at the site.  The exact density differs
// from this at O(g^2).
double first_order_density(double density, double im_wv, const MeterSettings& s,
                           const PhysicalConstants& consts);

// Same formula, computing the weak value itself; throws MaskedSite when the
// site density is below threshold (the weak value is undefined there).
double postselection_probability_first_order(const WaveFunction& psi, int site,
                                             const MeterSettings& s,
                                             const PhysicalConstants& consts,
                                             double threshold = 1e-10);

// Weak-value estimators from pointer readout:
//   Re w = <Q>/g,   Im w = (<P> - hbar k_pointer) / (2 g Var_theory P),
// with Var_theory P = (hbar / 2 sigma_q)^2 for the initial Gaussian pointer.
struct WeakValueEstimate {
    double re = 0.0, im = 0.0;
    double se_re = 0.0, se_im = 0.0;  // standard errors for n readouts
};

WeakValueEstimate estimate_weak_value(double mean_q, double sd_q, double mean_p, double sd_p,
                                      long long n_samples, const MeterSettings& s,
                                      const PhysicalConstants& consts);

WeakValueEstimate estimate_from_moments(const PointerMoments& m, long long n_samples,
                                        const MeterSettings& s, const PhysicalConstants& consts);

// One readout channel as a discrete distribution: P(cell j) ∝ pmf_j, with the
// drawn value jittered uniformly across the cell of width `cell` around
// values_j (inverse-CDF sampling, deterministic given the stream).
struct ChannelDistribution {
    std::vector<double> values;
    std::vector<double> pmf;
    double cell = 0.0;
};

ChannelDistribution position_channel(const PointerState& st);
ChannelDistribution momentum_channel(const PointerState& st, const PhysicalConstants& consts);

struct SampleSummary {
    long long n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n-1 denominator)
};

SampleSummary sample_channel(const ChannelDistribution& ch, long long n, rng::RandomStream& rs);

}  // namespace potmeter
