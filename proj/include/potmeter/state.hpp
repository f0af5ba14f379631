#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "potmeter/grid.hpp"

namespace potmeter {

using cplx = std::complex<double>;

// Gaussian packet ~ exp(-(x-x0)^2/(4 sigma^2) + i k0 x).  On rings the
// prepared state is the wrapped-image (theta) sum, which is smooth and
// periodic for any k0.
struct GaussianSpec {
    double x0 = 0.0;
    double k0 = 0.0;
    double sigma = 1.0;
};

// Plane wave ~ exp(i k x).  On rings k must be an exact lattice mode.
struct PlaneWaveSpec {
    double k = 0.0;
};

struct SuperpositionTerm {
    cplx weight{1.0, 0.0};
    GaussianSpec packet;
};

// Weighted sum of normalized Gaussian packets, renormalized after the sum.
struct SuperpositionSpec {
    std::vector<SuperpositionTerm> terms;
};

using StateSpec = std::variant<GaussianSpec, PlaneWaveSpec, SuperpositionSpec>;

struct WaveFunction {
    Grid1D grid;
    std::vector<cplx> amp;
};

// Builds and normalizes a state.  Throws DegenerateWidth if a Gaussian has
// sigma < 2 dx, IncommensurateMode if a ring plane wave has k L not within
// 1e-9 of 2 pi * integer (commensurate k is then snapped to the exact mode).
WaveFunction prepare_state(const Grid1D& grid, const StateSpec& spec);

// Quadrature norm sqrt(sum_j w_j |psi_j|^2) and in-place normalization.
double norm(const WaveFunction& psi);
void normalize(WaveFunction& psi);

// <phi|psi> = sum_j w_j conj(phi_j) psi_j under the grid quadrature.
cplx inner(const WaveFunction& phi, const WaveFunction& psi);

std::vector<double> density(const WaveFunction& psi);

// d/dx by the topology's scheme: discrete Fourier derivative on rings,
// 4th-order finite differences (one-sided at the two ends) on open grids.
std::vector<cplx> derivative(const Grid1D& grid, const std::vector<cplx>& f);
std::vector<double> derivative(const Grid1D& grid, const std::vector<double>& f);

// (p psi)(x_j) with p = -i hbar d/dx.
std::vector<cplx> apply_momentum(const WaveFunction& psi, const PhysicalConstants& consts);

// Lattice momenta k_m = 2 pi m / L in FFT order (m = 0, 1, ..., -1).
std::vector<double> momentum_modes(const Grid1D& grid);

// Ring only: amplitudes on the orthonormal modes u_m(x) = exp(i k_m x)/sqrt(L),
// i.e. Psi_m = <u_m|psi> = (dx/sqrt(L)) exp(-i k_m x_min) FFT_m[psi].
// Satisfies sum_m |Psi_m|^2 = sum_j |psi_j|^2 dx (Parseval).
std::vector<cplx> momentum_amplitudes(const WaveFunction& psi);

// <psi|p|psi> (real up to roundoff; the real part is returned).
double expectation_momentum(const WaveFunction& psi, const PhysicalConstants& consts);

// Open-grid truncation warnings: any Gaussian whose 4-sigma interval pokes
// out of [x_min, x_max] silently corrupts weak-value tails, so report it.
std::vector<std::string> resolution_warnings(const Grid1D& grid, const StateSpec& spec);

}  // namespace potmeter
