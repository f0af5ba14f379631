#pragma once

#include <string>
#include <utility>
#include <vector>

#include "potmeter/grid.hpp"
#include "potmeter/state.hpp"

namespace potmeter {

// Real field A(x) on the grid, in units hbar/(q * length) when hbar = q = 1.
struct VectorPotential {
    Grid1D grid;
    std::vector<double> a;
    std::string preset = "custom";
};

VectorPotential make_zero_potential(const Grid1D& grid);
VectorPotential make_constant_potential(const Grid1D& grid, double a0);
// A0 * exp(-((x - x_c)/w)^2)
VectorPotential make_gaussian_bump_potential(const Grid1D& grid, double a0, double x_c, double w);
// b * x
VectorPotential make_linear_potential(const Grid1D& grid, double b);

// Minimal uniform offset c such that the lattice loop integral of A + c is an
// exact integer multiple of 2 pi hbar / q (the Aharonov-Bohm quantization a
// single-valued Peierls phase requires).  The midpoint loop sum telescopes, so
// after the offset the quantization holds to one rounding.  Ring only.
double ring_quantization_offset(const VectorPotential& A, const PhysicalConstants& consts);
VectorPotential apply_ring_quantization(const VectorPotential& A, const PhysicalConstants& consts);

// Scalar gauge generator Lambda(x) in units hbar/q; must be single-valued on
// rings (the linear preset therefore exists only on open grids).
struct GaugeFunction {
    Grid1D grid;
    std::vector<double> lambda;
};

GaugeFunction make_constant_gauge(const Grid1D& grid, double c0);
GaugeFunction make_linear_gauge(const Grid1D& grid, double b);
// amp * sin(2 pi cycles (x - x_min)/L): single-valued on rings for integer cycles.
GaugeFunction make_sine_gauge(const Grid1D& grid, double amp, double cycles);

struct FluxReport {
    double loop_integral = 0.0;  // closed-loop integral of A dx (midpoint rule)
    double ab_phase = 0.0;       // q * loop_integral / hbar, unwrapped
    double ab_phase_mod = 0.0;   // ab_phase reduced to [0, 2 pi)
};

// Cumulative integral S_j = int_{x_min}^{x_j} A dx'.  Open grids use the
// composite trapezoid rule (identical to the lattice link-phase sum, which
// keeps the time-evolution gauge identity exact).  Rings use the spectral
// antiderivative of the periodic field: the trapezoid's O(dx^2)
// Euler-Maclaurin term would otherwise leak a (dx^2/12) A'' bias into every
// ring reconstruction, swamping the spectral derivative downstream.  The
// full-loop increment still equals the midpoint loop sum exactly.
std::vector<double> cumulative_integral(const VectorPotential& A);

// Psi(x_j) = exp(i (q/hbar) S_j) Psi0(x_j).  On rings the flux must satisfy
// q * loop / hbar within 1e-9 of 2 pi Z or the phase would jump at the seam.
WaveFunction peierls_phase(const WaveFunction& psi0, const VectorPotential& A,
                           const PhysicalConstants& consts);

// Psi' = exp(i q Lambda / hbar) Psi and A' = A + dLambda/dx (topology scheme).
std::pair<WaveFunction, VectorPotential> gauge_transform(const WaveFunction& psi,
                                                         const VectorPotential& A,
                                                         const GaugeFunction& lam,
                                                         const PhysicalConstants& consts);

FluxReport loop_flux(const VectorPotential& A, const PhysicalConstants& consts);

}  // namespace potmeter
