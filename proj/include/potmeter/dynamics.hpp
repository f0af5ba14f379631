#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "potmeter/gauge.hpp"
#include "potmeter/grid.hpp"
#include "potmeter/state.hpp"

namespace potmeter {

// Nearest-neighbour lattice Hamiltonian with Peierls-substituted hopping:
//   (H psi)_j = -t_hop (e^{-i theta_j} psi_{j+1} + e^{+i theta_{j-1}} psi_{j-1})
//               + (V_j + 2 t_hop) psi_j,      t_hop = hbar^2 / (2 m dx^2).
// theta_j is the phase on the link j -> j+1; on a ring the last entry is the
// seam link (n-1 -> 0) and absorbs any external flux twist.
struct HamiltonianTridiag {
    Grid1D grid;
    std::vector<double> onsite;  // V_j + 2 t_hop
    std::vector<double> theta;   // link phases; size n-1 (open) or n (ring)
    double t_hop = 0.0;
};

// theta_j = q (A_j + A_{j+1}) dx / (2 hbar) + (seam only) flux_twist.
// A trapezoid rule per link, so summing thetas along the chain reproduces the
// trapezoid line integral of qA/hbar exactly.
std::vector<double> link_phases(const VectorPotential& a, const PhysicalConstants& consts,
                                double flux_twist = 0.0);

HamiltonianTridiag make_hamiltonian(const Grid1D& grid, const VectorPotential* a,
                                    const std::vector<double>* potential,
                                    const PhysicalConstants& consts, double flux_twist = 0.0);

std::vector<cplx> apply_hamiltonian(const HamiltonianTridiag& h, const std::vector<cplx>& psi);

// phi_0 = 0, phi_{j+1} = phi_j + theta_j: the sitewise gauge phase that maps
// zero-field evolution onto evolution under A (exact lattice identity
// H(A) e^{i phi} = e^{i phi} H(0), on rings modulo flux quantization).
std::vector<double> lattice_gauge_phase(const HamiltonianTridiag& h);

struct EvolveResult {
    WaveFunction psi;
    double norm_drift = 0.0;  // max over steps of |norm - initial norm|
    std::vector<std::string> warnings;
};

// Crank-Nicolson: (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi.
// Unconditionally stable and exactly norm-preserving in exact arithmetic;
// warns (but proceeds) when dt * spectral-width >= 0.5 hbar, where the
// per-step phase errors are large even though the norm is safe.
EvolveResult crank_nicolson_evolve(const WaveFunction& psi0, const HamiltonianTridiag& h,
                                   const PhysicalConstants& consts, double dt, int steps);

// Ground-state energy by inverse power iteration with a spectral shift below
// min(V); the Rayleigh quotient converges quadratically in the iterate error.
double ground_state_energy(const HamiltonianTridiag& h, std::uint64_t seed, int max_iters = 500);

}  // namespace potmeter
