#pragma once

#include <cstdint>
#include <vector>

#include "potmeter/gauge.hpp"
#include "potmeter/grid.hpp"
#include "potmeter/state.hpp"

namespace potmeter {

// <x_j|p|psi> / <x_j|psi> per site.  Sites whose relative density falls
// below `threshold` carry mask 0 and value 0 (the ratio diverges at nodes).
struct WeakValueField {
    Grid1D grid;
    std::vector<cplx> wv;
    std::vector<std::uint8_t> mask;  // 1 = valid
    double threshold = 0.0;
};

// mask_j = 0 exactly where |psi_j|^2 < threshold * max_k |psi_k|^2.
std::vector<std::uint8_t> density_mask(const WaveFunction& psi, double threshold);

WeakValueField weak_value_momentum(const WaveFunction& psi, const PhysicalConstants& consts,
                                   double threshold = 1e-10);

struct ReconstructionReport {
    VectorPotential a_recon;               // Re(wv - wv0)/q on jointly valid sites, else 0
    std::vector<std::uint8_t> joint_mask;  // both inputs valid
    double masked_fraction = 0.0;
    double imag_leak_linf = 0.0;  // max |Im(wv - wv0)| over jointly valid sites
    bool has_residuals = false;   // true when a ground-truth A was supplied
    double residual_linf = 0.0;
    double residual_l2 = 0.0;
    WeakValueField wv;   // field for psi
    WeakValueField wv0;  // field for psi0
};

// The reconstruction identity: the weak-value difference between the
// gauge-coupled and reference states equals q A(x) sitewise, so
// a_recon = Re(wv - wv0)/q.  Residuals are filled in when a_true is given.
ReconstructionReport reconstruct_vector_potential(const WaveFunction& psi,
                                                  const WaveFunction& psi0,
                                                  const PhysicalConstants& consts,
                                                  double threshold,
                                                  const VectorPotential* a_true = nullptr);

struct CommutingMomentumField {
    Grid1D grid;
    std::vector<double> p_c;  // Re of the momentum weak value where valid, else 0
    std::vector<std::uint8_t> mask;
};

// The position-commuting momentum component: its eigenvalue field is exactly
// the real part of the momentum weak value (asserted by construction, not
// recomputed).  Equals hbar * (phase gradient) where the density is nonzero.
CommutingMomentumField hall_commuting_momentum(const WaveFunction& psi,
                                               const PhysicalConstants& consts,
                                               double threshold = 1e-10);

struct ProjectorTomography {
    std::vector<cplx> values;   // weak value of |x_j><x_j| with k=0 post-selection
    WaveFunction recovered;     // values renormalized back into a state
    cplx zero_mode_overlap;     // <k=0|psi>
};

// Weak value of the position projector with post-selection on the
// zero-momentum mode: W_j = <k=0|x_j><x_j|psi> / <k=0|psi> = psi(x_j)/(sqrt(L) <k=0|psi>),
// i.e. the wavefunction itself up to one global constant.  Ring only.
ProjectorTomography wavefunction_from_weak_values(const WaveFunction& psi,
                                                  const PhysicalConstants& consts);

}  // namespace potmeter
