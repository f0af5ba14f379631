#include "potmeter/weak_value.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "potmeter/errors.hpp"

namespace potmeter {

std::vector<std::uint8_t> density_mask(const WaveFunction& psi, double threshold) {
    const std::size_t n = psi.amp.size();
    double max_dens = 0.0;
    for (const cplx& a : psi.amp) max_dens = std::max(max_dens, std::norm(a));
    if (max_dens == 0.0) throw AllMasked("state has zero density everywhere");
    std::vector<std::uint8_t> mask(n, 0);
    const double cut = threshold * max_dens;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::norm(psi.amp[j]) >= cut) mask[j] = 1;
    }
    return mask;
}

WeakValueField weak_value_momentum(const WaveFunction& psi, const PhysicalConstants& consts,
                                   double threshold) {
    WeakValueField f;
    f.grid = psi.grid;
    f.threshold = threshold;
    f.mask = density_mask(psi, threshold);
    const std::vector<cplx> p_psi = apply_momentum(psi, consts);
    const std::size_t n = psi.amp.size();
    f.wv.assign(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        if (f.mask[j]) f.wv[j] = p_psi[j] / psi.amp[j];
    }
    return f;
}

ReconstructionReport reconstruct_vector_potential(const WaveFunction& psi,
                                                  const WaveFunction& psi0,
                                                  const PhysicalConstants& consts,
                                                  double threshold,
                                                  const VectorPotential* a_true) {
    if (psi.grid != psi0.grid) throw GridMismatch("probe and reference states use different grids");
    if (consts.q == 0.0) throw Error("charge q must be nonzero to reconstruct A");

    ReconstructionReport rep;
    rep.wv = weak_value_momentum(psi, consts, threshold);
    rep.wv0 = weak_value_momentum(psi0, consts, threshold);

    const std::size_t n = psi.amp.size();
    rep.joint_mask.assign(n, 0);
    rep.a_recon.grid = psi.grid;
    rep.a_recon.preset = "reconstructed";
    rep.a_recon.a.assign(n, 0.0);

    std::size_t joint = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (rep.wv.mask[j] && rep.wv0.mask[j]) {
            rep.joint_mask[j] = 1;
            ++joint;
            const cplx diff = rep.wv.wv[j] - rep.wv0.wv[j];
            rep.a_recon.a[j] = diff.real() / consts.q;
            rep.imag_leak_linf = std::max(rep.imag_leak_linf, std::abs(diff.imag()));
        }
    }
    if (joint == 0) throw AllMasked("no site passes the density threshold in both states");
    rep.masked_fraction = 1.0 - static_cast<double>(joint) / static_cast<double>(n);

    if (a_true != nullptr) {
        if (a_true->grid != psi.grid) throw GridMismatch("ground-truth A lives on a different grid");
        rep.has_residuals = true;
        double l2sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!rep.joint_mask[j]) continue;
            const double err = rep.a_recon.a[j] - a_true->a[j];
            rep.residual_linf = std::max(rep.residual_linf, std::abs(err));
            l2sq += err * err * psi.grid.dx;
        }
        rep.residual_l2 = std::sqrt(l2sq);
    }
    return rep;
}

CommutingMomentumField hall_commuting_momentum(const WaveFunction& psi,
                                               const PhysicalConstants& consts,
                                               double threshold) {
    const WeakValueField f = weak_value_momentum(psi, consts, threshold);
    CommutingMomentumField out;
    out.grid = f.grid;
    out.mask = f.mask;
    out.p_c.assign(f.wv.size(), 0.0);
    for (std::size_t j = 0; j < f.wv.size(); ++j) {
        if (out.mask[j]) out.p_c[j] = f.wv[j].real();
    }
    return out;
}

ProjectorTomography wavefunction_from_weak_values(const WaveFunction& psi,
                                                  const PhysicalConstants& consts) {
    (void)consts;
    if (psi.grid.topology != Topology::ring)
        throw NotARing("wavefunction tomography post-selects on a momentum mode; ring grids only");
    const std::size_t n = psi.amp.size();
    const double L = psi.grid.length();
    const double root_L = std::sqrt(L);

    // <k=0|psi> with the plane-wave mode u_0 = 1/sqrt(L): quadrature sum.
    cplx overlap(0.0, 0.0);
    for (const cplx& a : psi.amp) overlap += a;
    overlap *= psi.grid.dx / root_L;
    if (std::norm(overlap) < 1e-14)
        throw ZeroOverlap("post-selection mode <k=0|psi> has vanishing probability");

    ProjectorTomography out;
    out.zero_mode_overlap = overlap;
    out.values.assign(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = psi.amp[j] / (root_L * overlap);
    }
    out.recovered.grid = psi.grid;
    out.recovered.amp = out.values;
    normalize(out.recovered);
    return out;
}

}  // namespace potmeter
