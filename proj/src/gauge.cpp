#include "potmeter/gauge.hpp"

#include <cmath>
#include <numbers>

#include "potmeter/errors.hpp"
#include "potmeter/fft.hpp"

namespace potmeter {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* what) {
    if (a != b) throw GridMismatch(std::string(what) + ": grids differ");
}

double lattice_loop_sum(const VectorPotential& A) {
    double s = 0.0;
    for (double v : A.a) s += v;
    return s * A.grid.dx;
}

}  // namespace

VectorPotential make_zero_potential(const Grid1D& grid) {
    return {grid, std::vector<double>(grid.n, 0.0), "zero"};
}

VectorPotential make_constant_potential(const Grid1D& grid, double a0) {
    return {grid, std::vector<double>(grid.n, a0), "constant"};
}

VectorPotential make_gaussian_bump_potential(const Grid1D& grid, double a0, double x_c, double w) {
    if (!(w > 0.0)) throw Error("gaussian_bump width must be positive");
    VectorPotential A{grid, std::vector<double>(grid.n), "gaussian_bump"};
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double u = (grid.x(j) - x_c) / w;
        A.a[j] = a0 * std::exp(-u * u);
    }
    return A;
}

VectorPotential make_linear_potential(const Grid1D& grid, double b) {
    VectorPotential A{grid, std::vector<double>(grid.n), "linear"};
    for (std::size_t j = 0; j < grid.n; ++j) A.a[j] = b * grid.x(j);
    return A;
}

double ring_quantization_offset(const VectorPotential& A, const PhysicalConstants& consts) {
    if (A.grid.topology != Topology::ring) {
        throw NotARing("ring_quantization_offset needs ring topology");
    }
    if (A.grid.n != A.a.size()) throw GridMismatch("potential length != grid.n");
    const double flux = lattice_loop_sum(A);
    const double quantum = kTwoPi * consts.hbar / consts.q;
    const double m = std::round(flux / quantum);
    // n*dx (not x_max - x_min) so the midpoint sum of the offset telescopes
    // exactly to m * quantum in floating point.
    return (m * quantum - flux) / (A.grid.dx * static_cast<double>(A.grid.n));
}

VectorPotential apply_ring_quantization(const VectorPotential& A, const PhysicalConstants& consts) {
    const double c = ring_quantization_offset(A, consts);
    VectorPotential out = A;
    for (auto& v : out.a) v += c;
    return out;
}

GaugeFunction make_constant_gauge(const Grid1D& grid, double c0) {
    return {grid, std::vector<double>(grid.n, c0)};
}

GaugeFunction make_linear_gauge(const Grid1D& grid, double b) {
    if (grid.topology == Topology::ring) {
        throw NotARing("linear gauge function is not single-valued on a ring");
    }
    GaugeFunction lam{grid, std::vector<double>(grid.n)};
    for (std::size_t j = 0; j < grid.n; ++j) lam.lambda[j] = b * grid.x(j);
    return lam;
}

GaugeFunction make_sine_gauge(const Grid1D& grid, double amp, double cycles) {
    if (grid.topology == Topology::ring && std::abs(cycles - std::round(cycles)) > 1e-12) {
        throw Error("sine gauge on a ring needs an integer cycle count to stay single-valued");
    }
    GaugeFunction lam{grid, std::vector<double>(grid.n)};
    const double L = grid.length();
    for (std::size_t j = 0; j < grid.n; ++j) {
        lam.lambda[j] = amp * std::sin(kTwoPi * cycles * (grid.x(j) - grid.x_min) / L);
    }
    return lam;
}

std::vector<double> cumulative_integral(const VectorPotential& A) {
    const Grid1D& grid = A.grid;
    if (A.a.size() != grid.n) throw GridMismatch("potential length != grid.n");
    std::vector<double> s(grid.n, 0.0);
    if (grid.topology == Topology::open) {
        for (std::size_t j = 0; j + 1 < grid.n; ++j) {
            s[j + 1] = s[j] + 0.5 * (A.a[j] + A.a[j + 1]) * grid.dx;
        }
        return s;
    }
    // Ring: S(x) = mean(A) (x - x_min) + oscillatory part integrated mode by
    // mode (A_k / (i k)), anchored so S(x_min) = 0.
    std::vector<cplx> ac(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) ac[j] = A.a[j];
    auto ahat = fft::forward(ac);
    const auto k = momentum_modes(grid);
    const double inv_n = 1.0 / static_cast<double>(grid.n);
    const double mean = ahat[0].real() * inv_n;
    ahat[0] = 0.0;
    for (std::size_t m = 1; m < grid.n; ++m) ahat[m] *= inv_n / cplx(0.0, k[m]);
    const auto osc = fft::backward(ahat);
    for (std::size_t j = 0; j < grid.n; ++j) {
        s[j] = mean * (grid.x(j) - grid.x_min) + (osc[j].real() - osc[0].real());
    }
    return s;
}

WaveFunction peierls_phase(const WaveFunction& psi0, const VectorPotential& A,
                           const PhysicalConstants& consts) {
    require_same_grid(psi0.grid, A.grid, "peierls_phase");
    if (A.grid.topology == Topology::ring) {
        const double phase = consts.q * lattice_loop_sum(A) / consts.hbar;
        const double wraps = phase / kTwoPi;
        if (std::abs(wraps - std::round(wraps)) > 1e-9) {
            throw FluxMismatch(
                "ring flux is not quantized: q*loop/hbar = " + std::to_string(phase) +
                " is not within 1e-9 of 2 pi * integer; use the dynamics flux_twist "
                "mode for non-quantized flux");
        }
    }
    const auto s = cumulative_integral(A);
    WaveFunction psi = psi0;
    const double scale = consts.q / consts.hbar;
    for (std::size_t j = 0; j < psi.grid.n; ++j) {
        const double ph = scale * s[j];
        psi.amp[j] *= cplx(std::cos(ph), std::sin(ph));
    }
    return psi;
}

std::pair<WaveFunction, VectorPotential> gauge_transform(const WaveFunction& psi,
                                                         const VectorPotential& A,
                                                         const GaugeFunction& lam,
                                                         const PhysicalConstants& consts) {
    require_same_grid(psi.grid, A.grid, "gauge_transform");
    require_same_grid(psi.grid, lam.grid, "gauge_transform");
    WaveFunction out = psi;
    const double scale = consts.q / consts.hbar;
    for (std::size_t j = 0; j < psi.grid.n; ++j) {
        const double ph = scale * lam.lambda[j];
        out.amp[j] *= cplx(std::cos(ph), std::sin(ph));
    }
    VectorPotential a_out{psi.grid, derivative(psi.grid, lam.lambda), "custom"};
    for (std::size_t j = 0; j < psi.grid.n; ++j) a_out.a[j] += A.a[j];
    return {std::move(out), std::move(a_out)};
}

FluxReport loop_flux(const VectorPotential& A, const PhysicalConstants& consts) {
    if (A.grid.topology != Topology::ring) {
        throw NotARing("loop_flux is defined on ring topology only");
    }
    FluxReport r;
    r.loop_integral = lattice_loop_sum(A);
    r.ab_phase = consts.q * r.loop_integral / consts.hbar;
    r.ab_phase_mod = r.ab_phase - kTwoPi * std::floor(r.ab_phase / kTwoPi);
    if (r.ab_phase_mod >= kTwoPi) r.ab_phase_mod = 0.0;  // guard the rounding edge
    return r;
}

}  // namespace potmeter
