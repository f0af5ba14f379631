#include "potmeter/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potmeter/errors.hpp"
#include "potmeter/fft.hpp"

namespace potmeter {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raw (unnormalized) Gaussian samples.  Ring states sum wrapped images
// psi(x) = sum_w exp(-(x - x0 + w L)^2/(4 sigma^2) + i k0 (x + w L)),
// which is exactly L-periodic for any k0 and converges superexponentially;
// the image count keeps the truncated tail below ~1e-300.
std::vector<cplx> raw_gaussian(const Grid1D& grid, const GaussianSpec& g) {
    if (!(g.sigma > 0.0)) throw Error("gaussian sigma must be positive");
    if (g.sigma < 2.0 * grid.dx) {
        throw DegenerateWidth("gaussian sigma = " + std::to_string(g.sigma) +
                              " is below 2 dx = " + std::to_string(2.0 * grid.dx));
    }
    std::vector<cplx> amp(grid.n);
    if (grid.topology == Topology::ring) {
        const double L = grid.length();
        const long W = 3 + static_cast<long>(std::ceil(17.0 * g.sigma / L));
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double x = grid.x(j);
            cplx sum = 0.0;
            for (long w = -W; w <= W; ++w) {
                const double xs = x - g.x0 + static_cast<double>(w) * L;
                const double arg = -xs * xs / (4.0 * g.sigma * g.sigma);
                if (arg < -745.0) continue;  // exp underflows to 0 anyway
                const double ph = g.k0 * (x + static_cast<double>(w) * L);
                sum += std::exp(arg) * cplx(std::cos(ph), std::sin(ph));
            }
            amp[j] = sum;
        }
    } else {
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double x = grid.x(j);
            const double xs = x - g.x0;
            const double arg = -xs * xs / (4.0 * g.sigma * g.sigma);
            const double mag = arg < -745.0 ? 0.0 : std::exp(arg);
            amp[j] = mag * cplx(std::cos(g.k0 * x), std::sin(g.k0 * x));
        }
    }
    return amp;
}

std::vector<cplx> raw_plane_wave(const Grid1D& grid, const PlaneWaveSpec& pw) {
    double k = pw.k;
    if (grid.topology == Topology::ring) {
        const double cycles = k * grid.length() / kTwoPi;
        const double m = std::round(cycles);
        if (std::abs(cycles - m) > 1e-9) {
            throw IncommensurateMode("plane wave k = " + std::to_string(k) +
                                     " is not a lattice mode of ring length " +
                                     std::to_string(grid.length()));
        }
        k = kTwoPi * m / grid.length();  // snap to the exact mode
    }
    std::vector<cplx> amp(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double ph = k * grid.x(j);
        amp[j] = cplx(std::cos(ph), std::sin(ph));
    }
    return amp;
}

double quad_norm(const Grid1D& grid, const std::vector<cplx>& amp) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) s += quadrature_weight(grid, j) * std::norm(amp[j]);
    return std::sqrt(s);
}

}  // namespace

WaveFunction prepare_state(const Grid1D& grid, const StateSpec& spec) {
    WaveFunction psi{grid, {}};
    if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
        psi.amp = raw_gaussian(grid, *g);
    } else if (const auto* pw = std::get_if<PlaneWaveSpec>(&spec)) {
        psi.amp = raw_plane_wave(grid, *pw);
    } else {
        const auto& sup = std::get<SuperpositionSpec>(spec);
        if (sup.terms.empty()) throw Error("superposition needs at least one term");
        psi.amp.assign(grid.n, cplx(0.0, 0.0));
        for (const auto& term : sup.terms) {
            auto part = raw_gaussian(grid, term.packet);
            const double nrm = quad_norm(grid, part);
            if (nrm == 0.0) throw Error("superposition term vanishes on the grid");
            const cplx scale = term.weight / nrm;
            for (std::size_t j = 0; j < grid.n; ++j) psi.amp[j] += scale * part[j];
        }
    }
    normalize(psi);
    return psi;
}

double norm(const WaveFunction& psi) { return quad_norm(psi.grid, psi.amp); }

void normalize(WaveFunction& psi) {
    const double nrm = norm(psi);
    if (nrm == 0.0) throw Error("cannot normalize the zero state");
    for (auto& a : psi.amp) a /= nrm;
}

cplx inner(const WaveFunction& phi, const WaveFunction& psi) {
    if (phi.grid != psi.grid) throw GridMismatch("inner product of states on different grids");
    cplx s = 0.0;
    for (std::size_t j = 0; j < phi.grid.n; ++j) {
        s += quadrature_weight(phi.grid, j) * std::conj(phi.amp[j]) * psi.amp[j];
    }
    return s;
}

std::vector<double> density(const WaveFunction& psi) {
    std::vector<double> d(psi.grid.n);
    for (std::size_t j = 0; j < psi.grid.n; ++j) d[j] = std::norm(psi.amp[j]);
    return d;
}

std::vector<double> momentum_modes(const Grid1D& grid) {
    std::vector<double> k(grid.n);
    const double dk = kTwoPi / (grid.dx * static_cast<double>(grid.n));
    const std::size_t half = grid.n / 2;
    for (std::size_t m = 0; m < grid.n; ++m) {
        const double idx = (m < half) ? static_cast<double>(m)
                                      : static_cast<double>(m) - static_cast<double>(grid.n);
        k[m] = dk * idx;
    }
    return k;
}

std::vector<cplx> derivative(const Grid1D& grid, const std::vector<cplx>& f) {
    if (f.size() != grid.n) throw GridMismatch("derivative: field length != grid.n");
    std::vector<cplx> d(grid.n);
    if (grid.topology == Topology::ring) {
        auto ft = fft::forward(f);
        const auto k = momentum_modes(grid);
        const double inv_n = 1.0 / static_cast<double>(grid.n);
        for (std::size_t m = 0; m < grid.n; ++m) ft[m] *= cplx(0.0, k[m]) * inv_n;
        d = fft::backward(ft);
    } else {
        const std::size_t n = grid.n;
        const double h12 = 12.0 * grid.dx;
        // 4th-order one-sided stencils at the ends, central elsewhere
        d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12;
        d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
        for (std::size_t j = 2; j + 2 < n; ++j) {
            d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / h12;
        }
        d[n - 1] =
            (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) /
            h12;
        d[n - 2] =
            (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / h12;
    }
    return d;
}

std::vector<double> derivative(const Grid1D& grid, const std::vector<double>& f) {
    std::vector<cplx> fc(f.begin(), f.end());
    auto dc = derivative(grid, fc);
    std::vector<double> d(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) d[j] = dc[j].real();
    return d;
}

std::vector<cplx> apply_momentum(const WaveFunction& psi, const PhysicalConstants& consts) {
    auto d = derivative(psi.grid, psi.amp);
    const cplx factor(0.0, -consts.hbar);
    for (auto& v : d) v *= factor;
    return d;
}

std::vector<cplx> momentum_amplitudes(const WaveFunction& psi) {
    if (psi.grid.topology != Topology::ring) {
        throw NotARing("momentum_amplitudes needs ring topology (exact mode decomposition)");
    }
    auto ft = fft::forward(psi.amp);
    const auto k = momentum_modes(psi.grid);
    const double scale = psi.grid.dx / std::sqrt(psi.grid.length());
    for (std::size_t m = 0; m < psi.grid.n; ++m) {
        const double ph = -k[m] * psi.grid.x_min;
        ft[m] *= scale * cplx(std::cos(ph), std::sin(ph));
    }
    return ft;
}

double expectation_momentum(const WaveFunction& psi, const PhysicalConstants& consts) {
    const auto p_psi = apply_momentum(psi, consts);
    cplx s = 0.0;
    for (std::size_t j = 0; j < psi.grid.n; ++j) {
        s += quadrature_weight(psi.grid, j) * std::conj(psi.amp[j]) * p_psi[j];
    }
    return s.real();
}

std::vector<std::string> resolution_warnings(const Grid1D& grid, const StateSpec& spec) {
    std::vector<std::string> warnings;
    if (grid.topology != Topology::open) return warnings;
    auto check = [&](const GaussianSpec& g) {
        if (g.x0 - 4.0 * g.sigma < grid.x_min || g.x0 + 4.0 * g.sigma > grid.x_max) {
            warnings.push_back("gaussian(x0=" + std::to_string(g.x0) + ", sigma=" +
                               std::to_string(g.sigma) +
                               ") is truncated: less than 4 sigma of clearance to a wall");
        }
    };
    if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
        check(*g);
    } else if (const auto* sup = std::get_if<SuperpositionSpec>(&spec)) {
        for (const auto& t : sup->terms) check(t.packet);
    }
    return warnings;
}

}  // namespace potmeter
