#pragma once

#include <cstddef>
#include <string>

namespace potmeter {

enum class Topology { open, ring };

// Uniform 1D lattice.
//
// ring: n sites cover [x_min, x_max) with dx = L/n; site n would alias
//       site 0, so x_max itself is not stored.  All quadrature is the
//       midpoint/periodic-trapezoid rule (weight dx everywhere), which is
//       spectrally accurate for smooth periodic integrands.
// open: n sites cover [x_min, x_max] inclusively with dx = L/(n-1);
//       quadrature is the trapezoid rule (end weights dx/2).
struct Grid1D {
    std::size_t n = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    Topology topology = Topology::open;
    double dx = 0.0;

    double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
    double length() const { return x_max - x_min; }

    bool operator==(const Grid1D& other) const {
        return n == other.n && x_min == other.x_min && x_max == other.x_max &&
               topology == other.topology;
    }
    bool operator!=(const Grid1D& other) const { return !(*this == other); }
};

// Validates and builds a grid.  Throws potmeter::Error for n < 8 or a
// non-positive extent.
Grid1D make_grid(std::size_t n, double x_min, double x_max, Topology topology);

// Integration weight of site j under the grid's natural quadrature rule.
double quadrature_weight(const Grid1D& grid, std::size_t j);

// Index of the site closest to x: periodic wrap on rings, clamp on open grids.
std::size_t nearest_site(const Grid1D& grid, double x);

// hbar, particle mass and charge for a scenario.  Defaults are the natural
// units every bundled scenario uses.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;
    double q = 1.0;
};

std::string topology_name(Topology t);

}  // namespace potmeter
