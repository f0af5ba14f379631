#include "potmeter/grid.hpp"

#include <cmath>

#include "potmeter/errors.hpp"

namespace potmeter {

Grid1D make_grid(std::size_t n, double x_min, double x_max, Topology topology) {
    if (n < 8) {
        throw Error("grid needs at least 8 sites, got " + std::to_string(n));
    }
    if (!(x_min < x_max)) {
        throw Error("grid needs x_min < x_max");
    }
    Grid1D g;
    g.n = n;
    g.x_min = x_min;
    g.x_max = x_max;
    g.topology = topology;
    const double length = x_max - x_min;
    g.dx = (topology == Topology::ring) ? length / static_cast<double>(n)
                                        : length / static_cast<double>(n - 1);
    return g;
}

double quadrature_weight(const Grid1D& grid, std::size_t j) {
    if (grid.topology == Topology::ring) return grid.dx;
    return (j == 0 || j + 1 == grid.n) ? 0.5 * grid.dx : grid.dx;
}

std::size_t nearest_site(const Grid1D& grid, double x) {
    const double t = (x - grid.x_min) / grid.dx;
    if (grid.topology == Topology::ring) {
        double r = std::fmod(t, static_cast<double>(grid.n));
        if (r < 0) r += static_cast<double>(grid.n);
        std::size_t j = static_cast<std::size_t>(std::lround(r));
        return j % grid.n;  // lround(n - eps) can land on n
    }
    if (t <= 0.0) return 0;
    if (t >= static_cast<double>(grid.n - 1)) return grid.n - 1;
    return static_cast<std::size_t>(std::lround(t));
}

std::string topology_name(Topology t) {
    return t == Topology::ring ? "ring" : "open";
}

}  // namespace potmeter
