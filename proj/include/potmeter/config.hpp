#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "potmeter/grid.hpp"
#include "potmeter/state.hpp"

namespace potmeter {

// Scenario file: flat "key = value" lines, '#' comments, versioned by a
// required schema_version key.  parse_config consumes every key it knows and
// rejects anything left over, so typos fail loudly instead of silently
// falling back to defaults.

struct GridSpec {
    std::size_t n = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    Topology topology = Topology::open;
};

struct PotentialSpec {
    std::string preset = "zero";  // zero | constant | gaussian_bump | linear
    double a0 = 0.0;              // constant value
    double bump_a0 = 0.0, bump_xc = 0.0, bump_w = 1.0;
    double slope = 0.0;  // linear coefficient
    bool ring_quantize = false;
};

struct GaugeSpec {
    std::string preset = "none";  // none | constant | linear | sine
    double c0 = 0.0;
    double slope = 0.0;
    double amp = 0.0;
    double cycles = 1.0;
    double ab_probe_twist = 0.7;  // off-quantized twist probed by the flux-period check
};

struct MeterSpec {
    bool present = false;
    double sigma_q = 1.0;
    double k_m = 0.0;
    double g = 0.0;
    int pointer_n = 512;
    double pointer_halfwidth = 0.0;  // <= 0: automatic
};

struct EvolutionSpec {
    bool present = false;
    double dt = 0.0;
    int steps = 0;
    double flux_twist = 0.0;
    double v_const = 0.0;  // uniform scalar potential
};

struct SamplingSpec {
    long long n_samples = 100000;
    std::uint64_t master_seed = 1;
};

struct Tolerances {
    double recon_linf = 1e-7;
    double imag_leak = 1e-8;
    double masked_fraction_max = 0.05;
    double meter_sigma = 3.0;  // statistical band half-width in standard errors
    double stderr_rel = 0.25;  // allowed relative deviation of stderr from its model
    double dynamics_residual = 1e-10;
    double norm_drift = 1e-12;
    double dynamics_recon_linf = 1e-6;
    double gauge_shift = 1e-9;
    double flux_invariance = 1e-9;
    double ab_period = 1e-9;
};

struct ScenarioConfig {
    int schema_version = 1;
    GridSpec grid;
    PhysicalConstants constants;
    StateSpec state;
    PotentialSpec potential;
    GaugeSpec gauge;
    MeterSpec meter;
    EvolutionSpec evolution;
    std::vector<double> probes;
    SamplingSpec sampling;
    double mask_threshold = 1e-10;
    Tolerances tol;
};

// Throws ConfigError (with the offending key path) on any problem.
ScenarioConfig parse_config(const std::string& text);

// Canonical echo: every active key, defaults resolved, sorted, one per line.
// parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& cfg);

// "%.17g" — shortest text that round-trips a double exactly.
std::string format_double(double v);

}  // namespace potmeter
