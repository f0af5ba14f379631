#include "potmeter/presets.hpp"

#include <map>

#include "potmeter/errors.hpp"

namespace potmeter {

namespace {

// A vanishing field on a ring, exercising every pipeline: the reconstruction
// is identically zero, the meter estimates zero, the two evolutions coincide,
// and the sine gauge function moves nothing measurable.
const char* kZeroField = R"(# zero-field: A = 0 end-to-end smoke scenario (all pipelines)
# Box sized so the ring tails of the sigma = 1 packet stay above the default
# density mask (no masked sites), and g chosen weak enough that the largest
# retained-mode pointer shift stays under 0.1 * sigma_q (no weak-regime warning).
schema_version = 1
grid.n = 256
grid.x_min = -6
grid.x_max = 6
grid.topology = ring
state.kind = gaussian
state.x0 = 0
state.k0 = 1
state.sigma = 1
potential.preset = zero
gauge.preset = sine
gauge.amp = 0.3
gauge.cycles = 1
meter.sigma_q = 1
meter.k_m = 0
meter.g = 0.015
probes = -1, 0, 1.5
evolution.dt = 5e-4
evolution.steps = 200
sampling.n_samples = 20000
sampling.master_seed = 12345
)";

// The headline reconstruction: a Gaussian-bump A on a ring, flux-quantized by
// a uniform offset, read back from the weak-value difference.
const char* kBumpReconstruct = R"(# bump-reconstruct: recover a Gaussian-bump A(x) from weak values
schema_version = 1
grid.n = 1024
grid.x_min = -6.75
grid.x_max = 6.75
grid.topology = ring
state.kind = gaussian
state.x0 = 0
state.k0 = 2
state.sigma = 1
potential.preset = gaussian_bump
potential.A0 = 0.7
potential.x_c = 0
potential.w = 2
potential.ring_quantize = true
threshold.mask = 3e-10
)";

// Full simulated experiment: sampled pointer readouts at five probe sites
// turn into q*A(x) estimates with error bars.
const char* kMeterEndToEnd = R"(# meter-endtoend: Monte Carlo pointer readout of q*A at five sites
schema_version = 1
grid.n = 1024
grid.x_min = -7
grid.x_max = 7
grid.topology = ring
state.kind = gaussian
state.x0 = 0
state.k0 = 2
state.sigma = 1
potential.preset = gaussian_bump
potential.A0 = 0.7
potential.x_c = 0
potential.w = 2
potential.ring_quantize = true
meter.sigma_q = 1
meter.k_m = 0
meter.g = 0.05
probes = -2.5, -1, 0, 1.5, 3
sampling.n_samples = 1000000
sampling.master_seed = 20260823
)";

const char* kDynamicsConst = R"(# dynamics-const: evolution under a constant A vs the phase-linked A = 0 run
# Box kept wide: truncating the Gaussian tails at a hard wall launches broadband
# reflections whose high-k content breaks the 4th-order stencil's product rule at
# low-density sites, scaled by the local A there. Constant A never decays, so the
# walls must sit where the tails are negligible.
schema_version = 1
grid.n = 1024
grid.x_min = -9
grid.x_max = 9
grid.topology = open
state.kind = gaussian
state.x0 = 0
state.k0 = 0
state.sigma = 1
potential.preset = constant
potential.a0 = 0.3
evolution.dt = 1e-3
evolution.steps = 1000
threshold.mask = 1e-6
)";

const char* kDynamicsBump = R"(# dynamics-bump: evolution under a Gaussian-bump A vs the phase-linked A = 0 run
# A decays toward the walls, so wall reflections contribute little here and the
# finite-difference truncation of the bump phase dominates; a moderate box keeps
# dx small enough for that term.
schema_version = 1
grid.n = 1024
grid.x_min = -7
grid.x_max = 7
grid.topology = open
state.kind = gaussian
state.x0 = 0
state.k0 = 0
state.sigma = 1
potential.preset = gaussian_bump
potential.A0 = 0.1
potential.x_c = 0
potential.w = 3
evolution.dt = 1e-3
evolution.steps = 1000
threshold.mask = 1e-6
)";

const char* kFreeSpread = R"(# free-spread: field-free Gaussian spreading against the analytic width law
schema_version = 1
grid.n = 2048
grid.x_min = -20
grid.x_max = 20
grid.topology = open
state.kind = gaussian
state.x0 = 0
state.k0 = 0
state.sigma = 1
potential.preset = zero
evolution.dt = 1e-3
evolution.steps = 1000
threshold.mask = 1e-6
)";

const char* kGaugeOpen = R"(# gauge-open: linear gauge function shifts the reconstruction by its slope
schema_version = 1
grid.n = 16384
grid.x_min = -10
grid.x_max = 10
grid.topology = open
state.kind = gaussian
state.x0 = 0
state.k0 = 2
state.sigma = 1
potential.preset = gaussian_bump
potential.A0 = 0.3
potential.x_c = 0
potential.w = 2
gauge.preset = linear
gauge.b = 0.4
threshold.mask = 1e-8
)";

// Constant A carrying exactly one flux quantum (a0 = 2 pi / L), plus a
// single-valued sine gauge: loop flux must not move, and the ground energy
// must be 2-pi-periodic in the seam twist.
const char* kGaugeRing = R"(# gauge-ring: flux invariance and twist periodicity on a ring
schema_version = 1
grid.n = 2048
grid.x_min = -10
grid.x_max = 10
grid.topology = ring
state.kind = gaussian
state.x0 = 0
state.k0 = 1
state.sigma = 1.5
potential.preset = constant
potential.a0 = 0.3141592653589793
gauge.preset = sine
gauge.amp = 0.3
gauge.cycles = 2
threshold.mask = 1e-8
)";

const std::map<std::string, const char*>& registry() {
    static const std::map<std::string, const char*> presets = {
        {"zero-field", kZeroField},
        {"bump-reconstruct", kBumpReconstruct},
        {"meter-endtoend", kMeterEndToEnd},
        {"dynamics-const", kDynamicsConst},
        {"dynamics-bump", kDynamicsBump},
        {"free-spread", kFreeSpread},
        {"gauge-open", kGaugeOpen},
        {"gauge-ring", kGaugeRing},
    };
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : registry()) names.push_back(name);
    return names;
}

std::string preset_text(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            if (!known.empty()) known += ", ";
            known += n;
        }
        throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

}  // namespace potmeter
