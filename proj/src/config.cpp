#include "potmeter/config.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "potmeter/errors.hpp"

namespace potmeter {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// One parse pass: raw key/value strings, consumed (erased) as typed getters
// claim them; leftovers are unknown keys.
class KeyBag {
  public:
    explicit KeyBag(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(line, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(line, "empty key");
            if (!kv_.emplace(key, value).second)
                throw ConfigError(key, "duplicate key");
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    bool has_prefix(const std::string& prefix) const {
        const auto it = kv_.lower_bound(prefix);
        return it != kv_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
    }

    std::string req_string(const std::string& key) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError(key, "missing required key");
        const std::string v = it->second;
        kv_.erase(it);
        return v;
    }

    std::string opt_string(const std::string& key, const std::string& def) {
        return has(key) ? req_string(key) : def;
    }

    double req_double(const std::string& key) { return to_double(key, req_string(key)); }
    double opt_double(const std::string& key, double def) {
        return has(key) ? req_double(key) : def;
    }

    long long req_int(const std::string& key) { return to_int(key, req_string(key)); }
    long long opt_int(const std::string& key, long long def) {
        return has(key) ? req_int(key) : def;
    }

    std::uint64_t opt_u64(const std::string& key, std::uint64_t def) {
        if (!has(key)) return def;
        const std::string v = req_string(key);
        try {
            std::size_t used = 0;
            const std::uint64_t out = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected an unsigned integer, got '" + v + "'");
        }
    }

    bool opt_bool(const std::string& key, bool def) {
        if (!has(key)) return def;
        const std::string v = req_string(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError(key, "expected true or false, got '" + v + "'");
    }

    // Comma- and/or whitespace-separated doubles.
    std::vector<double> opt_double_list(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) return out;
        std::string v = req_string(key);
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream in(v);
        std::string tok;
        while (in >> tok) out.push_back(to_double(key, tok));
        return out;
    }

    void reject_leftovers() const {
        if (!kv_.empty()) throw ConfigError(kv_.begin()->first, "unknown key");
    }

  private:
    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double out = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected a number, got '" + v + "'");
        }
    }
    static long long to_int(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const long long out = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected an integer, got '" + v + "'");
        }
    }

    std::map<std::string, std::string> kv_;
};

GaussianSpec parse_gaussian(KeyBag& bag, const std::string& prefix) {
    GaussianSpec g;
    g.x0 = bag.req_double(prefix + "x0");
    g.k0 = bag.req_double(prefix + "k0");
    g.sigma = bag.req_double(prefix + "sigma");
    if (g.sigma <= 0.0) throw ConfigError(prefix + "sigma", "width must be positive");
    return g;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    KeyBag bag(text);
    ScenarioConfig cfg;

    cfg.schema_version = static_cast<int>(bag.req_int("schema_version"));
    if (cfg.schema_version != 1)
        throw ConfigError("schema_version",
                          "unsupported version " + std::to_string(cfg.schema_version) +
                              " (this build reads version 1)");

    const long long n = bag.req_int("grid.n");
    if (n < 8) throw ConfigError("grid.n", "need at least 8 sites");
    cfg.grid.n = static_cast<std::size_t>(n);
    cfg.grid.x_min = bag.req_double("grid.x_min");
    cfg.grid.x_max = bag.req_double("grid.x_max");
    if (!(cfg.grid.x_min < cfg.grid.x_max))
        throw ConfigError("grid.x_max", "x_max must exceed x_min");
    const std::string topo = bag.req_string("grid.topology");
    if (topo == "ring")
        cfg.grid.topology = Topology::ring;
    else if (topo == "open")
        cfg.grid.topology = Topology::open;
    else
        throw ConfigError("grid.topology", "expected ring or open, got '" + topo + "'");

    cfg.constants.hbar = bag.opt_double("constants.hbar", 1.0);
    cfg.constants.mass = bag.opt_double("constants.mass", 1.0);
    cfg.constants.q = bag.opt_double("constants.q", 1.0);
    if (cfg.constants.hbar <= 0.0) throw ConfigError("constants.hbar", "must be positive");
    if (cfg.constants.mass <= 0.0) throw ConfigError("constants.mass", "must be positive");

    const std::string kind = bag.req_string("state.kind");
    if (kind == "gaussian") {
        cfg.state = parse_gaussian(bag, "state.");
    } else if (kind == "plane_wave") {
        PlaneWaveSpec pw;
        pw.k = bag.req_double("state.k");
        cfg.state = pw;
    } else if (kind == "superposition") {
        SuperpositionSpec sup;
        const long long terms = bag.req_int("state.terms");
        if (terms < 1) throw ConfigError("state.terms", "need at least one term");
        for (long long t = 0; t < terms; ++t) {
            const std::string p = "state.term." + std::to_string(t) + ".";
            SuperpositionTerm term;
            term.weight = cplx(bag.req_double(p + "re"), bag.opt_double(p + "im", 0.0));
            term.packet = parse_gaussian(bag, p);
            sup.terms.push_back(term);
        }
        cfg.state = sup;
    } else {
        throw ConfigError("state.kind",
                          "expected gaussian, plane_wave or superposition, got '" + kind + "'");
    }

    cfg.potential.preset = bag.opt_string("potential.preset", "zero");
    if (cfg.potential.preset == "zero") {
    } else if (cfg.potential.preset == "constant") {
        cfg.potential.a0 = bag.req_double("potential.a0");
    } else if (cfg.potential.preset == "gaussian_bump") {
        cfg.potential.bump_a0 = bag.req_double("potential.A0");
        cfg.potential.bump_xc = bag.req_double("potential.x_c");
        cfg.potential.bump_w = bag.req_double("potential.w");
        if (cfg.potential.bump_w <= 0.0) throw ConfigError("potential.w", "width must be positive");
    } else if (cfg.potential.preset == "linear") {
        cfg.potential.slope = bag.req_double("potential.b");
    } else {
        throw ConfigError("potential.preset", "expected zero, constant, gaussian_bump or linear, got '" +
                                                  cfg.potential.preset + "'");
    }
    cfg.potential.ring_quantize = bag.opt_bool("potential.ring_quantize", false);

    cfg.gauge.preset = bag.opt_string("gauge.preset", "none");
    if (cfg.gauge.preset == "none") {
    } else if (cfg.gauge.preset == "constant") {
        cfg.gauge.c0 = bag.req_double("gauge.c");
    } else if (cfg.gauge.preset == "linear") {
        cfg.gauge.slope = bag.req_double("gauge.b");
    } else if (cfg.gauge.preset == "sine") {
        cfg.gauge.amp = bag.req_double("gauge.amp");
        cfg.gauge.cycles = bag.req_double("gauge.cycles");
    } else {
        throw ConfigError("gauge.preset",
                          "expected none, constant, linear or sine, got '" + cfg.gauge.preset + "'");
    }
    cfg.gauge.ab_probe_twist = bag.opt_double("gauge.ab_probe_twist", 0.7);

    if (bag.has_prefix("meter.")) {
        cfg.meter.present = true;
        cfg.meter.sigma_q = bag.req_double("meter.sigma_q");
        if (cfg.meter.sigma_q <= 0.0) throw ConfigError("meter.sigma_q", "must be positive");
        cfg.meter.g = bag.req_double("meter.g");
        cfg.meter.k_m = bag.opt_double("meter.k_m", 0.0);
        cfg.meter.pointer_n = static_cast<int>(bag.opt_int("meter.pointer_n", 512));
        if (cfg.meter.pointer_n < 8) throw ConfigError("meter.pointer_n", "need at least 8 points");
        cfg.meter.pointer_halfwidth = bag.opt_double("meter.pointer_halfwidth", 0.0);
    }

    if (bag.has_prefix("evolution.")) {
        cfg.evolution.present = true;
        cfg.evolution.dt = bag.req_double("evolution.dt");
        if (cfg.evolution.dt <= 0.0) throw ConfigError("evolution.dt", "must be positive");
        const long long steps = bag.req_int("evolution.steps");
        if (steps < 0) throw ConfigError("evolution.steps", "must be nonnegative");
        cfg.evolution.steps = static_cast<int>(steps);
        cfg.evolution.flux_twist = bag.opt_double("evolution.flux_twist", 0.0);
        cfg.evolution.v_const = bag.opt_double("evolution.v_const", 0.0);
        if (cfg.evolution.flux_twist != 0.0 && cfg.grid.topology == Topology::open)
            throw ConfigError("evolution.flux_twist", "only ring grids have a seam to twist");
    }

    cfg.probes = bag.opt_double_list("probes");

    const long long n_samples = bag.opt_int("sampling.n_samples", 100000);
    if (n_samples < 1) throw ConfigError("sampling.n_samples", "must be at least 1");
    cfg.sampling.n_samples = n_samples;
    cfg.sampling.master_seed = bag.opt_u64("sampling.master_seed", 1);

    cfg.mask_threshold = bag.opt_double("threshold.mask", 1e-10);
    if (!(cfg.mask_threshold > 0.0 && cfg.mask_threshold < 1.0))
        throw ConfigError("threshold.mask", "must lie in (0, 1)");

    cfg.tol.recon_linf = bag.opt_double("tolerances.recon_linf", cfg.tol.recon_linf);
    cfg.tol.imag_leak = bag.opt_double("tolerances.imag_leak", cfg.tol.imag_leak);
    cfg.tol.masked_fraction_max =
        bag.opt_double("tolerances.masked_fraction_max", cfg.tol.masked_fraction_max);
    cfg.tol.meter_sigma = bag.opt_double("tolerances.meter_sigma", cfg.tol.meter_sigma);
    cfg.tol.stderr_rel = bag.opt_double("tolerances.stderr_rel", cfg.tol.stderr_rel);
    cfg.tol.dynamics_residual =
        bag.opt_double("tolerances.dynamics_residual", cfg.tol.dynamics_residual);
    cfg.tol.norm_drift = bag.opt_double("tolerances.norm_drift", cfg.tol.norm_drift);
    cfg.tol.dynamics_recon_linf =
        bag.opt_double("tolerances.dynamics_recon_linf", cfg.tol.dynamics_recon_linf);
    cfg.tol.gauge_shift = bag.opt_double("tolerances.gauge_shift", cfg.tol.gauge_shift);
    cfg.tol.flux_invariance = bag.opt_double("tolerances.flux_invariance", cfg.tol.flux_invariance);
    cfg.tol.ab_period = bag.opt_double("tolerances.ab_period", cfg.tol.ab_period);

    bag.reject_leftovers();
    return cfg;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    auto putd = [&put](const std::string& k, double v) { put(k, format_double(v)); };
    auto puti = [&put](const std::string& k, long long v) { put(k, std::to_string(v)); };

    puti("schema_version", cfg.schema_version);
    puti("grid.n", static_cast<long long>(cfg.grid.n));
    putd("grid.x_min", cfg.grid.x_min);
    putd("grid.x_max", cfg.grid.x_max);
    put("grid.topology", topology_name(cfg.grid.topology));
    putd("constants.hbar", cfg.constants.hbar);
    putd("constants.mass", cfg.constants.mass);
    putd("constants.q", cfg.constants.q);

    if (const auto* g = std::get_if<GaussianSpec>(&cfg.state)) {
        put("state.kind", "gaussian");
        putd("state.x0", g->x0);
        putd("state.k0", g->k0);
        putd("state.sigma", g->sigma);
    } else if (const auto* pw = std::get_if<PlaneWaveSpec>(&cfg.state)) {
        put("state.kind", "plane_wave");
        putd("state.k", pw->k);
    } else {
        const auto& sup = std::get<SuperpositionSpec>(cfg.state);
        put("state.kind", "superposition");
        puti("state.terms", static_cast<long long>(sup.terms.size()));
        for (std::size_t t = 0; t < sup.terms.size(); ++t) {
            const std::string p = "state.term." + std::to_string(t) + ".";
            putd(p + "re", sup.terms[t].weight.real());
            putd(p + "im", sup.terms[t].weight.imag());
            putd(p + "x0", sup.terms[t].packet.x0);
            putd(p + "k0", sup.terms[t].packet.k0);
            putd(p + "sigma", sup.terms[t].packet.sigma);
        }
    }

    put("potential.preset", cfg.potential.preset);
    if (cfg.potential.preset == "constant") putd("potential.a0", cfg.potential.a0);
    if (cfg.potential.preset == "gaussian_bump") {
        putd("potential.A0", cfg.potential.bump_a0);
        putd("potential.x_c", cfg.potential.bump_xc);
        putd("potential.w", cfg.potential.bump_w);
    }
    if (cfg.potential.preset == "linear") putd("potential.b", cfg.potential.slope);
    put("potential.ring_quantize", cfg.potential.ring_quantize ? "true" : "false");

    put("gauge.preset", cfg.gauge.preset);
    if (cfg.gauge.preset == "constant") putd("gauge.c", cfg.gauge.c0);
    if (cfg.gauge.preset == "linear") putd("gauge.b", cfg.gauge.slope);
    if (cfg.gauge.preset == "sine") {
        putd("gauge.amp", cfg.gauge.amp);
        putd("gauge.cycles", cfg.gauge.cycles);
    }
    putd("gauge.ab_probe_twist", cfg.gauge.ab_probe_twist);

    if (cfg.meter.present) {
        putd("meter.sigma_q", cfg.meter.sigma_q);
        putd("meter.k_m", cfg.meter.k_m);
        putd("meter.g", cfg.meter.g);
        puti("meter.pointer_n", cfg.meter.pointer_n);
        putd("meter.pointer_halfwidth", cfg.meter.pointer_halfwidth);
    }
    if (cfg.evolution.present) {
        putd("evolution.dt", cfg.evolution.dt);
        puti("evolution.steps", cfg.evolution.steps);
        putd("evolution.flux_twist", cfg.evolution.flux_twist);
        putd("evolution.v_const", cfg.evolution.v_const);
    }

    if (!cfg.probes.empty()) {
        std::string list;
        for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
            if (i) list += ", ";
            list += format_double(cfg.probes[i]);
        }
        put("probes", list);
    }

    puti("sampling.n_samples", cfg.sampling.n_samples);
    put("sampling.master_seed", std::to_string(cfg.sampling.master_seed));
    putd("threshold.mask", cfg.mask_threshold);

    putd("tolerances.recon_linf", cfg.tol.recon_linf);
    putd("tolerances.imag_leak", cfg.tol.imag_leak);
    putd("tolerances.masked_fraction_max", cfg.tol.masked_fraction_max);
    putd("tolerances.meter_sigma", cfg.tol.meter_sigma);
    putd("tolerances.stderr_rel", cfg.tol.stderr_rel);
    putd("tolerances.dynamics_residual", cfg.tol.dynamics_residual);
    putd("tolerances.norm_drift", cfg.tol.norm_drift);
    putd("tolerances.dynamics_recon_linf", cfg.tol.dynamics_recon_linf);
    putd("tolerances.gauge_shift", cfg.tol.gauge_shift);
    putd("tolerances.flux_invariance", cfg.tol.flux_invariance);
    putd("tolerances.ab_period", cfg.tol.ab_period);

    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

}  // namespace potmeter
