#include "potmeter/scenario.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "potmeter/dynamics.hpp"
#include "potmeter/errors.hpp"
#include "potmeter/fft.hpp"
#include "potmeter/gauge.hpp"
#include "potmeter/meter.hpp"
#include "potmeter/weak_value.hpp"

namespace potmeter {

namespace {

using nlohmann::json;

// Re-throws library errors with the failing stage named, keeping ConfigError
// intact (it maps to a different exit code).
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw Error(std::string("stage '") + name + "': " + e.what());
    }
}

void add_warnings(std::vector<std::string>& sink, const std::vector<std::string>& add) {
    for (const auto& w : add) {
        if (std::find(sink.begin(), sink.end(), w) == sink.end()) sink.push_back(w);
    }
}

void add_check(json& checks, bool& all_pass, const std::string& name, double value,
               double tolerance) {
    const bool pass = value <= tolerance;
    checks.push_back(json{{"name", name}, {"value", value}, {"tolerance", tolerance},
                          {"pass", pass}});
    all_pass = all_pass && pass;
}

VectorPotential potential_from_spec(const Grid1D& grid, const PotentialSpec& spec) {
    if (spec.preset == "zero") return make_zero_potential(grid);
    if (spec.preset == "constant") return make_constant_potential(grid, spec.a0);
    if (spec.preset == "gaussian_bump")
        return make_gaussian_bump_potential(grid, spec.bump_a0, spec.bump_xc, spec.bump_w);
    if (spec.preset == "linear") return make_linear_potential(grid, spec.slope);
    throw ConfigError("potential.preset", "unknown preset '" + spec.preset + "'");
}

GaugeFunction gauge_from_spec(const Grid1D& grid, const GaugeSpec& spec) {
    if (spec.preset == "constant") return make_constant_gauge(grid, spec.c0);
    if (spec.preset == "linear") return make_linear_gauge(grid, spec.slope);
    if (spec.preset == "sine") return make_sine_gauge(grid, spec.amp, spec.cycles);
    throw ConfigError("gauge.preset", "no gauge function configured");
}

// Everything the pipelines share: the reference state, the gauge-coupled
// state, and the (possibly flux-quantized) vector potential.
struct StaticContext {
    Grid1D grid;
    WaveFunction psi0;
    WaveFunction psi;
    VectorPotential a;
    bool quantized = false;
    double quant_offset = 0.0;
};

StaticContext build_static(const ScenarioConfig& cfg, std::vector<std::string>& warnings) {
    StaticContext sc;
    sc.grid = stage("make_grid", [&] {
        return make_grid(cfg.grid.n, cfg.grid.x_min, cfg.grid.x_max, cfg.grid.topology);
    });
    sc.psi0 = stage("prepare_state", [&] { return prepare_state(sc.grid, cfg.state); });
    add_warnings(warnings, resolution_warnings(sc.grid, cfg.state));
    sc.a = potential_from_spec(sc.grid, cfg.potential);
    if (cfg.potential.ring_quantize) {
        if (sc.grid.topology != Topology::ring)
            throw ConfigError("potential.ring_quantize", "only ring grids carry a loop flux");
        sc.quant_offset = ring_quantization_offset(sc.a, cfg.constants);
        sc.a = apply_ring_quantization(sc.a, cfg.constants);
        sc.quantized = true;
    }
    sc.psi = stage("peierls_phase", [&] { return peierls_phase(sc.psi0, sc.a, cfg.constants); });
    return sc;
}

std::string make_csv(const StaticContext& sc, const ReconstructionReport& rep,
                     const CommutingMomentumField& hall) {
    std::string csv = "x,a_true,a_recon,re_wv,im_wv,re_wv0,im_wv0,mask,p_c\n";
    for (std::size_t j = 0; j < sc.grid.n; ++j) {
        csv += format_double(sc.grid.x(j));
        csv += ',';
        csv += format_double(sc.a.a[j]);
        csv += ',';
        csv += format_double(rep.a_recon.a[j]);
        csv += ',';
        csv += format_double(rep.wv.wv[j].real());
        csv += ',';
        csv += format_double(rep.wv.wv[j].imag());
        csv += ',';
        csv += format_double(rep.wv0.wv[j].real());
        csv += ',';
        csv += format_double(rep.wv0.wv[j].imag());
        csv += ',';
        csv += rep.joint_mask[j] ? '1' : '0';
        csv += ',';
        csv += format_double(hall.p_c[j]);
        csv += '\n';
    }
    return csv;
}

json flux_json(const FluxReport& f) {
    return json{{"loop_integral", f.loop_integral},
                {"ab_phase", f.ab_phase},
                {"ab_phase_mod", f.ab_phase_mod}};
}

void run_reconstruct(const ScenarioConfig& cfg, const StaticContext& sc,
                     const ReconstructionReport& rep, json& results, json& checks,
                     bool& all_pass) {
    json r;
    r["residual_linf"] = rep.residual_linf;
    r["residual_l2"] = rep.residual_l2;
    r["imag_leak_linf"] = rep.imag_leak_linf;
    r["masked_fraction"] = rep.masked_fraction;
    if (sc.quantized) r["quantization_offset"] = sc.quant_offset;
    if (sc.grid.topology == Topology::ring)
        r["flux"] = flux_json(loop_flux(sc.a, cfg.constants));
    results["reconstruct"] = r;

    add_check(checks, all_pass, "reconstruct.residual_linf", rep.residual_linf,
              cfg.tol.recon_linf);
    add_check(checks, all_pass, "reconstruct.imag_leak_linf", rep.imag_leak_linf,
              cfg.tol.imag_leak);
    add_check(checks, all_pass, "reconstruct.masked_fraction", rep.masked_fraction,
              cfg.tol.masked_fraction_max);
}

// ---- meter pipeline ------------------------------------------------------

struct MeterJobResult {
    PointerMoments moments;       // at the configured g
    PointerMoments moments_half;  // at g/2, feeding the Richardson bias bound
    WeakValueEstimate est_exact;
    WeakValueEstimate est_sampled;
    SampleSummary q_summary, p_summary;
    double first_order = 0.0;
    std::vector<std::string> warnings;
};

MeterSettings meter_settings(const ScenarioConfig& cfg, double g) {
    MeterSettings s;
    s.g = g;
    s.sigma_q = cfg.meter.sigma_q;
    s.k_pointer = cfg.meter.k_m;
    s.pointer_n = cfg.meter.pointer_n;
    s.pointer_halfwidth = cfg.meter.pointer_halfwidth;
    return s;
}

void run_meter(const ScenarioConfig& cfg, const StaticContext& sc,
               const ReconstructionReport& rep, json& results, json& checks, bool& all_pass,
               std::vector<std::string>& warnings) {
    if (!cfg.meter.present)
        throw ConfigError("meter.sigma_q", "the meter pipeline needs a meter.* section");
    if (cfg.probes.empty())
        throw ConfigError("probes", "the meter pipeline needs at least one probe site");

    const PhysicalConstants& consts = cfg.constants;
    const MeterSettings s_full = meter_settings(cfg, cfg.meter.g);
    const MeterSettings s_half = meter_settings(cfg, cfg.meter.g / 2.0);

    struct Probe {
        double x_requested = 0.0;
        std::size_t site = 0;
        double snap = 0.0;
    };
    std::vector<Probe> probes;
    for (double x : cfg.probes) {
        Probe p;
        p.x_requested = x;
        p.site = nearest_site(sc.grid, x);
        double d = sc.grid.x(p.site) - x;
        if (sc.grid.topology == Topology::ring) d = std::remainder(d, sc.grid.length());
        p.snap = std::abs(d);
        probes.push_back(p);
        if (!rep.joint_mask[p.site])
            throw MaskedSite("probe x = " + format_double(x) +
                             " lands on a site below the density threshold");
    }

    // One job per (probe, state); each job samples its two readout channels
    // from streams keyed by (probe index, state, channel) so the result is
    // independent of scheduling.
    const std::array<const WaveFunction*, 2> states = {&sc.psi, &sc.psi0};
    const std::size_t n_jobs = probes.size() * 2;
    std::vector<MeterJobResult> job_results(n_jobs);
    std::vector<std::string> job_errors(n_jobs);

    fft::warm_plan(sc.grid.n);
    fft::warm_plan(static_cast<std::size_t>(cfg.meter.pointer_n));

    auto run_job = [&](std::size_t job) {
        const std::size_t probe_idx = job / 2;
        const std::size_t state_tag = job % 2;
        const WaveFunction& state = *states[state_tag];
        const std::size_t site = probes[probe_idx].site;
        MeterJobResult& out = job_results[job];

        const PointerState ps =
            conditional_pointer_state(state, static_cast<int>(site), s_full, consts);
        out.warnings = ps.warnings;
        out.moments = pointer_moments(ps, consts);
        const PointerState ps_half =
            conditional_pointer_state(state, static_cast<int>(site), s_half, consts);
        out.moments_half = pointer_moments(ps_half, consts);

        out.est_exact = estimate_from_moments(out.moments, cfg.sampling.n_samples, s_full, consts);
        const cplx wv = (state_tag == 0) ? rep.wv.wv[site] : rep.wv0.wv[site];
        out.first_order =
            first_order_density(std::norm(state.amp[site]), wv.imag(), s_full, consts);

        const std::uint64_t base = static_cast<std::uint64_t>(probe_idx) * 4 + state_tag * 2;
        rng::RandomStream q_stream(cfg.sampling.master_seed, base + 0);
        rng::RandomStream p_stream(cfg.sampling.master_seed, base + 1);
        out.q_summary = sample_channel(position_channel(ps), cfg.sampling.n_samples, q_stream);
        out.p_summary =
            sample_channel(momentum_channel(ps, consts), cfg.sampling.n_samples, p_stream);
        out.est_sampled =
            estimate_weak_value(out.q_summary.mean, out.q_summary.sd, out.p_summary.mean,
                                out.p_summary.sd, cfg.sampling.n_samples, s_full, consts);
    };

    const int workers = std::min<int>(worker_count(), static_cast<int>(n_jobs));
    if (workers <= 1) {
        for (std::size_t job = 0; job < n_jobs; ++job)
            stage("meter", [&] { run_job(job); });
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t job = next.fetch_add(1); job < n_jobs;
                     job = next.fetch_add(1)) {
                    try {
                        run_job(job);
                    } catch (const std::exception& e) {
                        job_errors[job] = e.what();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : job_errors) {
            if (!err.empty()) throw Error("stage 'meter': " + err);
        }
    }

    const double se_model =
        cfg.meter.sigma_q / (std::abs(cfg.meter.g) * std::sqrt(static_cast<double>(
                                                         cfg.sampling.n_samples)));

    json sites = json::array();
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const MeterJobResult& coupled = job_results[p * 2 + 0];
        const MeterJobResult& reference = job_results[p * 2 + 1];
        add_warnings(warnings, coupled.warnings);
        add_warnings(warnings, reference.warnings);

        const std::size_t site = probes[p].site;
        const double qa_true = consts.q * sc.a.a[site];
        const double qa_est = coupled.est_sampled.re - reference.est_sampled.re;
        const double qa_se = std::hypot(coupled.est_sampled.se_re, reference.est_sampled.se_re);
        const double d_full = coupled.est_exact.re - reference.est_exact.re;
        const double d_half =
            estimate_from_moments(coupled.moments_half, 0, s_half, consts).re -
            estimate_from_moments(reference.moments_half, 0, s_half, consts).re;
        const double bias_bound = 2.0 * std::abs(d_full - d_half);

        auto state_json = [&](const MeterJobResult& r, const cplx& wv) {
            return json{{"wv_exact", json{{"re", wv.real()}, {"im", wv.imag()}}},
                        {"pointer_exact",
                         json{{"prob_density", r.moments.prob_density},
                              {"first_order_density", r.first_order},
                              {"mean_q", r.moments.mean_q},
                              {"var_q", r.moments.var_q},
                              {"mean_p", r.moments.mean_p},
                              {"var_p", r.moments.var_p},
                              {"est_re", r.est_exact.re},
                              {"est_im", r.est_exact.im}}},
                        {"sampled",
                         json{{"n", r.q_summary.n},
                              {"mean_q", r.q_summary.mean},
                              {"sd_q", r.q_summary.sd},
                              {"mean_p", r.p_summary.mean},
                              {"sd_p", r.p_summary.sd},
                              {"est_re", r.est_sampled.re},
                              {"est_im", r.est_sampled.im},
                              {"se_re", r.est_sampled.se_re},
                              {"se_im", r.est_sampled.se_im}}}};
        };

        json sj;
        sj["x_requested"] = probes[p].x_requested;
        sj["x"] = sc.grid.x(site);
        sj["site"] = site;
        sj["snap_distance"] = probes[p].snap;
        sj["qa_true"] = qa_true;
        sj["qa_estimate"] = qa_est;
        sj["qa_stderr"] = qa_se;
        sj["bias_bound"] = bias_bound;
        sj["coupled"] = state_json(coupled, rep.wv.wv[site]);
        sj["reference"] = state_json(reference, rep.wv0.wv[site]);
        sites.push_back(sj);

        const std::string tag = "meter.site" + std::to_string(p);
        add_check(checks, all_pass, tag + ".qa_error", std::abs(qa_est - qa_true),
                  cfg.tol.meter_sigma * qa_se + bias_bound);
        add_check(checks, all_pass, tag + ".stderr_model.coupled",
                  std::abs(coupled.est_sampled.se_re / se_model - 1.0), cfg.tol.stderr_rel);
        add_check(checks, all_pass, tag + ".stderr_model.reference",
                  std::abs(reference.est_sampled.se_re / se_model - 1.0), cfg.tol.stderr_rel);
    }

    results["meter"] = json{{"g", cfg.meter.g},
                            {"sigma_q", cfg.meter.sigma_q},
                            {"k_m", cfg.meter.k_m},
                            {"n_samples", cfg.sampling.n_samples},
                            {"stderr_model", se_model},
                            {"sites", sites}};
}

// ---- dynamics pipeline ---------------------------------------------------

void run_dynamics(const ScenarioConfig& cfg, const StaticContext& sc, json& results,
                  json& checks, bool& all_pass, std::vector<std::string>& warnings) {
    if (!cfg.evolution.present)
        throw ConfigError("evolution.dt", "the dynamics pipeline needs an evolution.* section");

    const PhysicalConstants& consts = cfg.constants;
    std::vector<double> v(sc.grid.n, cfg.evolution.v_const);
    const std::vector<double>* vp = (cfg.evolution.v_const != 0.0) ? &v : nullptr;

    const HamiltonianTridiag h_a = stage("build_hamiltonian", [&] {
        return make_hamiltonian(sc.grid, &sc.a, vp, consts, cfg.evolution.flux_twist);
    });
    const HamiltonianTridiag h_0 = stage("build_hamiltonian", [&] {
        return make_hamiltonian(sc.grid, nullptr, vp, consts, cfg.evolution.flux_twist);
    });

    const EvolveResult coupled = stage("evolve", [&] {
        return crank_nicolson_evolve(sc.psi, h_a, consts, cfg.evolution.dt, cfg.evolution.steps);
    });
    const EvolveResult reference = stage("evolve", [&] {
        return crank_nicolson_evolve(sc.psi0, h_0, consts, cfg.evolution.dt,
                                     cfg.evolution.steps);
    });
    add_warnings(warnings, coupled.warnings);
    add_warnings(warnings, reference.warnings);

    // Lattice identity: the evolved pair stays linked by the cumulative link
    // phase of H(A), exactly, for any dt.
    const std::vector<double> phi = lattice_gauge_phase(h_a);
    double residual = 0.0;
    for (std::size_t j = 0; j < sc.grid.n; ++j) {
        const cplx linked = std::exp(cplx(0.0, phi[j])) * reference.psi.amp[j];
        residual = std::max(residual, std::abs(coupled.psi.amp[j] - linked));
    }
    const double norm_drift = std::max(coupled.norm_drift, reference.norm_drift);

    const ReconstructionReport rep_t = stage("reconstruct_evolved", [&] {
        return reconstruct_vector_potential(coupled.psi, reference.psi, consts,
                                            cfg.mask_threshold, &sc.a);
    });

    auto width2 = [&](const WaveFunction& w) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < sc.grid.n; ++j) {
            const double rho = std::norm(w.amp[j]) * quadrature_weight(sc.grid, j);
            m1 += rho * sc.grid.x(j);
            m2 += rho * sc.grid.x(j) * sc.grid.x(j);
        }
        return m2 - m1 * m1;
    };

    results["dynamics"] = json{{"residual", residual},
                               {"norm_drift", norm_drift},
                               {"recon_linf", rep_t.residual_linf},
                               {"recon_imag_leak", rep_t.imag_leak_linf},
                               {"recon_masked_fraction", rep_t.masked_fraction},
                               {"width2_initial", width2(sc.psi)},
                               {"width2_final", width2(coupled.psi)},
                               {"dt", cfg.evolution.dt},
                               {"steps", cfg.evolution.steps},
                               {"flux_twist", cfg.evolution.flux_twist}};

    add_check(checks, all_pass, "dynamics.residual", residual, cfg.tol.dynamics_residual);
    add_check(checks, all_pass, "dynamics.norm_drift", norm_drift, cfg.tol.norm_drift);
    add_check(checks, all_pass, "dynamics.recon_linf", rep_t.residual_linf,
              cfg.tol.dynamics_recon_linf);
}

// ---- gauge_check pipeline ------------------------------------------------

void run_gauge_check(const ScenarioConfig& cfg, const StaticContext& sc,
                     const ReconstructionReport& rep, json& results, json& checks,
                     bool& all_pass) {
    if (cfg.gauge.preset == "none")
        throw ConfigError("gauge.preset", "the gauge_check pipeline needs a gauge function");

    const PhysicalConstants& consts = cfg.constants;
    const GaugeFunction lam = stage("gauge_function", [&] {
        return gauge_from_spec(sc.grid, cfg.gauge);
    });
    const auto [psi_prime, a_prime] = stage("gauge_transform", [&] {
        return gauge_transform(sc.psi, sc.a, lam, consts);
    });
    const ReconstructionReport rep_prime = stage("reconstruct_transformed", [&] {
        return reconstruct_vector_potential(psi_prime, sc.psi0, consts, cfg.mask_threshold,
                                            nullptr);
    });

    // The transformed reconstruction must shift by dLambda/dx, sitewise.
    const std::vector<double> dlam = derivative(sc.grid, lam.lambda);
    double shift_linf = 0.0;
    for (std::size_t j = 0; j < sc.grid.n; ++j) {
        if (!rep.joint_mask[j] || !rep_prime.joint_mask[j]) continue;
        const double shift = rep_prime.a_recon.a[j] - rep.a_recon.a[j];
        shift_linf = std::max(shift_linf, std::abs(shift - dlam[j]));
    }

    json r;
    r["shift_linf"] = shift_linf;
    add_check(checks, all_pass, "gauge.shift_linf", shift_linf, cfg.tol.gauge_shift);

    if (sc.grid.topology == Topology::ring) {
        const FluxReport flux_a = loop_flux(sc.a, consts);
        const FluxReport flux_prime = loop_flux(a_prime, consts);
        const double flux_diff = std::abs(flux_prime.loop_integral - flux_a.loop_integral);
        r["flux"] = flux_json(flux_a);
        r["flux_transformed"] = flux_json(flux_prime);
        add_check(checks, all_pass, "gauge.flux_invariance", flux_diff, cfg.tol.flux_invariance);

        // Twist periodicity of the ground energy (period 2 pi, minimum on the
        // quantized-flux lattice).
        const double probe = cfg.gauge.ab_probe_twist;
        auto e0_at = [&](double twist) {
            const HamiltonianTridiag h = make_hamiltonian(sc.grid, &sc.a, nullptr, consts, twist);
            return stage("ground_state_energy",
                         [&] { return ground_state_energy(h, cfg.sampling.master_seed); });
        };
        const double e0_0 = e0_at(0.0);
        const double e0_probe = e0_at(probe);
        const double e0_period = e0_at(2.0 * M_PI);
        const double e0_probe_period = e0_at(probe + 2.0 * M_PI);
        r["ab_spectrum"] = json{{"probe_twist", probe},
                                {"e0_twist0", e0_0},
                                {"e0_probe", e0_probe},
                                {"e0_twist_2pi", e0_period},
                                {"e0_probe_plus_2pi", e0_probe_period}};
        add_check(checks, all_pass, "gauge.ab_period_at_zero", std::abs(e0_period - e0_0),
                  cfg.tol.ab_period);
        add_check(checks, all_pass, "gauge.ab_period_at_probe",
                  std::abs(e0_probe_period - e0_probe), cfg.tol.ab_period);
        // Negative when the quantized-flux lattice truly is the minimum.
        add_check(checks, all_pass, "gauge.ab_minimum_margin", e0_0 - e0_probe, 0.0);
    }
    results["gauge_check"] = r;
}

}  // namespace

Pipeline pipeline_from_name(const std::string& name) {
    if (name == "reconstruct") return Pipeline::reconstruct;
    if (name == "meter") return Pipeline::meter;
    if (name == "dynamics") return Pipeline::dynamics;
    if (name == "gauge_check") return Pipeline::gauge_check;
    if (name == "all") return Pipeline::all;
    throw ConfigError("pipeline", "unknown pipeline '" + name + "'");
}

std::string pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::reconstruct: return "reconstruct";
        case Pipeline::meter: return "meter";
        case Pipeline::dynamics: return "dynamics";
        case Pipeline::gauge_check: return "gauge_check";
        case Pipeline::all: return "all";
    }
    return "unknown";
}

int worker_count() {
    const char* env = std::getenv("POTMETER_THREADS");
    if (env != nullptr) {
        const int cap = std::atoi(env);
        if (cap > 0) return cap;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

RunOutput run_scenario(const ScenarioConfig& cfg, Pipeline pipeline) {
    RunOutput out;
    std::vector<std::string> warnings;
    const StaticContext sc = build_static(cfg, warnings);

    // The static weak-value pair underlies the CSV dump in every pipeline and
    // the reconstruction / meter stages directly.
    const ReconstructionReport rep = stage("reconstruct", [&] {
        return reconstruct_vector_potential(sc.psi, sc.psi0, cfg.constants, cfg.mask_threshold,
                                            &sc.a);
    });
    const CommutingMomentumField hall = stage("hall_momentum", [&] {
        return hall_commuting_momentum(sc.psi, cfg.constants, cfg.mask_threshold);
    });
    out.csv = make_csv(sc, rep, hall);

    json results = json::object();
    json check_list = json::array();
    bool all_pass = true;

    const bool want_all = pipeline == Pipeline::all;
    if (want_all || pipeline == Pipeline::reconstruct)
        run_reconstruct(cfg, sc, rep, results, check_list, all_pass);
    if (pipeline == Pipeline::meter || (want_all && cfg.meter.present && !cfg.probes.empty()))
        run_meter(cfg, sc, rep, results, check_list, all_pass, warnings);
    if (pipeline == Pipeline::dynamics || (want_all && cfg.evolution.present))
        run_dynamics(cfg, sc, results, check_list, all_pass, warnings);
    if (pipeline == Pipeline::gauge_check || (want_all && cfg.gauge.preset != "none"))
        run_gauge_check(cfg, sc, rep, results, check_list, all_pass);

    out.report = json{
        {"schema_version", kReportSchema},
        {"pipeline", pipeline_name(pipeline)},
        {"config_text", serialize_config(cfg)},
        {"results", results},
        {"checks", check_list},
        {"pass", all_pass},
        {"warnings", warnings},
        {"versions", json{{"potmeter", kVersion},
                          {"report_schema", kReportSchema},
                          {"fftw", std::string(fftw_version)}}},
        {"timing", "wall-clock timing is omitted from reports so identical runs stay "
                   "byte-identical; the CLI prints elapsed time to the console"},
    };
    out.all_pass = all_pass;
    return out;
}

}  // namespace potmeter
