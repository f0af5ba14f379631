#pragma once

#include <string>

#include "json.hpp"
#include "potmeter/config.hpp"

namespace potmeter {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

enum class Pipeline { reconstruct, meter, dynamics, gauge_check, all };

Pipeline pipeline_from_name(const std::string& name);
std::string pipeline_name(Pipeline p);

struct RunOutput {
    nlohmann::json report;  // deterministic for fixed (config, seed)
    std::string csv;        // x,a_true,a_recon,re_wv,im_wv,re_wv0,im_wv0,mask,p_c
    bool all_pass = true;
};

// Executes the requested pipeline(s) over one scenario.  Throws ConfigError
// for scenario problems and potmeter::Error (stage-annotated) for numeric
// pipeline failures; tolerance failures are not exceptions — they land in the
// report's checks with pass = false.
RunOutput run_scenario(const ScenarioConfig& cfg, Pipeline pipeline);

// Worker cap from POTMETER_THREADS (unset or 0 = hardware concurrency).
int worker_count();

}  // namespace potmeter
