#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "potmeter/errors.hpp"
#include "potmeter/presets.hpp"
#include "potmeter/scenario.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string preset;
    std::string out_json;
    std::string out_csv;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool quiet = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw potmeter::ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw potmeter::Error("cannot write '" + path + "'");
    out << content;
}

int run_pipeline(const std::string& pipeline_name, const Options& opt) {
    if (opt.config_path.empty() == opt.preset.empty())
        throw potmeter::ConfigError("config", "give exactly one of --config or --preset");

    const std::string text =
        opt.preset.empty() ? read_file(opt.config_path) : potmeter::preset_text(opt.preset);
    potmeter::ScenarioConfig cfg = potmeter::parse_config(text);
    if (opt.seed_given) cfg.sampling.master_seed = opt.seed;

    const potmeter::Pipeline pipeline = potmeter::pipeline_from_name(pipeline_name);
    const auto t0 = std::chrono::steady_clock::now();
    const potmeter::RunOutput out = potmeter::run_scenario(cfg, pipeline);
    const auto t1 = std::chrono::steady_clock::now();

    if (!opt.out_json.empty()) write_file(opt.out_json, out.report.dump(2) + "\n");
    if (!opt.out_csv.empty()) write_file(opt.out_csv, out.csv);

    if (!opt.quiet) {
        for (const auto& check : out.report.at("checks")) {
            std::printf("%s  %-40s  value %.6g  tolerance %.6g\n",
                        check.at("pass").get<bool>() ? "PASS" : "FAIL",
                        check.at("name").get<std::string>().c_str(),
                        check.at("value").get<double>(), check.at("tolerance").get<double>());
        }
        for (const auto& warning : out.report.at("warnings"))
            std::printf("WARN  %s\n", warning.get<std::string>().c_str());
        const double ms =
            std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
        std::printf("%s: %s in %.1f ms\n", pipeline_name.c_str(),
                    out.all_pass ? "all checks passed" : "TOLERANCE FAILURE", ms);
    }
    return out.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"potmeter: reconstructs a 1D vector potential A(x) from weak values of "
                 "canonical momentum and simulates the pointer-based readout protocol"};
    app.require_subcommand(1);

    Options opt;
    std::string fired_pipeline;
    for (const char* name : {"reconstruct", "meter", "dynamics", "gauge_check", "all"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
        sub->add_option("--config", opt.config_path, "scenario config file");
        sub->add_option("--preset", opt.preset, "built-in scenario name");
        sub->add_option("--out-json", opt.out_json, "write the JSON report here");
        sub->add_option("--out-csv", opt.out_csv, "write the CSV field dump here");
        sub->add_option("--seed", opt.seed, "override sampling.master_seed")
            ->each([&opt](const std::string&) { opt.seed_given = true; });
        sub->add_flag("--quiet", opt.quiet, "suppress console summary");
        sub->callback([&fired_pipeline, name] { fired_pipeline = name; });
    }

    CLI::App* dump = app.add_subcommand("dump-preset", "print a built-in scenario config");
    std::string dump_name;
    bool dump_list = false;
    dump->add_option("name", dump_name, "preset name");
    dump->add_flag("--list", dump_list, "list available presets");

    try {
        app.parse(argc, argv);

        if (dump->parsed()) {
            if (dump_list || dump_name.empty()) {
                for (const auto& name : potmeter::preset_names()) std::printf("%s\n", name.c_str());
                return 0;
            }
            std::fputs(potmeter::preset_text(dump_name).c_str(), stdout);
            return 0;
        }
        return run_pipeline(fired_pipeline, opt);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;  // bad command line = config error
    } catch (const potmeter::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const potmeter::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
