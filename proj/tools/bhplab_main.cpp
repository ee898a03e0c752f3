#include <CLI11.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bhplab/presets.hpp"

namespace {

using bhplab::json;

std::string now_utc() {
    char buf[32];
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::int64_t seed = -1;
    int workers = 0;
    long long paths = 0;
};

int run_driver(const std::string& subcommand, const std::set<std::string>& experiments,
               const CommonOpts& opts) {
    json cfg_json;
    if (!opts.preset.empty()) {
        cfg_json = bhplab::preset_config(opts.preset);
    } else if (!opts.config_path.empty()) {
        std::ifstream f(opts.config_path);
        if (!f) {
            std::cerr << "error: cannot open config file " << opts.config_path << "\n";
            return 1;
        }
        cfg_json = json::parse(f);  // throws with byte position on malformed input
    } else {
        std::cerr << "error: " << subcommand << " requires --config or --preset\n";
        return 1;
    }
    if (opts.seed >= 0) cfg_json["seed"] = static_cast<std::uint64_t>(opts.seed);
    if (opts.workers > 0) cfg_json["workers"] = opts.workers;
    if (opts.paths > 0) cfg_json["n_paths"] = opts.paths;

    bhplab::RunConfig cfg = bhplab::parse_run_config(cfg_json);
    if (!experiments.count(cfg.experiment))
        throw bhplab::ConfigError("config.experiment: '" + cfg.experiment +
                                  "' does not belong to the '" + subcommand + "' subcommand");

    if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
    bhplab::ExperimentReport rep = bhplab::run_experiment(cfg, opts.out_dir);

    const std::string report_text = rep.to_json().dump(2) + "\n";
    if (!opts.out_dir.empty()) {
        json manifest;
        manifest["created_utc"] = now_utc();
        manifest["content_hash"] = bhplab::git_blob_hash(cfg_json.dump());
        manifest["config"] = cfg_json;
        bhplab::write_text_file(opts.out_dir + "/manifest.json", manifest.dump(2) + "\n");
        bhplab::write_text_file(opts.out_dir + "/report.json", report_text);
        bhplab::write_text_file(opts.out_dir + "/estimates.csv",
                                bhplab::estimates_csv(rep.csv_rows));
        bhplab::write_text_file(opts.out_dir + "/plot.csv", bhplab::plot_csv(rep.plot_rows));
    }
    std::cout << report_text;
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for exit times, Green functions and boundary Harnack "
                 "behaviour of subordinate Brownian motion"};
    app.require_subcommand(1);

    static const std::map<std::string, std::set<std::string>> kDrivers = {
        {"phi", {"phi", "phi-doubling"}},
        {"exit-time", {"exit-time", "exit-time-scaling"}},
        {"pruitt", {"pruitt"}},
        {"levy-system", {"levy-system"}},
        {"a4", {"a4"}},
        {"cond-1-4a", {"cond-1-4a"}},
        {"bhp-scan", {"bhp-scan"}},
        {"cone-scan", {"cone-scan"}},
        {"pde", {"pde", "cone-exponents"}},
        {"jump-density", {"jump-density"}},
        {"mu2", {"mu2"}},
    };

    CommonOpts opts;
    std::string chosen;
    for (const auto& [name, experiments] : kDrivers) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " driver");
        sub->add_option("--config", opts.config_path, "JSON run configuration");
        sub->add_option("--preset", opts.preset, "name of a compiled-in preset");
        sub->add_option("--out", opts.out_dir, "output directory for artifacts");
        sub->add_option("--seed", opts.seed, "override the config seed");
        sub->add_option("--workers", opts.workers, "worker threads (default: hardware)");
        sub->add_option("--paths", opts.paths, "override the path count");
        sub->callback([&chosen, name = name]() { chosen = name; });
    }
    CLI::App* presets = app.add_subcommand("presets", "list compiled-in presets");
    presets->callback([&chosen]() { chosen = "presets"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (chosen == "presets") {
            for (const auto& p : bhplab::list_presets())
                std::printf("%-36s %s\n", p.name.c_str(), p.description.c_str());
            return 0;
        }
        return run_driver(chosen, kDrivers.at(chosen), opts);
    } catch (const json::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
