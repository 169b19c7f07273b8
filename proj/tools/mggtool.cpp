#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mgg/report.hpp"
#include "mgg/types.hpp"

int main(int argc, char** argv) {
    CLI::App app{"exterior-solution verification tool"};
    std::string config_path, scenario, out_dir, format;
    int threads = 0;
    long long seed = -1;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--scenario", scenario,
                   "generate | expand | flux | poisson | legendre | verify-all");
    app.add_option("--out", out_dir, "output directory (default .)");
    app.add_option("--format", format, "json | csv");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--seed", seed, "seed for sampled checks");
    CLI11_PARSE(app, argc, argv);

    try {
        mgg::RunConfig cfg;
        if (!config_path.empty()) cfg = mgg::RunConfig::load_file(config_path);
        if (!scenario.empty()) cfg.scenario = scenario;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        if (threads > 0) cfg.threads = threads;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.validate();

        const mgg::Report report = mgg::run(cfg);
        mgg::emit(report, cfg.out_dir, cfg.format);

        int failed = 0;
        for (const auto& c : report.checks)
            if (!c.pass) {
                std::fprintf(stderr, "FAIL %s: value %.17g, tolerance %.17g\n",
                             c.name.c_str(), c.value, c.tolerance);
                ++failed;
            }
        for (const auto& c : report.coefficients)
            if (!c.pass) {
                std::fprintf(stderr, "FAIL %s: value %.17g vs oracle %.17g\n",
                             c.name.c_str(), c.value,
                             c.oracle ? *c.oracle : 0.0);
                ++failed;
            }
        std::printf("%s: %zu checks, %d failed, %.2f s\n",
                    cfg.scenario.c_str(), report.checks.size(), failed,
                    report.wall_clock_seconds);
        return report.all_pass() ? 0 : 1;
    } catch (const mgg::ConfigInvalid& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
