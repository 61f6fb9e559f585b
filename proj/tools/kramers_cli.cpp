#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kramers/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::vector<double> hs, betas;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out", flags.out_dir, "output directory override");
    cmd->add_option("--seed", flags.seed, "seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--threads", flags.threads, "worker thread override");
    auto* h = cmd->add_option("--h", flags.hs, "h override (repeatable)");
    cmd->add_option("--beta", flags.betas, "beta override (repeatable)")
        ->excludes(h);
}

kramers::ExperimentConfig load(const CommonFlags& flags) {
    kramers::ExperimentConfig cfg =
        kramers::parse_config(kramers::load_json_file(flags.config_path));
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.threads > 0) cfg.threads = flags.threads;
    if (!flags.hs.empty() && !flags.betas.empty())
        throw kramers::UsageError("give either --h or --beta, not both");
    if (!flags.hs.empty()) cfg.hs = flags.hs;
    if (!flags.betas.empty()) {
        cfg.hs.clear();
        for (double b : flags.betas) {
            if (b <= 0.0) throw kramers::UsageError("beta must be positive");
            cfg.hs.push_back(2.0 / b);
        }
    }
    for (double h : cfg.hs)
        if (h <= 0.0) throw kramers::UsageError("h must be positive");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-temperature exit-event toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    int (*driver)(const kramers::ExperimentConfig&) = nullptr;

    auto hook = [&](CLI::App* cmd, int (*fn)(const kramers::ExperimentConfig&)) {
        add_common(cmd, flags);
        cmd->callback([&driver, fn]() { driver = fn; });
    };
    hook(app.add_subcommand("check", "hypothesis verdicts and witnesses"),
         kramers::cmd_check);
    hook(app.add_subcommand("spectrum", "eigenvalues, eigenvectors, counts"),
         kramers::cmd_spectrum);
    hook(app.add_subcommand("asymptotics",
                            "rate and exit-density asymptotics vs PDE"),
         kramers::cmd_asymptotics);
    hook(app.add_subcommand("mc", "Monte Carlo exit ensemble and fit tests"),
         kramers::cmd_mc);
    hook(app.add_subcommand("hyperdyn",
                            "boost-identity comparison of two ensembles"),
         kramers::cmd_hyperdyn);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits 0, parse errors exit 2
    }

    try {
        return driver(load(flags));
    } catch (const kramers::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const kramers::KramersError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
