#include <CLI11.hpp>
#include <cstdio>

#include "dreg/commands.hpp"
#include "dreg/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dreg: two-stage distribution regression via kernel mean embeddings"};
    app.require_subcommand(1);

    dreg::CommandOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_out = false, have_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)")
            ->each([&](const std::string&) { have_out = true; });
        sub->add_option("--seed", seed, "seed override (overrides config)")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--jobs", opts.jobs, "max concurrent trials")->default_val(1);
    };

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic two-stage dataset");
    CLI::App* fit = app.add_subcommand("fit", "fit one estimator and report metrics");
    CLI::App* rates = app.add_subcommand("rates", "n-sweep rate benchmark under a schedule");
    CLI::App* sweep_n = app.add_subcommand("sweep-n", "risk versus bag size N at fixed n");
    for (CLI::App* sub : {generate, fit, rates, sweep_n}) add_common(sub);

    CLI11_PARSE(app, argc, argv);
    if (have_out) opts.out_dir = out_dir;
    if (have_seed) opts.seed = seed;

    try {
        if (generate->parsed()) return dreg::cmd_generate(opts);
        if (fit->parsed()) return dreg::cmd_fit(opts);
        if (rates->parsed()) return dreg::cmd_rates(opts);
        return dreg::cmd_sweep_N(opts);
    } catch (const dreg::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return dreg::kExitValidation;
    } catch (const dreg::input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return dreg::kExitValidation;
    } catch (const dreg::divergence_error& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return dreg::kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return dreg::kExitRuntime;
    }
}
