// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "homwalk/config.hpp"
#include "homwalk/errors.hpp"

namespace
{
struct Flags
{
    std::string config;
    std::string out;
    std::string seed;
    int threads{-1};
    bool spot_check{false};
};

int run_subcommand(std::string const& experiment, Flags const& flags)
{
    using namespace homwalk;
    std::string text = "{}";
    if (!flags.config.empty())
    {
        std::ifstream is(flags.config, std::ios::binary);
        if (!is)
        {
            fmt::print(stderr, "error: cannot read config {}\n", flags.config);
            return 1;
        }
        std::ostringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    try
    {
        auto cfg = parse_config(text, experiment);
        if (!flags.seed.empty())
            cfg.set_seed(Seed::from_hex(flags.seed));
        if (flags.threads >= 0)
            cfg.set_threads(flags.threads);
        if (char const* mb = std::getenv("HOMWALK_BUDGET_MB"))
        {
            char* end = nullptr;
            double v = std::strtod(mb, &end);
            if (end == mb || *end != '\0' || !(v > 0))
            {
                fmt::print(stderr, "error: HOMWALK_BUDGET_MB must be a positive number\n");
                return 1;
            }
            cfg.cap_budgets_mb(v);
        }
        int code = run(cfg, flags.out, RunOptions{flags.spot_check});
        if (code == 1)
            fmt::print(stderr, "error: run failed, see {}/manifest.json\n", flags.out);
        else
            fmt::print("{}: {} (config {}), results in {}\n", experiment,
                       code == 0 ? "all verdicts passed" : "verdict failure", cfg.hash_hex(),
                       flags.out);
        return code;
    }
    catch (ValidationError const& e)
    {
        fmt::print(stderr, "error: invalid config\n");
        for (auto const& p : e.problems())
            fmt::print(stderr, "  {}\n", p);
        return 1;
    }
    catch (std::exception const& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random walks on SL(2,R)/SL(2,Z): orbit density, heights, dimension and "
                 "equidistribution experiments"};
    app.require_subcommand(1);
    app.footer("Run `homwalk config-reference` for every config field and default.");

    Flags flags;
    std::string selected;
    for (auto const& name : homwalk::experiment_names())
    {
        auto* sub = app.add_subcommand(name, fmt::format("run the {} experiment", name));
        sub->add_option("--config", flags.config, "JSON config; missing fields take defaults")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory")->required();
        sub->add_option("--seed", flags.seed, "seed HEX[:STREAM], overrides the config");
        sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--spot-check", flags.spot_check,
                      "cross-check Monte Carlo means against exact convolutions");
        sub->footer(fmt::format("Defaults:\n{}", homwalk::default_config(name).dump(2)));
        sub->callback([&selected, name] { selected = name; });
    }
    auto* ref = app.add_subcommand("config-reference", "print the config reference page");
    std::string ref_out;
    ref->add_option("--out", ref_out, "write to a file instead of stdout");
    ref->callback([&selected] { selected = "config-reference"; });

    CLI11_PARSE(app, argc, argv);

    if (selected == "config-reference")
    {
        auto text = homwalk::config_reference();
        if (ref_out.empty())
        {
            fmt::print("{}", text);
            return 0;
        }
        std::ofstream os(ref_out, std::ios::binary);
        os << text;
        return os ? 0 : 1;
    }
    return run_subcommand(selected, flags);
}
