// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "experiments.hpp"
#include "measures.hpp"
#include "rng.hpp"

namespace homwalk
{
//! Experiment names, one per CLI subcommand.
std::vector<std::string> const& experiment_names();

/*!
 * Validated run configuration.
 *
 * `doc` holds the full canonical JSON with every default filled in; the
 * typed accessors below read from it. Keys are sorted on output, and the
 * hash is FNV-1a 64 over the canonical text without the "threads" field,
 * which never affects results.
 */
class RunConfig
{
  public:
    std::string const& experiment() const { return experiment_; }
    Seed const& seed() const { return seed_; }
    int threads() const { return threads_; }
    nlohmann::json const& doc() const { return doc_; }

    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    FiniteSupportMeasure measure() const;
    //! Small-support measure when the config names one.
    std::optional<FiniteSupportMeasure> diophantine_measure() const;
    SpacePoint x0() const;
    HeightParams height() const;

    void set_seed(Seed s);
    void set_threads(int t);
    //! Lowers the atom and node budgets to fit a memory cap in MiB.
    void cap_budgets_mb(double mb);

    friend RunConfig parse_config(std::string_view text, std::string_view experiment);

  private:
    std::string experiment_;
    Seed seed_;
    int threads_{0};
    nlohmann::json doc_;
};

/*!
 * Parses canonical JSON, merges it over the experiment defaults and
 * validates every field.
 *
 * The experiment comes from the "experiment" field or, when that is absent,
 * from the argument; if both are given they must agree. Throws ParseError
 * for malformed JSON and ValidationError listing every problem with its
 * field path.
 */
RunConfig parse_config(std::string_view text, std::string_view experiment = {});

//! Full default configuration of one experiment.
nlohmann::json default_config(std::string const& experiment);

//! Reference page: fields, meanings and per-experiment defaults.
std::string config_reference();

//---------------------------------------------------------------------------//
struct RunOptions
{
    bool spot_check{false};
};

/*!
 * Runs the configured experiment and writes manifest.json, one CSV per
 * table and summary.jsonl into out_dir.
 *
 * Returns 0 when every verdict passes, 2 when a verdict fails and 1 on
 * error. Partial results (budget exhaustion) are flagged in the manifest.
 */
int run(RunConfig const& config, std::filesystem::path const& out_dir,
        RunOptions const& options = {});

//! Runs the experiment without writing files.
ExperimentReport run_report(RunConfig const& config, RunOptions const& options = {});

/*!
 * Exact-convolution cross-check of the config's walk measure alone, with the
 * observables --spot-check would add to the experiment. Experiments on the
 * small-support measure check that one.
 */
ExperimentReport spot_check_report(RunConfig const& config);

//! Float formatting used in every CSV: 17 significant digits.
std::string format_cell(Cell const& c);
std::string table_csv(Table const& t);

}  // namespace homwalk
