// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <boost/version.hpp>
#include <fmt/core.h>
#include <gsl/gsl_version.h>
#include <omp.h>

#include "homwalk/config.hpp"
#include "homwalk/errors.hpp"

#include "config_internal.hpp"

#ifndef HOMWALK_VERSION
#    define HOMWALK_VERSION "unknown"
#endif

namespace homwalk
{
using nlohmann::json;

namespace
{
std::vector<Observable> function_observables(std::size_t count)
{
    std::vector<Observable> out;
    for (auto const& f : default_test_functions(count))
        out.push_back({f.label(), [f](SpacePoint const& p) { return f(p); }});
    return out;
}

void add_ball_indicators(std::vector<Observable>& out, SpacePoint const& center,
                         std::vector<double> const& radii)
{
    for (double r : radii)
    {
        auto q = std::make_shared<BallQuery const>(center, r);
        out.push_back({fmt::format("dist_lt_{}", r),
                       [q](SpacePoint const& p) { return q->distance(p) < q->radius(); }});
    }
}

void add_height_indicators(std::vector<Observable>& out, std::vector<double> const& hs,
                           HeightParams hp)
{
    for (double h : hs)
        out.push_back({fmt::format("ht_ge_{}", h),
                       [h, hp](SpacePoint const& p) { return height(p, hp) >= h; }});
    out.push_back({"height", [hp](SpacePoint const& p) { return height(p, hp); }});
}

// Observables matched to what each experiment measures.
std::vector<Observable> spot_observables(RunConfig const& cfg, detail::Built const& b)
{
    auto const& e = cfg.experiment();
    std::vector<Observable> out = function_observables(2);
    if (e == "diameter" || e == "density" || e == "hitting" || e == "walk")
        add_ball_indicators(out, b.x0, {0.3, 0.6});
    else if (e == "nondiv" || e == "contraction")
        add_height_indicators(out, {1.05, 1.3}, b.height);
    else if (e == "flatten" || e == "dimension" || e == "smoothed")
        add_ball_indicators(out, b.x0, {0.05, 0.1});
    else
        for (auto& o : function_observables(4))
            if (out.size() < 4)
                out.push_back(std::move(o));
    return out;
}

json fit_json(FitRecord const& f)
{
    auto const& o = f.fit;
    bool has_se = o.dof > 0 && std::isfinite(o.slope_se);
    double nan = std::numeric_limits<double>::quiet_NaN();
    return {{"kind", "fit"},
            {"name", f.name},
            {"x", f.x},
            {"y", f.y},
            {"slope", o.slope},
            {"intercept", o.intercept},
            {"r2", o.r2},
            {"slope_se", o.slope_se},
            {"intercept_se", o.intercept_se},
            {"n", o.n},
            {"dof", o.dof},
            {"confidence", f.confidence},
            {"slope_lower", has_se ? o.slope_lower(f.confidence) : nan},
            {"slope_upper", has_se ? o.slope_upper(f.confidence) : nan}};
}

std::string csv_escape(std::string const& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(fmt::format("cannot write {}", path.string()));
    os << text;
    if (!os)
        throw Error(fmt::format("write failed for {}", path.string()));
}

std::string table_file(std::string const& experiment, std::string const& table)
{
    if (table == experiment || table.rfind(experiment + "_", 0) == 0)
        return table + ".csv";
    return experiment + "_" + table + ".csv";
}

json versions()
{
    return {{"homwalk", HOMWALK_VERSION},
            {"compiler", __VERSION__},
            {"boost", BOOST_LIB_VERSION},
            {"gsl", GSL_VERSION},
            {"fmt", FMT_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                          NLOHMANN_JSON_VERSION_MINOR,
                                          NLOHMANN_JSON_VERSION_PATCH)},
            {"openmp", _OPENMP}};
}
}  // namespace

//---------------------------------------------------------------------------//
std::string format_cell(Cell const& c)
{
    if (auto const* i = std::get_if<std::int64_t>(&c))
        return fmt::format("{}", *i);
    if (auto const* d = std::get_if<double>(&c))
        return fmt::format("{:.17g}", *d + 0.0);  // prints -0 as 0
    return csv_escape(std::get<std::string>(c));
}

std::string table_csv(Table const& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + csv_escape(t.columns[i]);
    out += '\n';
    for (auto const& row : t.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
                out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

//---------------------------------------------------------------------------//
ExperimentReport run_report(RunConfig const& cfg, RunOptions const& options)
{
    if (cfg.threads() > 0)
        omp_set_num_threads(cfg.threads());
    auto t0 = std::chrono::steady_clock::now();
    auto typed = detail::typed(cfg);
    auto const& b = typed.b;
    auto const& e = cfg.experiment();
    Seed const& seed = cfg.seed();
    auto need_d = [&]() -> FiniteSupportMeasure const& {
        if (!b.mu_d)
            throw ValidationError({"diophantine: required by this experiment"});
        return *b.mu_d;
    };

    ExperimentReport rep;
    if (e == "walk")
        rep = walk_experiment(b.mu, b.x0, detail::walk_params(cfg, b), seed);
    else if (e == "diameter")
        rep = diameter_estimate(b.mu, b.x0, detail::diameter_params(cfg, b), seed);
    else if (e == "hitting")
        rep = hitting_probability(b.mu, b.x0, detail::hitting_params(cfg, b), seed);
    else if (e == "density")
        rep = density_probability(b.mu, b.x0, detail::density_params(cfg, b), seed);
    else if (e == "nondiv")
        rep = non_divergence(b.mu, b.x0, detail::nondiv_params(cfg, b), seed);
    else if (e == "contraction")
    {
        rep = contraction_check(b.mu, detail::contraction_params(cfg, b), seed);
        auto const& d = cfg.doc();
        auto samples = d.at("params").at("log_lipschitz_samples").get<std::size_t>();
        if (samples > 0)
        {
            double margin = d.at("params").at("log_lipschitz_margin").get<double>();
            auto limit = d.at("thresholds").at("max_log_lipschitz_violations").get<std::size_t>();
            auto ll = height_log_lipschitz(samples, margin, b.height, seed);
            rep.scalar("log_lipschitz_samples", double(ll.samples));
            rep.scalar("log_lipschitz_worst_excess", ll.worst_excess);
            rep.verdict("log_lipschitz", ll.violations <= limit, double(ll.violations),
                        double(limit),
                        fmt::format("|log ht(g p) / ht(p)| <= 2 d(g, I) + {}", margin));
        }
    }
    else if (e == "flatten")
        rep = flattening_estimate(need_d(), detail::flatten_params(cfg, b), seed);
    else if (e == "dimension")
        rep = high_dimension(need_d(), b.x0, detail::dimension_params(cfg, b), seed);
    else if (e == "smoothed")
        rep = smoothed_density_check(need_d(), b.x0, detail::smoothed_params(cfg, b), seed);
    else if (e == "equidist")
        rep = equidistribution_error(b.mu, b.mu_d ? &*b.mu_d : nullptr, b.x0,
                                     detail::equidist_params(cfg, b), seed);
    else if (e == "gap")
        rep = spectral_gap_estimate(b.mu, detail::gap_params(cfg, b), seed);
    else
        throw ValidationError({fmt::format("experiment: unknown name '{}'", e)});

    if (options.spot_check)
    {
        auto spot = spot_check_report(cfg);
        for (auto& t : spot.tables)
            rep.tables.push_back(std::move(t));
        rep.scalars.insert(rep.scalars.end(), spot.scalars.begin(), spot.scalars.end());
        rep.verdicts.insert(rep.verdicts.end(), spot.verdicts.begin(), spot.verdicts.end());
        rep.note += spot.note;
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ExperimentReport spot_check_report(RunConfig const& cfg)
{
    if (cfg.threads() > 0)
        omp_set_num_threads(cfg.threads());
    auto typed = detail::typed(cfg);
    auto const& b = typed.b;
    auto const& e = cfg.experiment();
    bool diophantine = e == "flatten" || e == "dimension" || e == "smoothed";
    if (diophantine && !b.mu_d)
        throw ValidationError({"diophantine: required by this experiment"});
    auto const& mu = diophantine ? *b.mu_d : b.mu;
    ExperimentReport rep;
    rep.name = e;
    if (mu.size() > typed.spot.max_atoms)
        rep.note = fmt::format("spot check skipped: measure has {} atoms, limit {}. ", mu.size(),
                               typed.spot.max_atoms);
    else
        spot_check(mu, b.x0, spot_observables(cfg, b), typed.spot, cfg.seed(), rep);
    return rep;
}

int run(RunConfig const& cfg, std::filesystem::path const& out_dir, RunOptions const& options)
{
    namespace fs = std::filesystem;
    json manifest = {{"experiment", cfg.experiment()},
                     {"config_hash", cfg.hash_hex()},
                     {"seed", cfg.seed().to_string()},
                     {"versions", versions()},
                     {"threads", cfg.threads() > 0 ? cfg.threads() : omp_get_max_threads()},
                     {"kappa", cfg.height().kappa},
                     {"merge_tol", kDefaultMergeTol},
                     {"spot_check", options.spot_check},
                     {"config", cfg.doc()}};
    auto write_manifest = [&](fs::path const& dir) {
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    };

    ExperimentReport rep;
    try
    {
        fs::create_directories(out_dir);
        rep = run_report(cfg, options);
    }
    catch (std::exception const& ex)
    {
        manifest["status"] = "error";
        manifest["error"] = ex.what();
        manifest["partial"] = true;
        manifest["exit_code"] = 1;
        manifest["files"] = json::array();
        try
        {
            if (fs::is_directory(out_dir))
                write_manifest(out_dir);
        }
        catch (std::exception const&)
        {
        }
        return 1;
    }

    try
    {
        json files = json::array({"manifest.json"});
        for (auto const& t : rep.tables)
        {
            auto name = table_file(cfg.experiment(), t.name);
            write_text(out_dir / name, table_csv(t));
            files.push_back(name);
        }
        std::string lines;
        json base = {{"experiment", cfg.experiment()},
                     {"config_hash", cfg.hash_hex()},
                     {"seed", cfg.seed().to_string()}};
        auto emit = [&](json j) {
            j.update(base);
            lines += j.dump() + "\n";
        };
        for (auto const& f : rep.fits)
            emit(fit_json(f));
        for (auto const& s : rep.scalars)
            emit({{"kind", "scalar"}, {"name", s.first}, {"value", s.second}});
        std::size_t failed = 0;
        for (auto const& v : rep.verdicts)
        {
            failed += !v.pass;
            emit({{"kind", "verdict"},
                  {"name", v.name},
                  {"pass", v.pass},
                  {"value", v.value},
                  {"threshold", v.threshold},
                  {"detail", v.detail}});
        }
        emit({{"kind", "summary"},
              {"passed", failed == 0},
              {"verdicts", rep.verdicts.size()},
              {"failed", failed},
              {"partial", rep.partial},
              {"note", rep.note}});
        write_text(out_dir / "summary.jsonl", lines);
        files.push_back("summary.jsonl");

        int code = failed ? 2 : 0;
        manifest["status"] = failed ? "verdict_failure" : "ok";
        manifest["partial"] = rep.partial;
        manifest["note"] = rep.note;
        manifest["wall_clock_seconds"] = rep.wall_seconds;
        manifest["exit_code"] = code;
        manifest["files"] = files;
        write_manifest(out_dir);
        return code;
    }
    catch (std::exception const& ex)
    {
        manifest["status"] = "error";
        manifest["error"] = ex.what();
        manifest["partial"] = true;
        manifest["exit_code"] = 1;
        try
        {
            write_manifest(out_dir);
        }
        catch (std::exception const&)
        {
        }
        return 1;
    }
}

}  // namespace homwalk
