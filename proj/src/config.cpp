// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

#include "config_internal.hpp"

namespace homwalk
{
using nlohmann::json;

namespace
{
constexpr char const* kDefaultSeed = "5eed";

json measure_json(std::string preset, double scale)
{
    return {{"preset", std::move(preset)}, {"scale", scale}};
}

json diophantine_default() { return measure_json("rot35-unipotent-scaled", 0.05); }

std::string display(std::string const& ptr)
{
    std::string out = ptr.empty() ? std::string("<root>") : ptr.substr(1);
    std::replace(out.begin(), out.end(), '/', '.');
    return out;
}

// Fields whose value replaces the default wholesale instead of merging.
bool replaced_whole(std::string const& ptr)
{
    return ptr == "/measure" || ptr == "/diophantine" || ptr == "/x0"
           || ptr == "/params/target" || ptr == "/params/x_list";
}

// Merges user over defaults with type checks; integers stay integers and
// reals become doubles so the canonical text is stable.
void merge(json& base, json const& user, std::string const& ptr,
           std::vector<std::string>& problems)
{
    for (auto it = user.begin(); it != user.end(); ++it)
    {
        std::string sub = ptr + "/" + it.key();
        if (!base.contains(it.key()))
        {
            problems.push_back(fmt::format("{}: unknown field", display(sub)));
            continue;
        }
        json& b = base[it.key()];
        json const& u = it.value();
        if (replaced_whole(sub))
        {
            b = u;
            continue;
        }
        if (b.is_object())
        {
            if (!u.is_object())
                problems.push_back(fmt::format("{}: expected an object", display(sub)));
            else
                merge(b, u, sub, problems);
            continue;
        }
        auto convert = [&](json const& proto, json const& v, std::string const& p) -> json {
            if (proto.is_number_float())
            {
                if (!v.is_number())
                    problems.push_back(fmt::format("{}: expected a number", display(p)));
                return v.is_number() ? json(v.get<double>()) : proto;
            }
            if (proto.is_number_integer())
            {
                if (v.is_number_integer())
                    return v;
                if (v.is_number_float() && std::nearbyint(v.get<double>()) == v.get<double>()
                    && std::abs(v.get<double>()) < 9e15)
                    return json(static_cast<std::int64_t>(v.get<double>()));
                problems.push_back(fmt::format("{}: expected an integer", display(p)));
                return proto;
            }
            if (proto.is_string())
            {
                if (!v.is_string())
                    problems.push_back(fmt::format("{}: expected a string", display(p)));
                return v.is_string() ? v : proto;
            }
            if (proto.is_boolean())
            {
                if (!v.is_boolean())
                    problems.push_back(fmt::format("{}: expected true or false", display(p)));
                return v.is_boolean() ? v : proto;
            }
            return v;
        };
        if (b.is_array())
        {
            if (!u.is_array())
            {
                problems.push_back(fmt::format("{}: expected an array", display(sub)));
                continue;
            }
            // Empty default arrays hold integers
            json proto = b.empty() ? json(std::int64_t{0}) : b.front();
            json out = json::array();
            for (std::size_t i = 0; i < u.size(); ++i)
                out.push_back(convert(proto, u[i], fmt::format("{}/{}", sub, i)));
            b = std::move(out);
            continue;
        }
        b = convert(b, u, sub);
    }
}

//---------------------------------------------------------------------------//
// Typed reads with range checks; problems are collected, never thrown.
class Fields
{
  public:
    Fields(json const& doc, std::vector<std::string>& problems)
        : doc_(doc), problems_(problems)
    {
    }

    json const& at(std::string const& ptr) const { return doc_.at(json::json_pointer(ptr)); }

    double real(std::string const& ptr, std::function<bool(double)> const& ok = {},
                char const* what = nullptr) const
    {
        double v = at(ptr).get<double>();
        if (!std::isfinite(v) || (ok && !ok(v)))
            fail(ptr, what ? what : "must be finite");
        return v;
    }
    double positive(std::string const& ptr) const
    {
        return real(ptr, [](double v) { return v > 0; }, "must be positive");
    }
    double nonneg(std::string const& ptr) const
    {
        return real(ptr, [](double v) { return v >= 0; }, "must be nonnegative");
    }
    double probability(std::string const& ptr) const
    {
        return real(ptr, [](double v) { return v > 0 && v < 1; }, "must lie in (0, 1)");
    }

    std::int64_t integer(std::string const& ptr, std::int64_t min) const
    {
        auto v = at(ptr).get<std::int64_t>();
        if (v < min)
            fail(ptr, min == 1 ? "must be a positive integer"
                               : fmt::format("must be an integer >= {}", min));
        return v;
    }
    std::size_t count(std::string const& ptr, std::int64_t min = 1) const
    {
        return static_cast<std::size_t>(std::max<std::int64_t>(integer(ptr, min), 0));
    }

    std::vector<double> reals(std::string const& ptr, bool positive_only,
                              std::size_t min_size = 1) const
    {
        std::vector<double> out;
        for (auto const& v : at(ptr))
            out.push_back(v.get<double>());
        if (out.size() < min_size)
            fail(ptr, fmt::format("needs at least {} entries", min_size));
        for (double v : out)
            if (!std::isfinite(v) || (positive_only && v <= 0))
            {
                fail(ptr, positive_only ? "entries must be positive" : "entries must be finite");
                break;
            }
        return out;
    }
    std::vector<int> ints(std::string const& ptr, int min_value, std::size_t min_size = 1) const
    {
        std::vector<int> out;
        bool bad = false;
        for (auto const& v : at(ptr))
        {
            auto i = v.get<std::int64_t>();
            bad |= i < min_value || i > 1'000'000'000;
            out.push_back(static_cast<int>(std::clamp<std::int64_t>(i, min_value, 1'000'000'000)));
        }
        if (out.size() < min_size)
            fail(ptr, fmt::format("needs at least {} entries", min_size));
        if (bad)
            fail(ptr, fmt::format("entries must be integers >= {}", min_value));
        return out;
    }

    void fail(std::string const& ptr, std::string const& msg) const
    {
        problems_.push_back(fmt::format("{}: {}", display(ptr), msg));
    }

  private:
    json const& doc_;
    std::vector<std::string>& problems_;
};

SpacePoint point_spec(Fields const& f, std::string const& ptr)
{
    json const& v = f.at(ptr);
    if (v.is_string() && v.get<std::string>() == "identity")
        return base_point();
    if (!v.is_object())
    {
        f.fail(ptr, "expected \"identity\" or {\"x\", \"y\", \"theta\"}");
        return base_point();
    }
    bool ok = true;
    for (auto it = v.begin(); it != v.end(); ++it)
        if (it.key() != "x" && it.key() != "y" && it.key() != "theta")
        {
            f.fail(ptr + "/" + it.key(), "unknown field");
            ok = false;
        }
    for (char const* k : {"x", "y", "theta"})
        if (!v.contains(k) || !v[k].is_number())
        {
            f.fail(ptr + "/" + k, "expected a number");
            ok = false;
        }
    if (!ok)
        return base_point();
    double y = v["y"].get<double>();
    if (!(y > 0) || !std::isfinite(y))
    {
        f.fail(ptr + "/y", "must be positive");
        return base_point();
    }
    return point_from_iwasawa(v["x"].get<double>(), y, v["theta"].get<double>());
}

FiniteSupportMeasure measure_spec(Fields const& f, std::string const& ptr)
{
    json const& v = f.at(ptr);
    if (!v.is_object())
    {
        f.fail(ptr, "expected an object with \"preset\" or \"atoms\"");
        return {};
    }
    for (auto it = v.begin(); it != v.end(); ++it)
        if (it.key() != "preset" && it.key() != "scale" && it.key() != "atoms"
            && it.key() != "merge_tol")
            f.fail(ptr + "/" + it.key(), "unknown field");
    bool has_preset = v.contains("preset"), has_atoms = v.contains("atoms");
    if (has_preset == has_atoms)
    {
        f.fail(ptr, "give exactly one of \"preset\" or \"atoms\"");
        return {};
    }
    try
    {
        if (has_preset)
        {
            if (!v["preset"].is_string())
            {
                f.fail(ptr + "/preset", "expected a string");
                return {};
            }
            double scale = 1;
            if (v.contains("scale"))
            {
                if (!v["scale"].is_number() || !(v["scale"].get<double>() > 0))
                {
                    f.fail(ptr + "/scale", "must be a positive number");
                    return {};
                }
                scale = v["scale"].get<double>();
            }
            return generator_preset(v["preset"].get<std::string>(), scale);
        }
        if (!v["atoms"].is_array() || v["atoms"].empty())
        {
            f.fail(ptr + "/atoms", "expected a nonempty array");
            return {};
        }
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < v["atoms"].size(); ++i)
        {
            json const& a = v["atoms"][i];
            std::string p = fmt::format("{}/atoms/{}", ptr, i);
            if (!a.is_object() || !a.contains("g") || !a.contains("w") || !a["g"].is_array()
                || a["g"].size() != 4 || !a["w"].is_number())
            {
                f.fail(p, "expected {\"g\": [a, b, c, d], \"w\": weight}");
                return {};
            }
            for (auto const& e : a["g"])
                if (!e.is_number())
                {
                    f.fail(p + "/g", "entries must be numbers");
                    return {};
                }
            GroupElement g{a["g"][0].get<double>(), a["g"][1].get<double>(),
                           a["g"][2].get<double>(), a["g"][3].get<double>()};
            if (std::abs(g.det() - 1) > 1e-9)
            {
                f.fail(p + "/g", fmt::format("determinant {} is not 1", g.det()));
                return {};
            }
            atoms.push_back({g, a["w"].get<double>()});
        }
        double tol = kDefaultMergeTol;
        if (v.contains("merge_tol"))
        {
            if (!v["merge_tol"].is_number() || !(v["merge_tol"].get<double>() >= 0))
            {
                f.fail(ptr + "/merge_tol", "must be a nonnegative number");
                return {};
            }
            tol = v["merge_tol"].get<double>();
        }
        return FiniteSupportMeasure(std::move(atoms), tol);
    }
    catch (Error const& e)
    {
        f.fail(ptr, e.what());
    }
    return {};
}

//---------------------------------------------------------------------------//
json defaults_for(std::string const& e)
{
    json d = {{"experiment", e},
              {"seed", Seed::from_hex(kDefaultSeed).to_string()},
              {"threads", 0},
              {"measure", measure_json("unipotents-rot35", 1.0)},
              {"x0", "identity"},
              {"height", {{"kappa", 1.0}}},
              {"spot_check",
               {{"n", {1, 2, 3}}, {"trials", 20000}, {"sigmas", 3.0}, {"min_fraction", 0.95}}}};
    auto u = [](std::size_t v) { return static_cast<std::int64_t>(v); };
    if (e == "walk")
    {
        WalkParams p;
        d["grids"] = {{"n", {p.n}}};
        d["params"] = {{"index", u(p.index)}};
    }
    else if (e == "diameter")
    {
        DiameterParams p;
        d["grids"] = {{"r", p.r_grid}};
        d["params"] = {{"dedup_factor", p.dedup_factor},
                       {"h_cap_factor", p.h_cap_factor},
                       {"max_layers", p.max_layers}};
        d["budgets"] = {{"nodes", u(p.node_budget)}};
        d["thresholds"] = {{"min_r2", p.min_r2},
                           {"net_exponent", p.net_exponent},
                           {"net_exponent_tol", p.net_exponent_tol}};
    }
    else if (e == "hitting")
    {
        HittingParams p;
        d["grids"] = {{"r", {p.r}}, {"N", json::array()}};
        d["trials"] = u(p.trials);
        d["params"] = {{"haar_points", u(p.haar_points)},
                       {"c_hat", p.c_hat},
                       {"target", "identity"},
                       {"x_list", json::array()}};
        d["thresholds"] = {{"min_prob", p.min_prob}};
    }
    else if (e == "density")
    {
        DensityParams p;
        d["grids"] = {{"r", {p.r}}, {"A", p.a_list}};
        d["trials"] = u(p.trials);
        d["params"] = {{"survival_points", u(p.survival_points)}};
    }
    else if (e == "nondiv")
    {
        NonDivergenceParams p;
        d["grids"] = {{"n", p.n_list}, {"h", p.h_grid}};
        d["trials"] = u(p.trials);
        d["params"] = {{"holdout_trials", u(p.holdout_trials)}};
        d["thresholds"] = {{"max_spread", p.max_spread}, {"holdout_sigmas", p.holdout_sigmas}};
    }
    else if (e == "contraction")
    {
        ContractionParams p;
        d["grids"] = {{"n", p.n_list}};
        d["trials"] = u(p.walk_trials);
        d["params"] = {{"height_lo", p.height_lo},
                       {"height_hi", p.height_hi},
                       {"points", u(p.points)},
                       {"holdout_points", u(p.holdout_points)},
                       {"log_lipschitz_samples", 10000},
                       {"log_lipschitz_margin", 0.1}};
        d["thresholds"] = {{"slack", p.slack},
                           {"min_satisfaction", p.min_satisfaction},
                           {"confidence", p.confidence},
                           {"max_log_lipschitz_violations", 0}};
    }
    else if (e == "flatten")
    {
        FlatteningParams p;
        d["diophantine"] = diophantine_default();
        d["grids"] = {{"n", p.n_list}, {"delta", p.delta_grid}};
        d["params"] = {{"top_atoms", u(p.top_atoms)},
                       {"random_atoms", u(p.random_atoms)},
                       {"perturbations", p.perturbations}};
        d["budgets"] = {{"atoms", u(p.atom_budget)}};
        d["thresholds"] = {{"volume_tolerance", p.volume_tolerance}};
    }
    else if (e == "dimension")
    {
        HighDimensionParams p;
        d["diophantine"] = diophantine_default();
        d["grids"] = {{"n", {p.n}}, {"delta", p.delta_grid}};
        d["params"] = {{"centers", u(p.centers)}, {"max_draws", u(p.max_draws)},
                       {"y_max", p.y_max}};
        d["budgets"] = {{"atoms", u(p.atom_budget)}};
        d["thresholds"] = {{"min_median_slope", p.min_median_slope}};
    }
    else if (e == "smoothed")
    {
        SmoothedParams p;
        d["diophantine"] = diophantine_default();
        d["grids"] = {{"n", {p.n}}, {"delta", {p.delta}}};
        d["params"] = {{"eta", p.eta},
                       {"e1", p.e1},
                       {"kappa1", p.kappa1},
                       {"haar_samples", u(p.haar_samples)},
                       {"y_max", p.y_max},
                       {"functions", u(p.functions)}};
        d["budgets"] = {{"atoms", u(p.atom_budget)}};
        d["thresholds"] = {{"c_hat", p.c_hat}, {"mass_sigmas", p.mass_sigmas}};
    }
    else if (e == "equidist")
    {
        EquidistParams p;
        d["diophantine"] = diophantine_default();
        d["grids"] = {{"beta", p.beta_list}, {"n", p.n_grid}};
        d["trials"] = u(p.trials);
        d["params"] = {{"functions", u(p.functions)},
                       {"bump_radius", p.bump_radius},
                       {"haar_samples", u(p.haar_samples)},
                       {"y_max", p.y_max},
                       {"birkhoff_length", u(p.birkhoff_length)},
                       {"birkhoff_trajectories", u(p.birkhoff_trajectories)}};
        d["thresholds"] = {{"fit_sigmas", p.fit_sigmas},
                           {"min_fit_points", u(p.min_fit_points)},
                           {"confidence", p.confidence},
                           {"birkhoff_sigmas", p.birkhoff_sigmas}};
    }
    else if (e == "gap")
    {
        GapParams p;
        d["grids"] = {{"n", {p.n_max}}};
        d["trials"] = u(p.walk_trials);
        d["params"] = {{"functions", u(p.functions)},
                       {"bump_radius", p.bump_radius},
                       {"haar_count", u(p.haar_count)},
                       {"haar_samples", u(p.haar_samples)},
                       {"y_max", p.y_max}};
        d["thresholds"] = {{"fit_sigmas", p.fit_sigmas},
                           {"min_fit_points", u(p.min_fit_points)},
                           {"confidence", p.confidence},
                           {"c0_sigmas", p.c0_sigmas}};
    }
    else
    {
        throw ValidationError({fmt::format("experiment: unknown name '{}'", e)});
    }
    return d;
}

std::size_t capped(std::size_t v, double cap)
{
    return cap < double(v) ? static_cast<std::size_t>(std::max(cap, 1.0)) : v;
}

}  // namespace

//---------------------------------------------------------------------------//
std::vector<std::string> const& experiment_names()
{
    static std::vector<std::string> const names{
        "walk",        "diameter", "density",   "hitting",  "nondiv", "contraction",
        "flatten",     "dimension", "smoothed", "equidist", "gap"};
    return names;
}

json default_config(std::string const& experiment) { return defaults_for(experiment); }

//---------------------------------------------------------------------------//
// Builders shared by validation and run; each reads the merged document.
namespace detail
{
Built common(Fields const& f, json const& doc)
{
    Built b;
    b.mu = measure_spec(f, "/measure");
    if (doc.contains("diophantine"))
        b.mu_d = measure_spec(f, "/diophantine");
    b.x0 = point_spec(f, "/x0");
    b.height.kappa = f.positive("/height/kappa");
    return b;
}

WalkParams walk(Fields const& f, Built const& b)
{
    WalkParams p;
    auto n = f.ints("/grids/n", 0);
    p.n = n.empty() ? 0 : n.front();
    p.index = static_cast<std::uint64_t>(f.integer("/params/index", 0));
    p.height = b.height;
    return p;
}

DiameterParams diameter(Fields const& f, Built const& b)
{
    DiameterParams p;
    p.r_grid = f.reals("/grids/r", true, 2);
    for (std::size_t i = 1; i < p.r_grid.size(); ++i)
        if (!(p.r_grid[i] < p.r_grid[i - 1]))
        {
            f.fail("/grids/r", "must be strictly decreasing");
            break;
        }
    p.dedup_factor = f.real("/params/dedup_factor", [](double v) { return v >= 1; },
                            "must be >= 1");
    p.h_cap_factor = f.positive("/params/h_cap_factor");
    p.max_layers = static_cast<int>(f.integer("/params/max_layers", 1));
    p.node_budget = f.count("/budgets/nodes");
    p.height = b.height;
    p.min_r2 = f.real("/thresholds/min_r2");
    p.net_exponent = f.real("/thresholds/net_exponent");
    p.net_exponent_tol = f.nonneg("/thresholds/net_exponent_tol");
    return p;
}

HittingParams hitting(Fields const& f, Built const&)
{
    HittingParams p;
    auto r = f.reals("/grids/r", true);
    p.r = r.empty() ? 0.2 : r.front();
    p.n_list = f.ints("/grids/N", 1, 0);
    p.trials = f.count("/trials");
    p.haar_points = f.count("/params/haar_points", 0);
    p.c_hat = f.positive("/params/c_hat");
    p.target = point_spec(f, "/params/target");
    json const& xl = f.at("/params/x_list");
    if (!xl.is_array())
        f.fail("/params/x_list", "expected an array of points");
    else
        for (std::size_t i = 0; i < xl.size(); ++i)
            p.x_list.push_back(point_spec(f, fmt::format("/params/x_list/{}", i)));
    p.min_prob = f.nonneg("/thresholds/min_prob");
    return p;
}

DensityParams density(Fields const& f, Built const& b)
{
    DensityParams p;
    auto r = f.reals("/grids/r", true);
    p.r = r.empty() ? 0.3 : r.front();
    if (p.r >= 1)
        f.fail("/grids/r", "must be below 1");
    p.a_list = f.reals("/grids/A", true);
    p.trials = f.count("/trials");
    p.survival_points = f.count("/params/survival_points");
    p.height = b.height;
    return p;
}

NonDivergenceParams nondiv(Fields const& f, Built const& b)
{
    NonDivergenceParams p;
    p.n_list = f.ints("/grids/n", 0);
    p.h_grid = f.reals("/grids/h", true);
    for (double h : p.h_grid)
        if (h < 1)
        {
            f.fail("/grids/h", "entries must be >= 1");
            break;
        }
    p.trials = f.count("/trials");
    p.holdout_trials = f.count("/params/holdout_trials", 0);
    p.height = b.height;
    p.max_spread = f.real("/thresholds/max_spread", [](double v) { return v >= 1; },
                          "must be >= 1");
    p.holdout_sigmas = f.nonneg("/thresholds/holdout_sigmas");
    return p;
}

ContractionParams contraction(Fields const& f, Built const& b)
{
    ContractionParams p;
    p.n_list = f.ints("/grids/n", 0);
    p.walk_trials = f.count("/trials", 2);
    p.height_lo = f.real("/params/height_lo", [](double v) { return v >= 1; }, "must be >= 1");
    p.height_hi = f.real("/params/height_hi", [&](double v) { return v >= p.height_lo; },
                         "must be >= height_lo");
    p.points = f.count("/params/points", 3);
    p.holdout_points = f.count("/params/holdout_points", 0);
    f.count("/params/log_lipschitz_samples", 0);
    f.nonneg("/params/log_lipschitz_margin");
    p.height = b.height;
    p.slack = f.nonneg("/thresholds/slack");
    p.min_satisfaction = f.real("/thresholds/min_satisfaction",
                                [](double v) { return v >= 0 && v <= 1; },
                                "must lie in [0, 1]");
    p.confidence = f.probability("/thresholds/confidence");
    f.count("/thresholds/max_log_lipschitz_violations", 0);
    return p;
}

FlatteningParams flatten(Fields const& f, Built const&)
{
    FlatteningParams p;
    p.n_list = f.ints("/grids/n", 0);
    p.delta_grid = f.reals("/grids/delta", true);
    p.top_atoms = f.count("/params/top_atoms", 0);
    p.random_atoms = f.count("/params/random_atoms", 0);
    p.perturbations = static_cast<int>(f.integer("/params/perturbations", 0));
    p.atom_budget = f.count("/budgets/atoms");
    p.volume_tolerance = f.nonneg("/thresholds/volume_tolerance");
    return p;
}

HighDimensionParams dimension(Fields const& f, Built const&)
{
    HighDimensionParams p;
    auto n = f.ints("/grids/n", 0);
    p.n = n.empty() ? 0 : n.front();
    p.delta_grid = f.reals("/grids/delta", true, 2);
    p.centers = f.count("/params/centers");
    p.max_draws = f.count("/params/max_draws");
    p.y_max = f.real("/params/y_max", [](double v) { return v > 1; }, "must exceed 1");
    p.atom_budget = f.count("/budgets/atoms");
    p.min_median_slope = f.real("/thresholds/min_median_slope");
    return p;
}

SmoothedParams smoothed(Fields const& f, Built const&)
{
    SmoothedParams p;
    auto n = f.ints("/grids/n", 0);
    p.n = n.empty() ? 0 : n.front();
    auto d = f.reals("/grids/delta", true);
    p.delta = d.empty() ? 0.05 : d.front();
    p.eta = f.positive("/params/eta");
    p.e1 = f.positive("/params/e1");
    p.kappa1 = f.positive("/params/kappa1");
    p.haar_samples = f.count("/params/haar_samples", 2);
    p.y_max = f.real("/params/y_max", [](double v) { return v > 1; }, "must exceed 1");
    p.functions = f.count("/params/functions");
    p.atom_budget = f.count("/budgets/atoms");
    p.c_hat = f.positive("/thresholds/c_hat");
    p.mass_sigmas = f.nonneg("/thresholds/mass_sigmas");
    return p;
}

EquidistParams equidist(Fields const& f, Built const&)
{
    EquidistParams p;
    p.beta_list = f.reals("/grids/beta", false);
    for (double b : p.beta_list)
        if (b < 0)
        {
            f.fail("/grids/beta", "entries must be nonnegative");
            break;
        }
    p.n_grid = f.ints("/grids/n", 0);
    p.trials = f.count("/trials", 2);
    p.functions = f.count("/params/functions");
    p.bump_radius = f.positive("/params/bump_radius");
    p.haar_samples = f.count("/params/haar_samples", 2);
    p.y_max = f.real("/params/y_max", [](double v) { return v > 1; }, "must exceed 1");
    p.birkhoff_length = f.count("/params/birkhoff_length", 0);
    p.birkhoff_trajectories = f.count("/params/birkhoff_trajectories", 0);
    p.fit_sigmas = f.nonneg("/thresholds/fit_sigmas");
    p.min_fit_points = f.count("/thresholds/min_fit_points", 3);
    p.confidence = f.probability("/thresholds/confidence");
    p.birkhoff_sigmas = f.nonneg("/thresholds/birkhoff_sigmas");
    return p;
}

GapParams gap(Fields const& f, Built const&)
{
    GapParams p;
    auto n = f.ints("/grids/n", 1);
    p.n_max = n.empty() ? 1 : *std::max_element(n.begin(), n.end());
    p.walk_trials = f.count("/trials");
    p.functions = f.count("/params/functions");
    p.bump_radius = f.positive("/params/bump_radius");
    p.haar_count = f.count("/params/haar_count", 2);
    p.haar_samples = f.count("/params/haar_samples", 2);
    p.y_max = f.real("/params/y_max", [](double v) { return v > 1; }, "must exceed 1");
    p.fit_sigmas = f.nonneg("/thresholds/fit_sigmas");
    p.min_fit_points = f.count("/thresholds/min_fit_points", 3);
    p.confidence = f.probability("/thresholds/confidence");
    p.c0_sigmas = f.nonneg("/thresholds/c0_sigmas");
    return p;
}

SpotCheckParams spot(Fields const& f)
{
    SpotCheckParams p;
    p.n_list = f.ints("/spot_check/n", 0);
    for (int n : p.n_list)
        if (n > 3)
        {
            f.fail("/spot_check/n", "entries must be at most 3");
            break;
        }
    p.trials = f.count("/spot_check/trials", 2);
    p.sigmas = f.positive("/spot_check/sigmas");
    p.min_fraction = f.real("/spot_check/min_fraction",
                            [](double v) { return v >= 0 && v <= 1; }, "must lie in [0, 1]");
    return p;
}

// Validates the whole experiment section, discarding the typed values.
void validate(std::string const& e, Fields const& f, json const& doc)
{
    auto b = common(f, doc);
    spot(f);
    if (e == "walk")
        walk(f, b);
    else if (e == "diameter")
        diameter(f, b);
    else if (e == "hitting")
        hitting(f, b);
    else if (e == "density")
        density(f, b);
    else if (e == "nondiv")
        nondiv(f, b);
    else if (e == "contraction")
        contraction(f, b);
    else if (e == "flatten")
        flatten(f, b);
    else if (e == "dimension")
        dimension(f, b);
    else if (e == "smoothed")
        smoothed(f, b);
    else if (e == "equidist")
        equidist(f, b);
    else if (e == "gap")
        gap(f, b);
}
}  // namespace detail

//---------------------------------------------------------------------------//
RunConfig parse_config(std::string_view text, std::string_view experiment)
{
    json user;
    try
    {
        user = json::parse(text.begin(), text.end());
    }
    catch (json::parse_error const& e)
    {
        throw ParseError(fmt::format("config: {}", e.what()));
    }
    if (!user.is_object())
        throw ValidationError({"<root>: expected a JSON object"});

    std::string name(experiment);
    if (user.contains("experiment"))
    {
        if (!user["experiment"].is_string())
            throw ValidationError({"experiment: expected a string"});
        auto given = user["experiment"].get<std::string>();
        if (!name.empty() && given != name)
            throw ValidationError({fmt::format(
                "experiment: config names '{}' but '{}' was requested", given, name)});
        name = given;
    }
    if (name.empty())
        throw ValidationError({"experiment: missing"});
    auto const& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ValidationError({fmt::format("experiment: unknown name '{}'", name)});

    std::vector<std::string> problems;
    json doc = defaults_for(name);
    merge(doc, user, "", problems);

    RunConfig cfg;
    cfg.experiment_ = name;
    try
    {
        cfg.seed_ = Seed::from_hex(doc["seed"].get<std::string>());
        doc["seed"] = cfg.seed_.to_string();
    }
    catch (Error const& e)
    {
        problems.push_back(fmt::format("seed: {}", e.what()));
    }
    if (doc["threads"].get<std::int64_t>() < 0)
        problems.push_back("threads: must be a nonnegative integer");
    cfg.threads_ = static_cast<int>(std::max<std::int64_t>(doc["threads"].get<std::int64_t>(), 0));

    // Canonical forms of replaced fields
    if (doc["measure"].is_object() && doc["measure"].contains("preset")
        && !doc["measure"].contains("scale"))
        doc["measure"]["scale"] = 1.0;
    if (doc.contains("diophantine") && doc["diophantine"].is_object()
        && doc["diophantine"].contains("preset") && !doc["diophantine"].contains("scale"))
        doc["diophantine"]["scale"] = 1.0;

    if (problems.empty())
    {
        Fields f(doc, problems);
        detail::validate(name, f, doc);
    }
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    cfg.doc_ = std::move(doc);
    return cfg;
}

std::string RunConfig::canonical() const
{
    json d = doc_;
    d.erase("threads");
    return d.dump();
}

std::uint64_t RunConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical())
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string RunConfig::hash_hex() const { return fmt::format("{:016x}", hash()); }

FiniteSupportMeasure RunConfig::measure() const
{
    std::vector<std::string> problems;
    Fields f(doc_, problems);
    auto m = measure_spec(f, "/measure");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return m;
}

std::optional<FiniteSupportMeasure> RunConfig::diophantine_measure() const
{
    if (!doc_.contains("diophantine"))
        return std::nullopt;
    std::vector<std::string> problems;
    Fields f(doc_, problems);
    auto m = measure_spec(f, "/diophantine");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return m;
}

SpacePoint RunConfig::x0() const
{
    std::vector<std::string> problems;
    Fields f(doc_, problems);
    return point_spec(f, "/x0");
}

HeightParams RunConfig::height() const
{
    return HeightParams{doc_.at("height").at("kappa").get<double>()};
}

void RunConfig::set_seed(Seed s)
{
    seed_ = s;
    doc_["seed"] = s.to_string();
}

void RunConfig::set_threads(int t)
{
    threads_ = std::max(t, 0);
    doc_["threads"] = threads_;
}

void RunConfig::cap_budgets_mb(double mb)
{
    if (!(mb > 0) || !doc_.contains("budgets"))
        return;
    double bytes = mb * 1024 * 1024;
    auto& b = doc_["budgets"];
    // Convolution holds every product plus the merged copy
    if (b.contains("atoms"))
        b["atoms"] = static_cast<std::int64_t>(
            capped(b["atoms"].get<std::size_t>(), bytes / (2 * sizeof(Atom))));
    // A BFS candidate is a point plus its key and parity bookkeeping
    if (b.contains("nodes"))
        b["nodes"] = static_cast<std::int64_t>(
            capped(b["nodes"].get<std::size_t>(), bytes / 96));
}

//---------------------------------------------------------------------------//
std::string config_reference()
{
    std::string out = R"(homwalk configuration reference

A config is one JSON object. Every field is optional; missing fields take the
defaults listed below for the chosen experiment. Unknown fields are errors.

Common fields
  experiment    subcommand name; must match the subcommand when both are given
  seed          "HEX[:STREAM]", up to 32 hex digits; --seed overrides it
  threads       worker threads, 0 = all cores; never changes results and is
                left out of the config hash
  measure       {"preset": NAME, "scale": S} or
                {"atoms": [{"g": [a, b, c, d], "w": W}, ...], "merge_tol": T}
  diophantine   small-support measure, same forms as measure
  x0            "identity" or {"x": X, "y": Y, "theta": THETA}
  height.kappa  exponent of the height function
  grids         experiment grids (r, delta, n, N, h, A, beta)
  trials        Monte Carlo trials per grid point
  budgets       atom and BFS node budgets; HOMWALK_BUDGET_MB lowers them
  params        experiment settings
  thresholds    verdict thresholds
  spot_check    exact-convolution cross-check settings used by --spot-check

Presets: )";
    for (std::size_t i = 0; i < preset_names().size(); ++i)
        out += (i ? ", " : "") + preset_names()[i];
    out += "\n\nThe config hash is FNV-1a 64 over the canonical JSON (sorted keys, no\n"
           "whitespace, threads removed) after defaults are filled in.\n";
    for (auto const& e : experiment_names())
        out += fmt::format("\nDefaults for {}\n{}\n", e, defaults_for(e).dump(2));
    return out;
}

//---------------------------------------------------------------------------//
// Internal hooks used by run.cpp
namespace detail
{
Typed typed(RunConfig const& cfg)
{
    std::vector<std::string> problems;
    Fields f(cfg.doc(), problems);
    Typed t{common(f, cfg.doc()), spot(f)};
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return t;
}

template<class P, class F>
P typed_params(RunConfig const& cfg, Built const& b, F&& fn)
{
    std::vector<std::string> problems;
    Fields f(cfg.doc(), problems);
    P p = fn(f, b);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return p;
}

#define HOMWALK_TYPED(NAME, TYPE)                                                \
    TYPE NAME##_params(RunConfig const& cfg, Built const& b)                     \
    {                                                                            \
        return typed_params<TYPE>(cfg, b, [](Fields const& f, Built const& bb) { \
            return NAME(f, bb);                                                  \
        });                                                                      \
    }
HOMWALK_TYPED(walk, WalkParams)
HOMWALK_TYPED(diameter, DiameterParams)
HOMWALK_TYPED(hitting, HittingParams)
HOMWALK_TYPED(density, DensityParams)
HOMWALK_TYPED(nondiv, NonDivergenceParams)
HOMWALK_TYPED(contraction, ContractionParams)
HOMWALK_TYPED(flatten, FlatteningParams)
HOMWALK_TYPED(dimension, HighDimensionParams)
HOMWALK_TYPED(smoothed, SmoothedParams)
HOMWALK_TYPED(equidist, EquidistParams)
HOMWALK_TYPED(gap, GapParams)
#undef HOMWALK_TYPED
}  // namespace detail

}  // namespace homwalk
