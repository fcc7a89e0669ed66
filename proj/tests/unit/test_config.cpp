// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <doctest.h>

#include "homwalk/config.hpp"
#include "homwalk/errors.hpp"

using namespace homwalk;
namespace fs = std::filesystem;

namespace
{
std::vector<std::string> problems_of(std::string const& text, std::string const& exp = {})
{
    try
    {
        parse_config(text, exp);
    }
    catch (ValidationError const& e)
    {
        return e.problems();
    }
    return {};
}

bool mentions(std::vector<std::string> const& problems, std::string const& field)
{
    for (auto const& p : problems)
        if (p.rfind(field + ":", 0) == 0)
            return true;
    return false;
}

std::string slurp(fs::path const& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(std::string const& name)
{
    auto p = fs::temp_directory_path() / ("homwalk_test_" + name);
    fs::remove_all(p);
    return p;
}

constexpr char const* kTinyDiameter
    = R"({"experiment": "diameter", "grids": {"r": [0.6, 0.5]}, "seed": "abc:2"})";
}  // namespace

TEST_CASE("minimal config takes documented defaults")
{
    auto cfg = parse_config("{}", "diameter");
    auto const& d = cfg.doc();
    CHECK(d["grids"]["r"] == nlohmann::json({0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05}));
    CHECK(d["measure"]["preset"] == "unipotents-rot35");
    CHECK(d["x0"] == "identity");
    CHECK(d["thresholds"]["min_r2"] == 0.9);
    CHECK(cfg.experiment() == "diameter");

    auto nd = parse_config(R"({"experiment": "nondiv"})");
    CHECK(nd.doc()["trials"] == 100000);
    CHECK(nd.doc()["grids"]["n"] == nlohmann::json({50, 100, 200}));
    CHECK(nd.doc()["grids"]["h"] == nlohmann::json({1.0, 2.0, 4.0, 8.0, 16.0}));

    for (auto const& e : experiment_names())
        CHECK_NOTHROW(parse_config("{}", e));
}

TEST_CASE("negative trials names the field")
{
    auto p = problems_of(R"({"trials": -5})", "nondiv");
    REQUIRE(p.size() == 1);
    CHECK(mentions(p, "trials"));
}

TEST_CASE("every violation is listed")
{
    auto p = problems_of(R"({"trials": -1, "grids": {"n": "x", "h": [0.5]},
                             "bogus": 1, "seed": "zz", "x0": {"x": 0, "y": -1, "theta": 0}})",
                         "nondiv");
    CHECK(mentions(p, "grids.n"));
    CHECK(mentions(p, "bogus"));
    CHECK(mentions(p, "seed"));
    // Range checks run once the document is well-typed
    auto q = problems_of(R"({"trials": -1, "grids": {"h": [0.5]},
                             "x0": {"x": 0, "y": -1, "theta": 0}})",
                         "nondiv");
    CHECK(mentions(q, "trials"));
    CHECK(mentions(q, "grids.h"));
    CHECK(mentions(q, "x0.y"));
    CHECK(q.size() == 3);
}

TEST_CASE("malformed JSON and experiment mismatches")
{
    CHECK_THROWS_AS(parse_config("{\"trials\": ", "nondiv"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "gap"})", "nondiv"), ValidationError);
    CHECK_THROWS_AS(parse_config("{}"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "nope"})"), ValidationError);
    CHECK(mentions(problems_of(R"({"measure": {"preset": "nope"}})", "walk"), "measure"));
    CHECK(mentions(problems_of(R"({"measure": {"atoms": [{"g": [2, 0, 0, 1], "w": 1}]}})",
                               "walk"),
                   "measure.atoms.0.g"));
    CHECK(mentions(problems_of(R"({"grids": {"r": [0.2, 0.3]}})", "diameter"), "grids.r"));
}

TEST_CASE("canonical form round-trips")
{
    auto a = parse_config(R"({"experiment": "equidist", "trials": 1e3,
                              "measure": {"preset": "unipotents-rot35"},
                              "x0": {"x": 0.1, "y": 1.5, "theta": 0.2}})");
    CHECK(a.doc()["trials"].is_number_integer());
    CHECK(a.doc()["measure"]["scale"] == 1.0);
    auto b = parse_config(a.canonical());
    CHECK(b.canonical() == a.canonical());
    CHECK(b.hash() == a.hash());
    CHECK(a.hash_hex().size() == 16);

    auto atoms = parse_config(R"({"measure": {"atoms": [
        {"g": [1, 0.5, 0, 1], "w": 0.5}, {"g": [1, -0.5, 0, 1], "w": 0.5}]}})",
                              "walk");
    CHECK(atoms.measure().size() == 2);
    CHECK(parse_config(atoms.canonical()).canonical() == atoms.canonical());
}

TEST_CASE("threads stay out of the hash and the seed does not")
{
    auto a = parse_config(kTinyDiameter);
    auto b = a;
    b.set_threads(3);
    CHECK(a.hash() == b.hash());
    b.set_seed(Seed::from_hex("abd"));
    CHECK(a.hash() != b.hash());
    CHECK(a.seed() == Seed::from_hex("abc:2"));
}

TEST_CASE("memory cap lowers budgets")
{
    auto cfg = parse_config("{}", "diameter");
    cfg.cap_budgets_mb(1);
    CHECK(cfg.doc()["budgets"]["nodes"].get<std::int64_t>() == 1024 * 1024 / 96);
    auto big = parse_config("{}", "diameter");
    big.cap_budgets_mb(1e9);
    CHECK(big.doc()["budgets"]["nodes"] == 50000000);
}

TEST_CASE("cells use 17 significant digits")
{
    CHECK(format_cell(0.1) == "0.10000000000000001");
    CHECK(format_cell(std::int64_t{-3}) == "-3");
    CHECK(format_cell(std::string("a,b")) == "\"a,b\"");
    Table t{"t", {"a", "b"}, {}};
    t.add({1.5, std::int64_t{2}});
    CHECK(table_csv(t) == "a,b\n1.5,2\n");
    CHECK_THROWS_AS(t.add({1.0}), Error);
}

TEST_CASE("run writes manifest, CSVs and summary deterministically")
{
    auto cfg = parse_config(kTinyDiameter);
    auto d1 = scratch("run1"), d2 = scratch("run2");
    // Two radii are too few for the fit, so verdicts fail but nothing errors
    int code = run(cfg, d1);
    CHECK(code == 2);
    auto cfg2 = cfg;
    cfg2.set_threads(2);
    CHECK(run(cfg2, d2) == code);

    std::set<std::string> files;
    for (auto const& e : fs::directory_iterator(d1))
        files.insert(e.path().filename().string());
    CHECK(files
          == std::set<std::string>{"manifest.json", "diameter.csv", "diameter_layers.csv",
                                   "summary.jsonl"});
    CHECK(slurp(d1 / "diameter.csv") == slurp(d2 / "diameter.csv"));
    CHECK(slurp(d1 / "diameter_layers.csv") == slurp(d2 / "diameter_layers.csv"));
    CHECK(slurp(d1 / "summary.jsonl") == slurp(d2 / "summary.jsonl"));

    auto manifest = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    CHECK(manifest["config_hash"] == cfg.hash_hex());
    CHECK(manifest["seed"] == cfg.seed().to_string());
    CHECK(manifest["partial"] == false);
    CHECK(manifest["status"] == "verdict_failure");
    CHECK(manifest["exit_code"] == 2);
    CHECK(manifest["versions"].contains("homwalk"));
    CHECK(manifest.contains("wall_clock_seconds"));

    std::istringstream lines(slurp(d1 / "summary.jsonl"));
    std::string line, last;
    while (std::getline(lines, line))
    {
        auto j = nlohmann::json::parse(line);
        CHECK(j["config_hash"] == cfg.hash_hex());
        last = line;
    }
    CHECK(nlohmann::json::parse(last)["kind"] == "summary");
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("verdict failures and errors map to exit codes")
{
    // A net exponent nobody can meet
    auto bad = parse_config(R"({"grids": {"r": [0.6, 0.5, 0.4]},
                                "thresholds": {"net_exponent": 5, "net_exponent_tol": 0.1}})",
                            "diameter");
    auto d = scratch("verdict");
    CHECK(run(bad, d) == 2);
    CHECK(nlohmann::json::parse(slurp(d / "manifest.json"))["status"] == "verdict_failure");
    fs::remove_all(d);

    // Atom budget below what the convolution needs
    auto err = parse_config(R"({"grids": {"n": [0, 3]}, "budgets": {"atoms": 10}})", "flatten");
    auto e = scratch("error");
    CHECK(run(err, e) == 1);
    CHECK_FALSE(fs::exists(e / "flatten.csv"));
    CHECK(nlohmann::json::parse(slurp(e / "manifest.json"))["status"] == "error");
    fs::remove_all(e);
}

TEST_CASE("spot-check mode adds exact cross-checks")
{
    auto cfg = parse_config(R"({"grids": {"n": [3]}, "spot_check": {"trials": 3000}})", "walk");
    auto rep = run_report(cfg, RunOptions{true});
    CHECK(rep.find_scalar("spot_checks") == 12);
    CHECK(rep.find_verdict("spot_check_fraction") != nullptr);
}

TEST_CASE("config reference lists every experiment")
{
    auto text = config_reference();
    for (auto const& e : experiment_names())
        CHECK(text.find("Defaults for " + e) != std::string::npos);
}

TEST_CASE("equidistribution error matches exact convolution on a three-atom measure")
{
    auto cfg = parse_config(R"({"measure": {"atoms": [
        {"g": [1, 0.4, 0, 1], "w": 0.3},
        {"g": [1, 0, -0.4, 1], "w": 0.3},
        {"g": [0.6, -0.8, 0.8, 0.6], "w": 0.4}]},
        "spot_check": {"trials": 20000}})",
                            "equidist");
    auto rep = spot_check_report(cfg);
    CHECK(rep.find_scalar("spot_checks") == 12);
    CHECK(rep.find_verdict("spot_check_fraction")->pass);
}
