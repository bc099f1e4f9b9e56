#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "torwave/cli.hpp"

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "torwave");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = torwave::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "torwave_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("lattice command")
{
    const auto r = run({"lattice", "--m", "325", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["N"] == 24);

    const auto empty = run({"lattice", "--m", "3"});
    CHECK(empty.code == 0);
    CHECK(nlohmann::json::parse(empty.out)["N"] == 0);
}

TEST_CASE("validation failures exit with 2 and a single line")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"lattice"},
             {"lattice", "--m", "0"},
             {"mc", "--m", "25", "--trials", "10", "--ensemble", "cauchy"},
             {"mc", "--m", "3", "--trials", "10"},
             {"count", "--m", "25", "--curve", "oval:1,1,0.5,0.5"},
             {"count", "--m", "25", "--points-per-lambda", "4"},
             {"tail", "--replay", "/nonexistent/file.csv", "--m", "25"},
             {"repulsion", "--m", "25", "--trials", "100", "--alpha", "0.1", "--beta", "0.1"},
             {"frobnicate"},
         }) {
        const auto r = run(args);
        INFO(args[0]);
        CHECK(r.code == 2);
        CHECK(r.err.size() > 0);
        CHECK(r.err.find('\n') == r.err.size() - 1);
    }
}

TEST_CASE("mc output is identical for any worker count")
{
    const auto dir = scratch_dir();
    const auto a = dir / "w1.csv", b = dir / "w8.csv";
    const std::vector<std::string> base = {"mc", "--m", "25", "--curve", "circle:0.5,0.5", "--ensemble", "gaussian",
                                           "--trials", "20000", "--seed", "42", "--format", "csv"};
    auto one = base, eight = base;
    one.insert(one.end(), {"--workers", "1", "--out", a.string()});
    eight.insert(eight.end(), {"--workers", "8", "--out", b.string()});
    REQUIRE(run(one).code == 0);
    REQUIRE(run(eight).code == 0);
    const std::string csv = slurp(a);
    CHECK(csv == slurp(b));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 20001);
}

TEST_CASE("replay reproduces derived statistics")
{
    const auto dir = scratch_dir();
    const auto csv = dir / "trials.csv";
    const auto json = dir / "report.json";
    const std::vector<std::string> base = {"mc", "--m", "65", "--trials", "1000", "--seed", "5", "--eps", "0.1,0.25"};
    auto as_csv = base, as_json = base;
    as_csv.insert(as_csv.end(), {"--format", "csv", "--out", csv.string()});
    as_json.insert(as_json.end(), {"--out", json.string()});
    REQUIRE(run(as_csv).code == 0);
    REQUIRE(run(as_json).code == 0);
    const std::string report = slurp(json);

    const auto from_csv = run({"replay", csv.string(), "--m", "65", "--eps", "0.1,0.25"});
    CHECK(from_csv.code == 0);
    CHECK(from_csv.out == report);
    const auto tail = run({"tail", "--replay", csv.string(), "--m", "65", "--eps", "0.1,0.25"});
    CHECK(tail.out == report);
    const auto from_json = run({"replay", json.string()});
    CHECK(from_json.out == report);
    CHECK(run({"replay", csv.string()}).code == 2);

    const auto lattice = dir / "lattice.json";
    REQUIRE(run({"lattice", "--m", "1105", "--out", lattice.string()}).code == 0);
    CHECK(run({"replay", lattice.string()}).out == slurp(lattice));
}

TEST_CASE("other commands produce JSON")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"curve-validate", "--curve", "oval:2,1,0.5,0.5"},
             {"count", "--m", "65", "--seed", "3", "--trial", "2", "--classify"},
             {"count", "--m", "65", "--certified"},
             {"repulsion", "--m", "25", "--trials", "10000", "--alpha", "0.3", "--beta", "0.3"},
             {"sieve", "--m", "65", "--samples", "5"},
             {"variance-term", "--m", "25", "--curve", "oval:2,1,0.5,0.5"},
             {"universality", "--m", "5", "--trials", "10000", "--versus", "uniform"},
             {"scan", "--m-list", "5,65", "--eps", "0.2", "--trials", "200"},
             {"perturb", "--m", "65", "--samples", "3"},
         }) {
        const auto r = run(args);
        INFO(args[0]);
        CHECK(r.code == 0);
        CHECK(nlohmann::json::accept(r.out));
    }
}

TEST_CASE("acceptance presets")
{
    CHECK(run({"accept", "unknown"}).code == 2);
    const auto ok = run({"accept", "angular-measure"});
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("[PASS] C02", 0) == 0);
    const auto list = run({"accept", "--list"});
    CHECK(list.out.find("mean-m25") != std::string::npos);
    CHECK(list.out.find("lattice-exhaustive") != std::string::npos);
}

}
