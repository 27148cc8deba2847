#include <doctest.h>

#include "hopf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace hopf::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run call(std::vector<std::string> args) {
    args.insert(args.begin(), "hopf_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hopf_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

double value_after(const std::string& text, const std::string& label) {
    const auto pos = text.find(label + " = ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + label.size() + 3));
}

}  // namespace

TEST_CASE("bounds prints kappa = sqrt(3) at a=1, alpha=0, sigma=1") {
    const Run r = call({"bounds", "--a", "1", "--alpha", "0", "--sigma", "1"});
    CHECK(r.code == 0);
    CHECK(std::abs(value_after(r.out, "kappa") - std::sqrt(3.0)) <= 1e-12);
    CHECK(std::abs(value_after(r.out, "lambda_sum") - -3.1915382432114614235) <= 1e-12);
    CHECK(r.out.find("small_shear = yes") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic and carries the config hash") {
    const fs::path d1 = scratch("sim1"), d2 = scratch("sim2"), d3 = scratch("sim3");
    REQUIRE(call({"simulate", "--seed", "7", "--T", "2", "--out", d1.string()}).code == 0);
    REQUIRE(call({"simulate", "--seed", "7", "--T", "2", "--threads", "3", "--out", d2.string()}).code == 0);
    REQUIRE(call({"simulate", "--seed", "8", "--T", "2", "--out", d3.string()}).code == 0);
    const std::string a = slurp(d1 / "trajectory.csv"), b = slurp(d2 / "trajectory.csv"), c = slurp(d3 / "trajectory.csv");
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.rfind("# config_hash=", 0) == 0);
    CHECK(a.substr(0, a.find('\n')) != c.substr(0, c.find('\n')));
    CHECK(a.find("\nt,x,y\n") != std::string::npos);
    for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

TEST_CASE("written config reproduces the run") {
    const fs::path d1 = scratch("cfg1"), d2 = scratch("cfg2");
    REQUIRE(call({"simulate", "--seed", "3", "--T", "1", "--alpha", "-0.5", "--b", "4", "--tangent", "--out",
                  d1.string()})
                .code == 0);
    REQUIRE(call({"simulate", "--config", (d1 / "config.json").string(), "--out", d2.string()}).code == 0);
    CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    CHECK(slurp(d1 / "tangent.csv") == slurp(d2 / "tangent.csv"));
    CHECK(slurp(d1 / "config.json").find("\"alpha\": -0.5") != std::string::npos);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("config round trip and hash") {
    RunConfig c = defaults_for("pullback");
    c.alpha = -0.125;
    c.checkpoints = {1.5, 10.0};
    c.seed = 18446744073709551615ULL;
    const RunConfig back = merge_json(RunConfig{}, to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.seed == c.seed);

    RunConfig moved = c;
    moved.out = "elsewhere";
    moved.threads = 7;
    CHECK(config_hash(moved) == config_hash(c));
    moved.dt = 5e-4;
    CHECK(config_hash(moved) != config_hash(c));
    CHECK(config_hash(c).size() == 16);

    CHECK_THROWS_AS(merge_json(c, R"({"alpa": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(merge_json(c, R"({"seed": 1.5})"), std::invalid_argument);
    CHECK_THROWS_AS(merge_json(c, R"({"alpha": "one"})"), std::invalid_argument);
    CHECK_THROWS_AS(merge_json(c, "[1, 2]"), std::invalid_argument);
    CHECK_THROWS_AS(merge_json(c, "{"), std::invalid_argument);
    CHECK_THROWS_AS(merge_json(c, R"({"command": "sweep"})"), std::invalid_argument);
    CHECK(merge_json(c, R"({"alpha": 2})").alpha == 2.0);
}

TEST_CASE("flags override the config file") {
    const fs::path d = scratch("override");
    fs::create_directories(d);
    std::ofstream(d / "c.json") << R"({"alpha": 0.0, "sigma": 1.0, "a": 2.0})";
    const Run r = call({"bounds", "--config", (d / "c.json").string(), "--a", "1"});
    CHECK(r.code == 0);
    CHECK(std::abs(value_after(r.out, "kappa") - std::sqrt(3.0)) <= 1e-12);
    fs::remove_all(d);
}

TEST_CASE("exit codes") {
    SUBCASE("unknown flag prints usage, exit 1") {
        const Run r = call({"bounds", "--bogus", "1"});
        CHECK(r.code == 1);
        CHECK(r.err.find("Usage") != std::string::npos);
    }
    SUBCASE("flag from another subcommand is unknown") { CHECK(call({"bounds", "--bins", "3"}).code == 1); }
    SUBCASE("missing or unknown subcommand") {
        CHECK(call({}).code == 1);
        CHECK(call({"plot"}).code == 1);
    }
    SUBCASE("help exits 0") { CHECK(call({"--help"}).code == 0); }
    SUBCASE("validation errors exit 1") {
        CHECK(call({"bounds", "--a", "-1"}).code == 1);
        CHECK(call({"bounds", "--sigma", "0"}).code == 1);
        CHECK(call({"simulate", "--dt", "0", "--out", scratch("bad").string()}).code == 1);
        CHECK(call({"sweep", "--grid", "0:10", "--out", scratch("bad").string()}).code == 1);
        CHECK(call({"bounds", "--alpha", "abc"}).code == 1);
        CHECK(call({"bounds", "--config", "/nonexistent/c.json"}).code == 1);
    }
    SUBCASE("blow-up exits 2") {
        const Run r = call({"simulate", "--b", "20", "--dt", "0.2", "--T", "50", "--out", scratch("blow").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("blow-up") != std::string::npos);
    }
    fs::remove_all(scratch("bad"));
    fs::remove_all(scratch("blow"));
}

TEST_CASE("verify passes on this build") {
    const Run r = call({"verify"});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("literature K off by 2 pi exp") != std::string::npos);
}

TEST_CASE("sweep and pullback outputs do not depend on --threads") {
    const fs::path d1 = scratch("sw1"), d2 = scratch("sw2");
    const std::vector<std::string> sweep = {"sweep", "--grid", "0:8:3,-1:1:2", "--T", "300", "--seeds", "1",
                                            "--refine-T", "400"};
    auto with = [](std::vector<std::string> v, std::vector<std::string> extra) {
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    REQUIRE(call(with(sweep, {"--threads", "1", "--out", d1.string()})).code == 0);
    REQUIRE(call(with(sweep, {"--threads", "4", "--out", d2.string()})).code == 0);
    CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
    CHECK(slurp(d1 / "contour.csv") == slurp(d2 / "contour.csv"));
    CHECK(slurp(d1 / "sweep.csv").find("\nalpha,b,lambda_top,ci,certified\n") != std::string::npos);

    const std::vector<std::string> pull = {"pullback", "--alpha", "-1", "--n", "50", "--T", "10", "--checkpoints", "2,5"};
    REQUIRE(call(with(pull, {"--threads", "1", "--out", d1.string()})).code == 0);
    REQUIRE(call(with(pull, {"--threads", "3", "--out", d2.string()})).code == 0);
    for (const char* f : {"diameters.csv", "cloud_T2.csv", "cloud_T5.csv", "cloud_T10.csv", "cloud_initial.csv"})
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("density, lyapunov and ftle write their tables") {
    const fs::path d = scratch("tables");
    Run r = call({"density", "--alpha", "1", "--n", "11", "--out", d.string()});
    REQUIRE(r.code == 0);
    const std::string density = slurp(d / "density.csv");
    CHECK(std::count(density.begin(), density.end(), '\n') == 13);

    r = call({"lyapunov", "--alpha", "-1", "--b", "0.5", "--T", "300", "--out", d.string()});
    REQUIRE(r.code == 0);
    CHECK(value_after(r.out, "lambda_top") < 0.0);
    CHECK(slurp(d / "top.csv").find("\nvalue,ci,T,n\n") != std::string::npos);

    r = call({"ftle", "--alpha", "-1", "--b", "0.5", "--n", "20", "--T", "2", "--out", d.string()});
    REQUIRE(r.code == 0);
    CHECK(value_after(r.out, "max ftle_sup") <= -1.0);
    fs::remove_all(d);
}
