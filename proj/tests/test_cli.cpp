#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "stokeslab");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = stokeslab::cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string tmp(const std::string& name) { return "cli_test_" + name; }

}  // namespace

TEST_CASE("graph: degenerate and real parameters are config errors") {
    const Run r = run({"graph", "--a=-1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("degenerate parameter") != std::string::npos);
    CHECK(run({"graph", "--a=0"}).code == 2);
    CHECK(run({"graph", "--a=3"}).code == 2);
    CHECK(run({"graph", "--a=1+"}).code == 2);
}

TEST_CASE("graph: five critical arcs in CSV, JSON and SVG") {
    const Run r = run({"graph", "--a=-3+2i", "--svg", tmp("g.svg"), "--csv", tmp("g.csv"), "--json", tmp("g.json")});
    REQUIRE(r.code == 0);
    const std::string svg = slurp(tmp("g.svg"));
    CHECK(svg.rfind("<?xml", 0) == 0);
    int arcs = 0;
    for (std::size_t p = svg.find("<title>"); p != std::string::npos; p = svg.find("<title>", p + 1))
        if (svg.compare(p + 7, 5, "gamma") == 0 || svg.compare(p + 7, 5, "sigma") == 0) ++arcs;
    CHECK(arcs >= 5);
    const std::string csv = slurp(tmp("g.csv"));
    CHECK(csv.rfind("arc,kind,s,re_z,im_z,re_w,im_w\n", 0) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp("g.json")));
    CHECK(j["arcs"].size() == 5);
    CHECK(j["arcs"][1]["terminal"] == "origin");
    CHECK(j["arcs"][1].contains("winding_angle"));
}

TEST_CASE("graph: orthogonal arcs for A = 4i") {
    const Run r = run({"graph", "--a=4i", "--orthogonal", "--svg", tmp("o.svg")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("winding angle") != std::string::npos);
    CHECK(r.out.find("closed-loop") != std::string::npos);
    CHECK(slurp(tmp("o.svg")).find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("figure1: defaults and two overlays") {
    const Run r = run({"figure1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("n = 30:") != std::string::npos);
    const Run two = run({"figure1", "--n", "20,40", "--json", tmp("f.json"), "--svg", tmp("f.svg")});
    REQUIRE(two.code == 0);
    CHECK(two.out.find("distance decreases from n = 20 to n = 40") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(tmp("f.json")));
    CHECK(j["runs"][1]["plus_side"] == 0);
    CHECK(j["runs"][1]["zeros"].size() == 40);
    CHECK(slurp(tmp("f.svg")).find("zeros, n = 40") != std::string::npos);
}

TEST_CASE("flag syntax and unknown options") {
    CHECK(run({"graph", "--bogus"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"lag-eval", "--n", "3", "--z", "1e0+2.5E-1i", "--alpha=-5e-1"}).code == 0);
    CHECK(run({"lag-eval", "--n", "3", "--z", "1", "--alpha", "1", "--a=1+i"}).code == 2);
    CHECK(run({"--version"}).code == 0);
}

TEST_CASE("config files reject unknown keys") {
    {
        std::ofstream f(tmp("bad.toml"));
        f << "[graph]\na = \"1+i\"\ncolour = 3\n";
    }
    CHECK(run({"--config", tmp("bad.toml"), "graph"}).code == 2);
    {
        std::ofstream f(tmp("good.toml"));
        f << "[graph]\na = \"1+i\"\n";
    }
    const Run r = run({"--config", tmp("good.toml"), "graph"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("A = 1 + 1i", 0) == 0);
}

TEST_CASE("precision variable is validated") {
    setenv("STOKESLAB_PRECISION", "twelve", 1);
    CHECK(run({"lag-eval", "--n", "3", "--z", "1"}).code == 2);
    setenv("STOKESLAB_PRECISION", "40", 1);
    const Run r = run({"lag-eval", "--n", "3", "--z", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("(40 digits") != std::string::npos);
    unsetenv("STOKESLAB_PRECISION");
}

TEST_CASE("lag-zeros and lag-eval agree") {
    const Run z = run({"lag-zeros", "--n", "6", "--alpha", "0.5+2i", "--json", tmp("z.json")});
    REQUIRE(z.code == 0);
    const auto j = nlohmann::json::parse(slurp(tmp("z.json")));
    REQUIRE(j["zeros"].size() == 6);
    const double re = j["zeros"][0][0], im = j["zeros"][0][1];
    char point[96];
    std::snprintf(point, sizeof point, "%.17g%+.17gi", re, im);
    const Run e = run({"lag-eval", "--n", "6", "--alpha", "0.5+2i", "--z", point, "--json", tmp("e.json")});
    REQUIRE(e.code == 0);
    const auto ej = nlohmann::json::parse(slurp(tmp("e.json")));
    CHECK(double(ej["points"][0]["log_abs"]) < std::log(1e-8));
}

TEST_CASE("measure, gfun and ortho-test") {
    const Run m = run({"measure", "--check", "--csv", tmp("m.csv")});
    CHECK(m.code == 0);
    CHECK(m.out.find("equilibrium conditions: hold") != std::string::npos);
    CHECK(slurp(tmp("m.csv")).rfind("t,u,re_z,im_z,density,weight\n", 0) == 0);
    const Run g = run({"gfun", "--z", "4+4i;-6", "--variant", "phi-tilde"});
    CHECK(g.code == 0);
    CHECK(run({"gfun", "--z", "1", "--variant", "psi"}).code == 2);
    const Run o = run({"ortho-test", "--n", "3", "--a=1+i"});
    CHECK(o.code == 0);
    CHECK(o.out.find("orthogonality holds") != std::string::npos);
    // an impossible tolerance is a check failure, not a config error
    CHECK(run({"ortho-test", "--n", "3", "--a=1+i", "--tol", "1e-30"}).code == 1);
}

TEST_CASE("asymp-compare writes the error table and decay fits") {
    const Run r = run({"asymp-compare", "--n", "20,40", "--grid", "-6,6,-4,8,7,7", "--csv", tmp("a.csv"), "--json",
                       tmp("a.json")});
    REQUIRE(r.code == 0);
    CHECK(slurp(tmp("a.csv")).rfind("n,re_z,im_z,regime,log10_rel_error\n", 0) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp("a.json")));
    const double e = j["decay_fits"]["outer"]["exponent"];
    CHECK(e > 0.7);
    CHECK(e < 1.3);
    CHECK(run({"asymp-compare", "--grid", "1,2,3"}).code == 2);
}

TEST_CASE("verify: quick subset, JSON report and tolerance validation") {
    const Run r = run({"verify", "--a=-3+2i", "--quick", "--json", tmp("v.json")});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(tmp("v.json")));
    CHECK(j["pass"] == true);
    CHECK(j["checks"].size() == 7);
    CHECK(run({"verify", "--tol-period=-1e-8"}).code == 2);
    CHECK(run({"verify", "--a=-1"}).code == 2);
    // a tolerance nothing can meet makes the suite fail
    CHECK(run({"verify", "--only", "1", "--tol-period", "1e-300"}).code == 1);
}
