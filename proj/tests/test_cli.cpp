#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string("\"") + SOBTRACE_CLI + "\" " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::current_path() / ("cli_out_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

double field_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("norm on the square reports the weak norm 4 and a violated infinity end") {
    const auto r = run("norm --gallery cube2 --field inv_d --p 1 --q inf");
    CHECK(r.code == 0);
    CHECK(field_after(r.out, "weak norm estimate") == doctest::Approx(4.0).epsilon(0.01));
    CHECK(r.out.find("AC_VIOLATED_AT_INFINITY") != std::string::npos);
}

TEST_CASE("norm of a CSV sample at (2,2) equals the L2 norm") {
    const auto dir = fresh_dir("csv");
    {
        std::ofstream f(dir / "f.csv");
        f << "value,measure\n1,1\n2,0.5\n3,0.25\n";
    }
    const auto r = run("norm --csv \"" + (dir / "f.csv").string() + "\" --p 2 --q 2 --json --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "norm.json"));
    const double l2 = std::sqrt(1.0 + 4.0 * 0.5 + 9.0 * 0.25);
    CHECK(j["rearranged_form"].get<double>() == doctest::Approx(l2).epsilon(1e-9));
    CHECK(j["distribution_form"].get<double>() == doctest::Approx(l2).epsilon(1e-9));

    {
        std::ofstream f(dir / "signed.csv");
        f << "value,measure\n1,1\n-2,0.5\n";
    }
    CHECK(run("norm --csv \"" + (dir / "signed.csv").string() + "\" --p 2 --q 2").code == 2);
}

TEST_CASE("punctured disc ratio is AC consistent") {
    const auto r = run("norm --gallery punctured_ball2 --field hardy_ratio");
    CHECK(r.code == 0);
    CHECK(r.out.find("AC_CONSISTENT") != std::string::npos);
}

TEST_CASE("verify exit codes") {
    const auto dir = fresh_dir("verify");
    auto r = run("verify --only cube-weak-norm --json --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "verify.json"));
    REQUIRE(j.size() == 1);
    CHECK(j[0]["id"] == "cube-weak-norm");
    CHECK(j[0]["pass"] == true);

    r = run("verify --only lorentz-props");
    CHECK(r.code == 1);
    CHECK(run("verify --only no-such-id").code == 2);
}

TEST_CASE("argument errors exit nonzero") {
    CHECK(run("norm --gallery cube2 --p 0.5").code == 2);
    CHECK(run("norm --gallery no_such_domain").code != 0);
    CHECK(run("norm --csv /nonexistent/file.csv").code != 0);
    CHECK(run("frobnicate").code != 0);
}

TEST_CASE("profile at a single s") {
    const auto r = run("profile --gallery skyscrapers --s 0.5");
    CHECK(r.code == 0);
    CHECK(r.out.find("s,witness_perimeter,analytic_bound") != std::string::npos);
}

TEST_CASE("render writes SVG files") {
    const auto dir = fresh_dir("render");
    const auto r = run("render --gallery rooms_and_passages --h 0.0078125 --out \"" + dir.string() + "\"");
    CHECK(r.code == 0);
    const auto svg = slurp(dir / "rooms_and_passages.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(fs::exists(dir / "rooms_and_passages_grid.svg"));
    CHECK(fs::exists(dir / "rooms_and_passages_grid.csv"));
}

TEST_CASE("scan finds the vanishing sequence on the squares stack") {
    const auto r = run("scan --gallery squares_stack");
    CHECK(r.code == 0);
    CHECK(r.out.find("VIOLATED_SEQUENCE_FOUND") != std::string::npos);
}

TEST_CASE("artifacts are byte-identical across runs") {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    for (const auto& d : {a, b}) {
        CHECK(run("scan --gallery squares_stack --seed 7 --out \"" + d.string() + "\"").code == 0);
        CHECK(run("verify --only cube-distribution --json --out \"" + d.string() + "\"").code == 0);
        CHECK(run("norm --gallery crocodile --field bump --json --out \"" + d.string() + "\"").code == 0);
    }
    for (const char* name : {"scan_squares_stack.csv", "verify.json", "norm.json"}) {
        const auto x = slurp(a / name);
        CHECK(!x.empty());
        CHECK(x == slurp(b / name));
    }
}
