// Black-box tests of the command-line binary. The binary path is passed as
// the first program argument by the build system.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "heunsym/config_io.hpp"

namespace {

std::string g_binary;

struct RunResult {
    int exit_code;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const std::string out_path = "/tmp/heunsym_cli_test_out.txt";
    const std::string cmd =
        '"' + g_binary + "\" " + args + " > " + out_path + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    int code = -1;
    if (raw != -1 && WIFEXITED(raw)) code = WEXITSTATUS(raw);
    return {code, slurp(out_path)};
}

const std::string kBaseFlags =
    "--phi 0.7853981633974483 --chi 0.3,0.5,-0.2,0.1 --lambda 1.5-0.25i";

} // namespace

TEST_CASE("eval normalization at the origin") {
    const auto r = run_cli("eval --phi 0.7853981633974483 --chi 0,0,0,0 "
                           "--lambda 1+0i --z 0");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "F1=1+0i\ndF1=0+0i\nF2=0+0i\ndF2=1+0i\n");
}

TEST_CASE("verify exits 0 on the constant-solution configuration") {
    const auto r = run_cli("verify --phi 0.7853981633974483 --chi 0,0,0,0 "
                           "--lambda 0+0i");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("wronskian") != std::string::npos);
    CHECK(r.out.find("lagrange") != std::string::npos);
}

TEST_CASE("table output is deterministic and well formed") {
    const auto a = run_cli("table " + kBaseFlags + " --grid 0.1:0.8:4,0:6.0:5");
    const auto b = run_cli("table " + kBaseFlags + " --grid 0.1:0.8:4,0:6.0:5");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("re_z,im_z,re_F1,im_F1,re_F2,im_F2,"
                      "wronskian_residual,ode_residual\n",
                      0) == 0);
    int lines = 0;
    for (char c : a.out)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 4 * 5);
    CHECK(a.out.find("\r") == std::string::npos);
}

TEST_CASE("table supports exterior grids") {
    const auto r =
        run_cli("table " + kBaseFlags + " --grid 1.3:2.0:2,0.3:1.0:2 --terms 600");
    CHECK(r.exit_code == 0);
    int lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 4);
}

TEST_CASE("mobius scale round-trips the configuration") {
    const std::string cfg_path = "/tmp/heunsym_cli_roundtrip.cfg";
    const auto fwd =
        run_cli("mobius " + kBaseFlags + " --map scale --map-value 2+0i --output " +
                cfg_path);
    REQUIRE(fwd.exit_code == 0);
    const auto back =
        run_cli("mobius --config " + cfg_path + " --map scale --map-value 0.5+0i");
    REQUIRE(back.exit_code == 0);

    std::ofstream(cfg_path, std::ios::binary) << back.out;
    const auto kv = heunsym::read_key_values(cfg_path);
    const auto cfg = heunsym::config_from_kv(kv);
    CHECK(std::abs(cfg.phi - 0.7853981633974483) < 1e-14);
    CHECK(std::abs(cfg.lambda - heunsym::cplx(1.5, -0.25)) < 1e-14);
    CHECK(std::abs(cfg.chis[1] - 0.5) < 1e-14);
}

TEST_CASE("connect reports per-point coefficients with small gaps") {
    const auto r = run_cli("connect " + kBaseFlags);
    REQUIRE(r.exit_code == 0);
    for (int j = 1; j <= 4; ++j) {
        const std::string tag = "j=" + std::to_string(j) + " Gamma1=";
        CHECK(r.out.find(tag) != std::string::npos);
    }
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find("verification_gap=");
        REQUIRE(pos != std::string::npos);
        CHECK(std::stod(line.substr(pos + 17)) < 1e-7);
    }
}

TEST_CASE("exit code 2 on malformed input") {
    CHECK(run_cli("eval " + kBaseFlags + " --z 1.0+bogus").exit_code == 2);
    CHECK(run_cli("frobnicate " + kBaseFlags).exit_code == 2);
    CHECK(run_cli("eval --chi 0,0,0,0 --lambda 1+0i --z 0").exit_code == 2);
    CHECK(run_cli("eval --config /nonexistent/path.cfg --z 0").exit_code == 2);
    CHECK(run_cli("table " + kBaseFlags + " --grid oops").exit_code == 2);
    CHECK(run_cli("eval " + kBaseFlags + " --z 0 --terms 5").exit_code == 2);
}

TEST_CASE("exit code 3 on numeric failure") {
    // the grid radius gap around the singular circle is a numeric-domain error
    CHECK(run_cli("table " + kBaseFlags + " --grid 0.5:1.0:3,0:6.0:3").exit_code == 3);
    // evaluation point outside the convergence disk
    CHECK(run_cli("eval " + kBaseFlags + " --z 1.5+0i --terms 400").exit_code == 3);
}

TEST_CASE("term cap from the environment is honored") {
    const std::string saved = []() {
        const char* v = std::getenv("HEUNSYM_MAX_TERMS");
        return v ? std::string(v) : std::string();
    }();
    setenv("HEUNSYM_MAX_TERMS", "12", 1);
    const auto r = run_cli("fundamental " + kBaseFlags + " --terms 100");
    if (saved.empty())
        unsetenv("HEUNSYM_MAX_TERMS");
    else
        setenv("HEUNSYM_MAX_TERMS", saved.c_str(), 1);
    REQUIRE(r.exit_code == 0);
    int lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    CHECK(lines <= 1 + 13);
}

TEST_CASE("spectrum finds eigenvalues in a window") {
    const auto r = run_cli("spectrum --phi 1.0471975511965976 --chi 0.3,0.8,0.8,0.3 "
                           "--lambda 0+0i --window -10:0");
    REQUIRE(r.exit_code == 0);
    std::istringstream in(r.out);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        REQUIRE(line.rfind("lambda=", 0) == 0);
        const heunsym::cplx lam = heunsym::parse_complex(line.substr(7));
        CHECK(lam.real() > -10.0);
        CHECK(lam.real() < 0.0);
        ++count;
    }
    CHECK(count >= 1);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-binary> [doctest args]\n");
        return 1;
    }
    g_binary = argv[1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv + 1);
    return ctx.run();
}
