#include "doctest.h"

#include <mati/cli/config.hpp>
#include <mati/cli/run.hpp>
#include <mati/cli/svg.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mati;
using namespace mati::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome exec(const RunConfig& cfg) {
    ::unsetenv("MATI_OUTPUT_DIR");
    std::ostringstream o, e;
    int code = run(cfg, o, e);
    return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("mati_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("durations") {
    CHECK(parse_duration("10ms") == doctest::Approx(0.01));
    CHECK(parse_duration("0.5s") == 0.5);
    CHECK(parse_duration("2.5e-3s") == doctest::Approx(0.0025));
    CHECK(parse_duration("0.02") == 0.02);
    CHECK(parse_duration("0", true) == 0.0);
    CHECK_THROWS_AS(parse_duration("5", true), UsageError);
    CHECK_THROWS_AS(parse_duration("5min"), UsageError);
    CHECK_THROWS_AS(parse_duration("-1ms"), UsageError);
    CHECK_THROWS_AS(parse_duration(""), UsageError);
}

TEST_CASE("delay grids") {
    auto g = parse_delay_grid("0:5:50ms");
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g[3] == doctest::Approx(0.015));
    CHECK(g.back() == doctest::Approx(0.05));
    auto l = parse_delay_grid("0ms,10ms,0.02s");
    REQUIRE(l.size() == 3);
    CHECK(l[2] == doctest::Approx(0.02));
    CHECK_THROWS_AS(parse_delay_grid("0:0:50ms"), UsageError);
    CHECK_THROWS_AS(parse_delay_grid("50:5:0ms"), UsageError);
}

TEST_CASE("tau arguments") {
    RunConfig cfg;
    parse_tau("0.9x", cfg);
    CHECK(cfg.tau_relative);
    CHECK(*cfg.tau == doctest::Approx(0.9));
    parse_tau("4ms", cfg);
    CHECK_FALSE(cfg.tau_relative);
    CHECK(*cfg.tau == doctest::Approx(0.004));
    CHECK_THROWS_AS(parse_tau("fastx", cfg), UsageError);
}

TEST_CASE("config files") {
    auto dir = scratch("ini");
    auto path = dir / "run.ini";
    {
        std::ofstream f(path);
        f << "[scenario]\nname = example2\nprotocol = rr\nestimator = model\ndelay = 20ms\n"
             "delay_rate = 0.5\nnoise_bound = 0.01\n\n[certify]\nmode = ugas\n\n"
             "[simulate]\ntau = 0.9x\nhorizon = 2s\nseed = 4\n";
    }
    RunConfig cfg;
    apply_config_file(path.string(), cfg);
    CHECK(cfg.scenario == "example2");
    CHECK(cfg.protocol == ProtocolKind::RoundRobin);
    CHECK(cfg.estimator == EstimatorKind::Model);
    CHECK(cfg.d == doctest::Approx(0.02));
    CHECK(cfg.d_rate == 0.5);
    CHECK(cfg.k_nu == 0.01);
    CHECK(cfg.mode == CertMode::Ugas);
    CHECK(cfg.tau_relative);
    CHECK(cfg.horizon == 2.0);
    CHECK(cfg.seed == 4);

    {
        std::ofstream f(path);
        f << "[scenario]\nspeed = 3\n";
    }
    CHECK_THROWS_AS(apply_config_file(path.string(), cfg), UsageError);
    {
        std::ofstream f(path);
        f << "[scenario]\ndelay = 20\n";  // units are mandatory in files
    }
    CHECK_THROWS_AS(apply_config_file(path.string(), cfg), UsageError);
    CHECK_THROWS_AS(apply_config_file((dir / "missing.ini").string(), cfg), UsageError);
}

TEST_CASE("certify echoes the nominal gain") {
    RunConfig cfg;
    cfg.command = "certify";
    cfg.mode = CertMode::LpStable;
    auto r = exec(cfg);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("gamma_H    18.7051\n") != std::string::npos);
    CHECK(r.out.find("tau*       ") != std::string::npos);
    CHECK(r.out.find("gamma_W    ") != std::string::npos);
}

TEST_CASE("certify writes a certificate when asked") {
    auto dir = scratch("cert");
    RunConfig cfg;
    cfg.command = "certify";
    cfg.d = 0.01;
    cfg.output = (dir / "c.json").string();
    REQUIRE(exec(cfg).code == kExitOk);
    auto cert = MatiCertificate::from_json(slurp(dir / "c.json"));
    CHECK(cert.tau > 0.0);
    CHECK(cert.params.d_max == 0.01);
}

TEST_CASE("sweep prints one row per grid point, deterministically") {
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.protocol = ProtocolKind::RoundRobin;
    cfg.d_grid = parse_delay_grid("0:5:50ms");
    auto a = exec(cfg);
    REQUIRE(a.code == kExitOk);
    CHECK(count_lines(a.out) == 12);
    cfg.workers = 1;
    auto b = exec(cfg);
    CHECK(a.out == b.out);
}

TEST_CASE("simulate output is byte identical across runs") {
    auto dir = scratch("sim");
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.scenario = "example2";
    cfg.d = 0.02;
    cfg.horizon = 0.5;
    cfg.seed = 3;
    cfg.output = (dir / "a.csv").string();
    REQUIRE(exec(cfg).code == kExitOk);
    cfg.output = (dir / "b.csv").string();
    cfg.svg = true;
    REQUIRE(exec(cfg).code == kExitOk);
    auto a = slurp(dir / "a.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(fs::exists(dir / "b.svg"));
}

TEST_CASE("verify reports the battery") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.scenario = "example1";
    cfg.trials = 2;
    cfg.workers = 1;
    auto r = exec(cfg);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("converged  2/2") != std::string::npos);
}

TEST_CASE("gain command") {
    RunConfig cfg;
    cfg.command = "gain";
    cfg.problem = "scalar";
    auto r = exec(cfg);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("gamma_H    1.00") != std::string::npos);
}

TEST_CASE("exit codes") {
    RunConfig cfg;
    cfg.command = "certify";
    cfg.mode = CertMode::LpWithTarget;
    cfg.gains.gamma_d = 60.0;
    auto r = exec(cfg);
    CHECK(r.code == kExitInfeasible);
    CHECK(r.err.rfind("error: ", 0) == 0);

    RunConfig bad;
    bad.command = "launch";
    CHECK(exec(bad).code == kExitUsage);

    RunConfig svg;
    svg.command = "sweep";
    svg.d_grid = {0.0};
    svg.svg = true;
    CHECK(exec(svg).code == kExitUsage);

    RunConfig rate;
    rate.command = "certify";
    rate.d_rate = 0.3;
    CHECK(exec(rate).code == kExitUsage);
}

TEST_CASE("svg chart") {
    auto s = svg_line_chart("t", "x", "y", {{"a", {0, 1, 2}, {1, 3, 2}}, {"b", {0, 2}, {0, 0}}});
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("polyline") != std::string::npos);
}
