#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "attractorlab/experiments.hpp"
#include "attractorlab/io.hpp"

using namespace attractorlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kGood = R"(
# comment
[experiment]
kind = entropy
seed = 9
out = runs/x

[drift]
kind = plaplace
alpha = 3.5

[noise]
modes = 2
t_min = -4
t_max = 1

[solver]
n = 64
dt = 1e-2

[params]
delta_grid = 0.04, 0.02
entropy_s0 = -1
)";

} // namespace

TEST_CASE("config parsing: values, lists, comments") {
    RunConfig cfg = parse_config(kGood);
    CHECK(cfg.kind == "entropy");
    CHECK(cfg.seed == 9);
    CHECK(cfg.out == "runs/x");
    CHECK(cfg.alpha == 3.5);
    CHECK(cfg.modes == 2);
    CHECK(cfg.mesh_n == 64);
    REQUIRE(cfg.delta_grid.size() == 2);
    CHECK(cfg.delta_grid[1] == 0.02);
    validate(cfg);
    const std::string j = config_to_json(cfg);
    CHECK(j.find("\"alpha\": 3.5") != std::string::npos);
}

TEST_CASE("config parsing: rejections") {
    CHECK_THROWS_AS(parse_config("[experiment]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\nkind = oracle\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind = oracle\n"), ConfigError); // outside a section
    CHECK_THROWS_AS(parse_config("[experiment]\nkind oracle\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\ndt = fast\n"), ConfigError);
}

TEST_CASE("config validation: cross-field rules") {
    RunConfig cfg = parse_config(kGood);
    SUBCASE("negative dt") {
        cfg.solver_dt = -1e-2;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
    SUBCASE("rde needs alpha 2") {
        cfg.drift_kind = "rde";
        cfg.alpha = 3.0;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
    SUBCASE("solver dt must align with the noise grid") {
        cfg.solver_dt = 1.5e-2;
        cfg.noise_dt = 1e-2;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
    SUBCASE("window must contain zero") {
        cfg.t_min = 1.0;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
    SUBCASE("unknown experiment kind") {
        cfg.kind = "frobnicate";
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
}

TEST_CASE("replays reproduce CSV outputs byte-for-byte") {
    RunConfig cfg = parse_config(kGood);
    cfg.mesh_n = 400;
    const fs::path a = fs::temp_directory_path() / "alab_replay_a";
    const fs::path b = fs::temp_directory_path() / "alab_replay_b";
    fs::remove_all(a);
    fs::remove_all(b);
    cfg.out = a.string();
    run_experiment(cfg);
    cfg.out = b.string();
    run_experiment(cfg);
    for (const char* name : {"entropy.csv", "cover.csv", "entropy.json"}) {
        CHECK(slurp(a / name) == slurp(b / name));
        CHECK(!slurp(a / name).empty());
    }
    CHECK(fs::exists(a / "manifest.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("trajectory binary dump round-trips") {
    Mesh1D mesh(1.0, 8);
    Trajectory traj;
    for (int r = 0; r < 5; ++r) {
        traj.times.push_back(0.1 * r);
        Field f(mesh);
        for (int i = 0; i < f.size(); ++i) f[i] = std::sin(r + i * 0.3);
        traj.states.push_back(f);
        traj.newton_iters.push_back(0);
        traj.residuals.push_back(0.0);
    }
    const fs::path p = fs::temp_directory_path() / "alab_traj.bin";
    write_trajectory_binary(p, traj);
    Trajectory back = read_trajectory_binary(p, mesh);
    REQUIRE(back.times.size() == traj.times.size());
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        CHECK(back.times[r] == traj.times[r]);
        CHECK(back.states[r].values == traj.states[r].values);
    }
    fs::remove(p);

    const fs::path pc = fs::temp_directory_path() / "alab_traj.csv";
    write_trajectory_csv(pc, traj);
    const std::string csv = slurp(pc);
    CHECK(csv.rfind("t,v0,v1", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6); // header + 5 records
    fs::remove(pc);
}

#ifdef ATTRACTOR_LAB_BIN
TEST_CASE("cli exit codes: config errors exit 2, success exits 0") {
    const fs::path dir = fs::temp_directory_path() / "alab_cli";
    fs::create_directories(dir);
    const fs::path bad = dir / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "[experiment]\nkind = entropy\n[solver]\ndt = -1\n";
    }
    const std::string bin = ATTRACTOR_LAB_BIN;
    int rc = std::system((bin + " entropy --config " + bad.string() + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    rc = std::system((bin + " entropy --config definitely_missing.cfg 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    const fs::path good = dir / "good.cfg";
    {
        std::ofstream out(good);
        out << "[experiment]\nkind = entropy\nout = " << (dir / "out").string()
            << "\n[solver]\nn = 400\n[params]\nentropy_s0 = -1\ndelta_grid = 0.04, 0.02\n";
    }
    rc = std::system((bin + " entropy --config " + good.string() + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
}
#endif
