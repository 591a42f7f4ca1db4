#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "breatherlab/config.hpp"
#include "breatherlab/io.hpp"
#include "breatherlab/pipelines.hpp"

using namespace breatherlab;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("breatherlab_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}
}  // namespace

TEST_CASE("config round trip is exact") {
    RunConfig c;
    c.pipeline = Pipeline::sweep;
    c.model_name = "gaussian";
    c.model_params["amplitude"] = 0.5;
    c.grid_L = 120.0;
    c.grid_N = 1201;
    c.eps_list = {0.3, 0.2, 0.1};
    c.solver.tol = 1e-9;
    c.solver.boundary = Boundary::sponge;
    c.evolve.scheme = Scheme::strang;
    c.rng_seed = 42;
    c.output_dir = "x/y";

    const json j1 = to_json(c);
    const RunConfig back = config_from_json(j1);
    REQUIRE(to_json(back) == j1);
}

TEST_CASE("config validation reports field-level errors") {
    json j;
    j["eps"] = 1.7;
    j["grid"] = {{"N", 14}};
    j["modes"] = {{"n_max", 8}, {"M", 8}};
    try {
        config_from_json(j);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("eps") != std::string::npos);
        REQUIRE(msg.find("grid.N") != std::string::npos);
        REQUIRE(msg.find("modes.M") != std::string::npos);
    }
}

TEST_CASE("overrides navigate dotted paths") {
    json j = to_json(RunConfig{});
    apply_override(j, "grid.L=200.5");
    apply_override(j, "solver.even_x=false");
    apply_override(j, "model.name=gaussian");
    const RunConfig c = config_from_json(j);
    REQUIRE(c.grid_L == 200.5);
    REQUIRE_FALSE(c.solver.even_x);
    REQUIRE(c.model_name == "gaussian");
    REQUIRE_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("solve pipeline writes deterministic artifacts") {
    RunConfig c;
    c.pipeline = Pipeline::solve;
    c.model_name = "sine_gordon";
    c.eps = 0.3;
    c.grid_L = 95.0;
    c.grid_N = 951;
    c.n_max = 4;
    c.M = 16;

    const fs::path d1 = temp_dir("solve1");
    const fs::path d2 = temp_dir("solve2");
    c.output_dir = d1.string();
    REQUIRE(run(c, 0) == kExitOk);
    c.output_dir = d2.string();
    REQUIRE(run(c, 0) == kExitOk);

    REQUIRE(fs::exists(d1 / "solution.json"));
    REQUIRE(fs::exists(d1 / "modes.csv"));
    REQUIRE(fs::exists(d1 / "metadata.json"));
    REQUIRE(read_file(d1 / "modes.csv") == read_file(d2 / "modes.csv"));

    SECTION("metadata echo parses back to the same config") {
        const json meta = load_json(d1 / "metadata.json");
        const RunConfig echo = config_from_json(meta.at("config"));
        REQUIRE(to_json(echo) == meta.at("config"));
        REQUIRE(meta.at("status") == "ok");
    }

    SECTION("solution round trip") {
        const LoadedSolution ls = load_solution(d1);
        REQUIRE(ls.sol.converged);
        REQUIRE(ls.sol.stack.n_max == 4);
        REQUIRE(ls.sol.stack.grid.N == 951);
        REQUIRE(ls.alpha > 0.0);

        SECTION("analyze pipeline consumes the stored solution") {
            RunConfig ac;
            ac.pipeline = Pipeline::analyze;
            ac.input_dir = d1.string();
            const fs::path da = temp_dir("analyze");
            ac.output_dir = da.string();
            REQUIRE(run(ac, 0) == kExitOk);
            REQUIRE(fs::exists(da / "split.json"));
            REQUIRE(fs::exists(da / "decomposition.json"));
            const json dec = load_json(da / "decomposition.json");
            REQUIRE(dec.at("J").get<int>() == 1);
        }
    }
}

TEST_CASE("fermi pipeline emits the potentials table") {
    RunConfig c;
    c.pipeline = Pipeline::fermi;
    c.model_name = "gaussian";
    c.grid_L = 30.0;
    c.grid_N = 2001;
    const fs::path d = temp_dir("fermi");
    c.output_dir = d.string();
    REQUIRE(run(c, 0) == kExitOk);
    const CsvTable t = read_csv(d / "potentials.csv");
    REQUIRE(t.header[0] == "name");
    bool found = false;
    for (const auto& row : t.rows)
        if (row[0] == "gaussian") {
            found = true;
            REQUIRE(std::stod(row[1]) == Catch::Approx(0.8372).margin(5e-4));
        }
    REQUIRE(found);
}

TEST_CASE("evolve pipeline reports diagnostics") {
    RunConfig c;
    c.pipeline = Pipeline::evolve;
    c.model_name = "sine_gordon";
    c.eps = 0.3;
    c.grid_L = 95.0;
    c.grid_N = 951;
    c.M = 16;
    c.evolve.steps_per_period = 512;
    c.evolve.snapshot_every = 8;
    const fs::path d = temp_dir("evolve");
    c.output_dir = d.string();
    REQUIRE(run(c, 0) == kExitOk);
    const json diag = load_json(d / "diagnostics.json");
    REQUIRE(diag.at("period_residual").at("phi_gap").get<double>() < 1e-2);
    REQUIRE(diag.at("energy_drift_relative").get<double>() < 1e-6);
    REQUIRE(diag.at("virial").size() == 3);
    REQUIRE(fs::exists(d / "snapshots.csv"));
}

TEST_CASE("config errors give exit code 1") {
    RunConfig c;
    c.pipeline = Pipeline::analyze;  // requires input_dir
    const fs::path d = temp_dir("cfgerr");
    c.output_dir = d.string();
    REQUIRE(run(c, 0) == kExitConfigError);
    const json meta = load_json(d / "metadata.json");
    REQUIRE(meta.at("status") == "error");
}

TEST_CASE("traceability of an empty directory is all SKIPPED") {
    const fs::path d = temp_dir("trace_empty");
    const auto rows = traceability_report(d);
    REQUIRE(rows.size() == 12);
    for (const auto& r : rows) REQUIRE(r.verdict == "SKIPPED");
}

TEST_CASE("traceability flags tampered CSV payloads") {
    const fs::path d = temp_dir("trace_tamper");
    // fabricate a minimal accept-run artifact set
    CsvTable t;
    t.header = {"id", "property", "measured", "tolerance", "verdict"};
    t.rows.push_back({"1", "demo", "0", "1", "PASS"});
    write_csv(d / "traceability.csv", t);
    json meta;
    meta["csv_files"]["traceability.csv"]["checksum"] =
        RunContext::fmt_checksum(file_checksum(d / "traceability.csv"));
    meta["csv_files"]["traceability.csv"]["columns"] = t.header;
    write_json(d / "metadata.json", meta);
    json acc;
    acc["criteria"].push_back({{"id", 1},
                               {"name", "demo"},
                               {"property", "demo property"},
                               {"measured", 0.0},
                               {"tolerance", 1.0},
                               {"comparator", "<="},
                               {"pass", true},
                               {"detail", ""}});
    write_json(d / "acceptance.json", acc);

    auto rows = traceability_report(d);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].verdict == "PASS");

    std::ofstream(d / "traceability.csv", std::ios::app) << "tampered\n";
    rows = traceability_report(d);
    REQUIRE(rows[0].verdict == "TAMPERED");
}

TEST_CASE("default output root honors the environment") {
    ::setenv("BREATHERLAB_OUT", "/tmp/blab_out_test", 1);
    REQUIRE(default_output_root() == "/tmp/blab_out_test");
    ::unsetenv("BREATHERLAB_OUT");
    REQUIRE(default_output_root() == "out");
}
