#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmp/harness.hpp"

using namespace qmp;

namespace {

std::string small_config_json(const std::string &s_list = "[0.4, 0.28]",
                              const std::string &edges = "[-8.0, -1.5, -0.5, 0.5, 1.5, 8.0]") {
    return std::string(R"({
  "system": {
    "dim": 2,
    "eigenvalue_multipliers": [-4, 4],
    "Y": {"type": "matrix", "entries": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
    "rho": {"type": "pure", "vector": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}
  },
  "apparatus": {"n_points": 64, "length": 16.0, "momentum_shape": "gaussian", "s_list": )") +
           s_list + R"(},
  "kernel": "pinching",
  "bins": {"edges": )" +
           edges + R"(},
  "target_bins": [3],
  "outputs": {"report": "report.json", "csv": "sweep.csv"}
})";
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("config round-trip") {
    const auto cfg = parse_config(small_config_json());
    const auto again = parse_config(serialize_config(cfg));
    CHECK(cfg == again);
    CHECK(again.system.dim == 2);
    CHECK(again.apparatus->n_points == 64);
    CHECK(again.kernel == "pinching");
}

TEST_CASE("strict schema rejects unknown keys") {
    CHECK_THROWS_AS(parse_config(R"({"system": {}, "extra": 1})"), ConfigError);

    // keys from a different variant of the same spec are rejected too
    CHECK_THROWS_AS(parse_config(R"({
      "system": {"dim": 2,
                 "eigenvalue_multipliers": [-4, 4],
                 "Y": {"type": "matrix", "seed": 3,
                       "entries": [[[0,0],[1,0]],[[1,0],[0,0]]]},
                 "rho": {"type": "random", "seed": 2}},
      "bins": {"count": 4}
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({
      "system": {"dim": 2, "typo_field": true,
                 "Y": {"type": "random_hermitian", "seed": 1},
                 "rho": {"type": "random", "seed": 2}},
      "bins": {"count": 4}
    })"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("config validation surfaces the violated guard") {
    // bin edge on an eigenvalue
    auto cfg = parse_config(small_config_json("[0.4, 0.28]", "[-8.0, -1.0, 1.0, 8.0]"));
    cfg.target_bins = {1};
    try {
        materialize(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("BinMisaligned") != std::string::npos);
    }

    // 3s >= L/4
    auto wide = parse_config(small_config_json("[2.0]"));
    try {
        materialize(wide);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("SupportViolation") != std::string::npos);
    }

    auto empty = parse_config(small_config_json("[]"));
    CHECK_THROWS_AS(materialize(empty), ConfigError);

    auto increasing = parse_config(small_config_json("[0.2, 0.4]"));
    CHECK_THROWS_AS(materialize(increasing), ConfigError);

    auto bad_bins = parse_config(small_config_json("[0.4]", "[-8.0, -4.0]"));
    CHECK_THROWS_AS(materialize(bad_bins), ConfigError);  // edges must span [-L/2, L/2]

    auto cfg2 = parse_config(small_config_json());
    cfg2.target_bins = {12};
    CHECK_THROWS_AS(materialize(cfg2), ConfigError);
}

TEST_CASE("bins from a count partition the lattice range") {
    auto cfg = parse_config(small_config_json());
    cfg.bins.edges.clear();
    cfg.bins.count = 8;
    cfg.target_bins = {5};
    const auto exp = materialize(cfg);
    CHECK(exp.bins.count() == 8);
    CHECK(exp.bins.edges(0) == doctest::Approx(-8.0));
    CHECK(exp.bins.edges(8) == doctest::Approx(8.0));
}

TEST_CASE("check command runs green on a small config and is byte-stable") {
    const auto cfg = parse_config(small_config_json());
    const std::string dir = (std::filesystem::temp_directory_path() / "qmp_check_test").string();
    std::ostringstream log1, log2;
    CHECK(run_check(cfg, dir, 7, 1, log1) == 0);
    const std::string first = slurp(std::filesystem::path(dir) / "report.json");
    CHECK(run_check(cfg, dir, 7, 1, log2) == 0);
    const std::string second = slurp(std::filesystem::path(dir) / "report.json");
    CHECK(first == second);
    CHECK(!first.empty());
    CHECK(log1.str() == log2.str());
    CHECK(first.find("\"srinivas_monotone\": true") != std::string::npos);
}

TEST_CASE("sweep command emits the fixed CSV schema") {
    const auto cfg = parse_config(small_config_json("[0.4, 0.33, 0.28]"));
    const std::string dir = (std::filesystem::temp_directory_path() / "qmp_sweep_test").string();
    std::ostringstream log;
    CHECK(run_sweep(cfg, dir, 7, 2, log) == 0);
    const std::string csv = slurp(std::filesystem::path(dir) / "sweep.csv");
    CHECK(csv.rfind("s,srinivas_gap,pointer_mean_err,pointer_var_err,thm52_residual,"
                    "thm54_residual\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    // thread count must not change the bytes, even with more workers than rows
    std::ostringstream log2;
    CHECK(run_sweep(cfg, dir, 7, 1, log2) == 0);
    CHECK(slurp(std::filesystem::path(dir) / "sweep.csv") == csv);
    CHECK(run_sweep(cfg, dir, 7, 8, log2) == 0);
    CHECK(slurp(std::filesystem::path(dir) / "sweep.csv") == csv);

    auto short_cfg = parse_config(small_config_json("[0.4, 0.28]"));
    CHECK_THROWS_AS(run_sweep(short_cfg, dir, 7, 1, log), ConfigError);
}

TEST_CASE("mean-dependence command") {
    const std::string json = R"({
      "system": {
        "dim": 3,
        "eigenvalues": [0.0, 0.001, 1.001],
        "Y": {"type": "matrix",
              "entries": [[[0,0],[1,0],[0,0]],[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]},
        "rho": {"type": "diagonal", "weights": [0.5, 0.3, 0.2]}
      },
      "kernels": ["cesaro:T=10", "cesaro:T=100000"],
      "bins": {"edges": [-0.5, 0.0005, 0.5, 2.0]},
      "outputs": {"report": "md.json", "csv": "sweep.csv"}
    })";
    const auto cfg = parse_config(json);
    const std::string dir = (std::filesystem::temp_directory_path() / "qmp_md_test").string();
    std::ostringstream log;
    CHECK(run_mean_dependence(cfg, dir, 0, log) == 0);
    const std::string report = slurp(std::filesystem::path(dir) / "md.json");
    CHECK(report.find("operator_difference") != std::string::npos);
    CHECK(report.find("conditional_y_mean") != std::string::npos);

    auto one_kernel = cfg;
    one_kernel.kernels = {"pinching"};
    CHECK_THROWS_AS(run_mean_dependence(one_kernel, dir, 0, log), ConfigError);

    // identical kernels: every reported difference collapses to zero
    auto same = cfg;
    same.kernels = {"cesaro:T=10", "cesaro:T=10"};
    CHECK(run_mean_dependence(same, dir, 0, log) == 0);
    const std::string again = slurp(std::filesystem::path(dir) / "md.json");
    const auto pos = again.find("\"operator_difference\": ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(again.substr(pos + 23)) <= 1e-12);
}

TEST_CASE("rows are ordered by decreasing width") {
    const auto cfg = parse_config(small_config_json("[0.4, 0.33, 0.28]"));
    const auto exp = materialize(cfg);
    const auto rows = compute_rows(exp, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].s > rows[1].s);
    CHECK(rows[1].s > rows[2].s);
}
