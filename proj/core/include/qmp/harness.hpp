#pragma once

// Experiment configuration, execution and machine-readable reporting: the
// library-side implementation of the command-line surface. Configs are strict
// JSON (unknown keys rejected); reports are byte-stable for a fixed config,
// seed and thread count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qmp/lattice.hpp"
#include "qmp/linalg.hpp"
#include "qmp/mean_kernel.hpp"
#include "qmp/oracles.hpp"
#include "qmp/preparation.hpp"
#include "qmp/process.hpp"

namespace qmp {

struct YSpec {
    enum class Type { kMatrix, kRandomHermitian };
    Type type = Type::kMatrix;
    Matrix entries;             // kMatrix
    std::uint64_t seed = 0;     // kRandomHermitian

    bool operator==(const YSpec &o) const;
};

struct RhoSpec {
    enum class Type { kPure, kDiagonal, kRandom };
    Type type = Type::kPure;
    Vector vec;                 // kPure
    RealVector weights;         // kDiagonal
    std::uint64_t seed = 0;     // kRandom

    bool operator==(const RhoSpec &o) const;
};

struct SystemConfig {
    int dim = 0;
    std::vector<int> eigenvalue_multipliers;  // lattice-commensurate path
    std::vector<double> eigenvalues;          // explicit path (mean-dependence)
    std::uint64_t basis_seed = 0;             // 0 = diagonal in the standard basis
    YSpec y;
    RhoSpec rho;

    bool operator==(const SystemConfig &o) const;
};

struct ApparatusConfig {
    int n_points = 0;
    double length = 0.0;
    MomentumShape momentum_shape = MomentumShape::kGaussian;
    std::vector<double> s_list;

    bool operator==(const ApparatusConfig &o) const;
};

struct BinsConfig {
    int count = 0;                   // used when edges is empty
    std::vector<double> edges;

    bool operator==(const BinsConfig &o) const;
};

struct OutputsConfig {
    std::string report = "report.json";
    std::string csv = "sweep.csv";

    bool operator==(const OutputsConfig &o) const;
};

struct ExperimentConfig {
    SystemConfig system;
    std::optional<ApparatusConfig> apparatus;
    std::string kernel = "pinching";
    std::vector<std::string> kernels;  // mean-dependence: exactly two
    BinsConfig bins;
    std::vector<int> target_bins;
    OutputsConfig outputs;

    bool operator==(const ExperimentConfig &o) const;
};

ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config_file(const std::string &path);
std::string serialize_config(const ExperimentConfig &config);

/// Materialized experiment: every downstream guard has been checked, so
/// running cannot fail on configuration.
struct Experiment {
    ExperimentConfig config;
    HermitianObservable x;
    Matrix y_matrix;
    HermitianObservable y;
    DensityState rho = DensityState::maximally_mixed(1);
    MeanKernel kernel = MeanKernel::pinching();
    std::vector<MeanKernel> kernels;
    Bins bins;
    std::vector<int> target_bins;

    bool lattice_based = false;
    Lattice lattice;
    std::vector<ApparatusPreparation> preparations;  // one per s, decreasing s
};

// Validates and builds; every guard violation (BinMisaligned, SupportViolation,
// NotCommensurate, ...) is rethrown as ConfigError with the guard name kept in
// the message.
Experiment materialize(const ExperimentConfig &config);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool lower_bound = false;  // pass means value > threshold instead of <=
    bool pass = false;
};

struct SweepRow {
    double s = 0.0;
    double srinivas_gap = 0.0;
    double pointer_mean_err = 0.0;
    double pointer_var_err = 0.0;
    double thm52_residual = 0.0;
    double thm54_residual = 0.0;
};

struct RunReport {
    std::string command;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<SweepRow> rows;
    bool srinivas_monotone = false;
    std::vector<CheckResult> invariants;
    std::vector<OracleReport> oracles;
};

SweepRow compute_row(const Experiment &exp, const ApparatusPreparation &prep);
std::vector<SweepRow> compute_rows(const Experiment &exp, int threads);

// The module invariants on the configured instance plus seeded random suites;
// with full = false only the row-level (sweep) contracts are evaluated.
std::vector<CheckResult> run_invariant_suite(const Experiment &exp,
                                             const std::vector<SweepRow> &rows,
                                             std::uint64_t seed, bool full = true);

std::string report_to_json(const RunReport &report, const ExperimentConfig &config);
std::string rows_to_csv(const std::vector<SweepRow> &rows);

// Command entry points; return the process exit code (0 pass, 1 invariant
// failure); configuration problems throw ConfigError (exit 2 in the CLI).
int run_check(const ExperimentConfig &config, const std::string &out_dir, std::uint64_t seed,
              int threads, std::ostream &log);
int run_sweep(const ExperimentConfig &config, const std::string &out_dir, std::uint64_t seed,
              int threads, std::ostream &log);
int run_mean_dependence(const ExperimentConfig &config, const std::string &out_dir,
                        std::uint64_t seed, std::ostream &log);

}  // namespace qmp
