#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qmp/harness.hpp"
#include "qmp/random.hpp"

namespace qmp {

using Json = nlohmann::ordered_json;

namespace {

void require_keys(const Json &obj, const std::string &where,
                  const std::set<std::string> &allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto &item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

const Json &need(const Json &obj, const std::string &where, const std::string &key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + " lacks required key '" + key + "'");
    return *it;
}

Complex parse_complex(const Json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + ": complex entries are [re, im] pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

Matrix parse_matrix(const Json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": matrix must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json &row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw ConfigError(where + ": matrix must be square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            m(r, c) = parse_complex(row[static_cast<size_t>(c)], where);
        }
    }
    return m;
}

Json dump_complex(const Complex &z) {
    return Json::array({z.real(), z.imag()});
}

Json dump_matrix(const Matrix &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

YSpec parse_y(const Json &j) {
    YSpec y;
    const std::string type = need(j, "system.Y", "type").get<std::string>();
    if (type == "matrix") {
        require_keys(j, "system.Y", {"type", "entries"});
        y.type = YSpec::Type::kMatrix;
        y.entries = parse_matrix(need(j, "system.Y", "entries"), "system.Y.entries");
    } else if (type == "random_hermitian") {
        require_keys(j, "system.Y", {"type", "seed"});
        y.type = YSpec::Type::kRandomHermitian;
        y.seed = need(j, "system.Y", "seed").get<std::uint64_t>();
    } else {
        throw ConfigError("system.Y.type must be 'matrix' or 'random_hermitian'");
    }
    return y;
}

RhoSpec parse_rho(const Json &j) {
    RhoSpec rho;
    const std::string type = need(j, "system.rho", "type").get<std::string>();
    if (type == "pure") {
        require_keys(j, "system.rho", {"type", "vector"});
        rho.type = RhoSpec::Type::kPure;
        const Json &vec = need(j, "system.rho", "vector");
        if (!vec.is_array() || vec.empty()) throw ConfigError("system.rho.vector must be nonempty");
        rho.vec.resize(static_cast<Eigen::Index>(vec.size()));
        for (size_t i = 0; i < vec.size(); ++i) {
            rho.vec(static_cast<Eigen::Index>(i)) = parse_complex(vec[i], "system.rho.vector");
        }
    } else if (type == "diagonal") {
        require_keys(j, "system.rho", {"type", "weights"});
        rho.type = RhoSpec::Type::kDiagonal;
        const Json &w = need(j, "system.rho", "weights");
        if (!w.is_array() || w.empty()) throw ConfigError("system.rho.weights must be nonempty");
        rho.weights.resize(static_cast<Eigen::Index>(w.size()));
        for (size_t i = 0; i < w.size(); ++i) {
            rho.weights(static_cast<Eigen::Index>(i)) = w[i].get<double>();
        }
    } else if (type == "random") {
        require_keys(j, "system.rho", {"type", "seed"});
        rho.type = RhoSpec::Type::kRandom;
        rho.seed = need(j, "system.rho", "seed").get<std::uint64_t>();
    } else {
        throw ConfigError("system.rho.type must be 'pure', 'diagonal' or 'random'");
    }
    return rho;
}

}  // namespace

ExperimentConfig parse_config(const std::string &json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    require_keys(j, "config",
                 {"system", "apparatus", "kernel", "kernels", "bins", "target_bins", "outputs"});

    ExperimentConfig cfg;

    const Json &sys = need(j, "config", "system");
    require_keys(sys, "system",
                 {"dim", "eigenvalue_multipliers", "eigenvalues", "basis_seed", "Y", "rho"});
    cfg.system.dim = need(sys, "system", "dim").get<int>();
    if (sys.contains("eigenvalue_multipliers")) {
        cfg.system.eigenvalue_multipliers =
            sys["eigenvalue_multipliers"].get<std::vector<int>>();
    }
    if (sys.contains("eigenvalues")) {
        cfg.system.eigenvalues = sys["eigenvalues"].get<std::vector<double>>();
    }
    if (sys.contains("basis_seed")) cfg.system.basis_seed = sys["basis_seed"].get<std::uint64_t>();
    cfg.system.y = parse_y(need(sys, "system", "Y"));
    cfg.system.rho = parse_rho(need(sys, "system", "rho"));

    if (j.contains("apparatus")) {
        const Json &app = j["apparatus"];
        require_keys(app, "apparatus", {"n_points", "length", "momentum_shape", "s_list"});
        ApparatusConfig a;
        a.n_points = need(app, "apparatus", "n_points").get<int>();
        a.length = need(app, "apparatus", "length").get<double>();
        a.momentum_shape =
            parse_momentum_shape(need(app, "apparatus", "momentum_shape").get<std::string>());
        a.s_list = need(app, "apparatus", "s_list").get<std::vector<double>>();
        cfg.apparatus = a;
    }

    if (j.contains("kernel")) cfg.kernel = j["kernel"].get<std::string>();
    if (j.contains("kernels")) cfg.kernels = j["kernels"].get<std::vector<std::string>>();

    if (j.contains("bins")) {
        const Json &bins = j["bins"];
        require_keys(bins, "bins", {"count", "edges"});
        if (bins.contains("count") == bins.contains("edges")) {
            throw ConfigError("bins needs exactly one of 'count' or 'edges'");
        }
        if (bins.contains("count")) cfg.bins.count = bins["count"].get<int>();
        if (bins.contains("edges")) cfg.bins.edges = bins["edges"].get<std::vector<double>>();
    }

    if (j.contains("target_bins")) cfg.target_bins = j["target_bins"].get<std::vector<int>>();

    if (j.contains("outputs")) {
        const Json &out = j["outputs"];
        require_keys(out, "outputs", {"report", "csv"});
        if (out.contains("report")) cfg.outputs.report = out["report"].get<std::string>();
        if (out.contains("csv")) cfg.outputs.csv = out["csv"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig &cfg) {
    Json j;
    Json sys;
    sys["dim"] = cfg.system.dim;
    if (!cfg.system.eigenvalue_multipliers.empty()) {
        sys["eigenvalue_multipliers"] = cfg.system.eigenvalue_multipliers;
    }
    if (!cfg.system.eigenvalues.empty()) sys["eigenvalues"] = cfg.system.eigenvalues;
    if (cfg.system.basis_seed != 0) sys["basis_seed"] = cfg.system.basis_seed;
    Json y;
    if (cfg.system.y.type == YSpec::Type::kMatrix) {
        y["type"] = "matrix";
        y["entries"] = dump_matrix(cfg.system.y.entries);
    } else {
        y["type"] = "random_hermitian";
        y["seed"] = cfg.system.y.seed;
    }
    sys["Y"] = y;
    Json rho;
    switch (cfg.system.rho.type) {
        case RhoSpec::Type::kPure: {
            rho["type"] = "pure";
            Json vec = Json::array();
            for (Eigen::Index i = 0; i < cfg.system.rho.vec.size(); ++i) {
                vec.push_back(dump_complex(cfg.system.rho.vec(i)));
            }
            rho["vector"] = vec;
            break;
        }
        case RhoSpec::Type::kDiagonal: {
            rho["type"] = "diagonal";
            rho["weights"] = std::vector<double>(
                cfg.system.rho.weights.data(),
                cfg.system.rho.weights.data() + cfg.system.rho.weights.size());
            break;
        }
        case RhoSpec::Type::kRandom:
            rho["type"] = "random";
            rho["seed"] = cfg.system.rho.seed;
            break;
    }
    sys["rho"] = rho;
    j["system"] = sys;

    if (cfg.apparatus) {
        Json app;
        app["n_points"] = cfg.apparatus->n_points;
        app["length"] = cfg.apparatus->length;
        app["momentum_shape"] = momentum_shape_name(cfg.apparatus->momentum_shape);
        app["s_list"] = cfg.apparatus->s_list;
        j["apparatus"] = app;
    }
    j["kernel"] = cfg.kernel;
    if (!cfg.kernels.empty()) j["kernels"] = cfg.kernels;
    Json bins;
    if (!cfg.bins.edges.empty()) {
        bins["edges"] = cfg.bins.edges;
    } else {
        bins["count"] = cfg.bins.count;
    }
    j["bins"] = bins;
    if (!cfg.target_bins.empty()) j["target_bins"] = cfg.target_bins;
    Json outputs;
    outputs["report"] = cfg.outputs.report;
    outputs["csv"] = cfg.outputs.csv;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

bool YSpec::operator==(const YSpec &o) const {
    if (type != o.type || seed != o.seed) return false;
    if (entries.rows() != o.entries.rows() || entries.cols() != o.entries.cols()) return false;
    return entries == o.entries;
}

bool RhoSpec::operator==(const RhoSpec &o) const {
    if (type != o.type || seed != o.seed) return false;
    if (vec.size() != o.vec.size() || weights.size() != o.weights.size()) return false;
    return vec == o.vec && weights == o.weights;
}

bool SystemConfig::operator==(const SystemConfig &o) const {
    return dim == o.dim && eigenvalue_multipliers == o.eigenvalue_multipliers &&
           eigenvalues == o.eigenvalues && basis_seed == o.basis_seed && y == o.y && rho == o.rho;
}

bool ApparatusConfig::operator==(const ApparatusConfig &o) const {
    return n_points == o.n_points && length == o.length &&
           momentum_shape == o.momentum_shape && s_list == o.s_list;
}

bool BinsConfig::operator==(const BinsConfig &o) const {
    return count == o.count && edges == o.edges;
}

bool OutputsConfig::operator==(const OutputsConfig &o) const {
    return report == o.report && csv == o.csv;
}

bool ExperimentConfig::operator==(const ExperimentConfig &o) const {
    return system == o.system && apparatus == o.apparatus && kernel == o.kernel &&
           kernels == o.kernels && bins == o.bins && target_bins == o.target_bins &&
           outputs == o.outputs;
}

namespace {

RealVector to_real_vector(const std::vector<double> &v) {
    return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Experiment materialize(const ExperimentConfig &config) {
    try {
        Experiment exp;
        exp.config = config;
        const int d = config.system.dim;
        if (d < 1) throw ConfigError("system.dim must be >= 1");

        const bool has_mult = !config.system.eigenvalue_multipliers.empty();
        const bool has_expl = !config.system.eigenvalues.empty();
        if (has_mult == has_expl) {
            throw ConfigError(
                "system needs exactly one of eigenvalue_multipliers or eigenvalues");
        }
        exp.lattice_based = has_mult;

        if (config.apparatus) {
            exp.lattice = Lattice::make(config.apparatus->n_points, config.apparatus->length);
            if (static_cast<long>(d) * config.apparatus->n_points > 4096) {
                throw ConfigError("dim * n_points exceeds 4096");
            }
        } else if (has_mult) {
            throw ConfigError("eigenvalue_multipliers require an apparatus block");
        }

        RealVector values(d);
        if (has_mult) {
            if (static_cast<int>(config.system.eigenvalue_multipliers.size()) != d) {
                throw ConfigError("eigenvalue_multipliers must have dim entries");
            }
            for (int i = 0; i < d; ++i) {
                values(i) = config.system.eigenvalue_multipliers[i] * exp.lattice.dq();
            }
        } else {
            if (static_cast<int>(config.system.eigenvalues.size()) != d) {
                throw ConfigError("eigenvalues must have dim entries");
            }
            values = to_real_vector(config.system.eigenvalues);
        }
        if (config.system.basis_seed != 0) {
            Rng rng(config.system.basis_seed);
            exp.x = random_observable_with_spectrum(rng, values);
        } else {
            exp.x = HermitianObservable::from_eigensystem(Matrix::Identity(d, d), values);
        }

        switch (config.system.y.type) {
            case YSpec::Type::kMatrix:
                if (config.system.y.entries.rows() != d) {
                    throw ConfigError("system.Y.entries must be dim x dim");
                }
                exp.y_matrix = config.system.y.entries;
                break;
            case YSpec::Type::kRandomHermitian: {
                Rng rng(config.system.y.seed);
                exp.y_matrix = random_hermitian(rng, d);
                break;
            }
        }
        exp.y = HermitianObservable::decompose(exp.y_matrix);

        switch (config.system.rho.type) {
            case RhoSpec::Type::kPure:
                if (config.system.rho.vec.size() != d) {
                    throw ConfigError("system.rho.vector must have dim entries");
                }
                exp.rho = DensityState::pure(config.system.rho.vec);
                break;
            case RhoSpec::Type::kDiagonal:
                if (config.system.rho.weights.size() != d) {
                    throw ConfigError("system.rho.weights must have dim entries");
                }
                exp.rho = DensityState::diagonal(config.system.rho.weights);
                break;
            case RhoSpec::Type::kRandom: {
                Rng rng(config.system.rho.seed);
                exp.rho = random_density(rng, d);
                break;
            }
        }

        exp.kernel = MeanKernel::parse(config.kernel);
        for (const auto &spec : config.kernels) exp.kernels.push_back(MeanKernel::parse(spec));

        if (!config.bins.edges.empty()) {
            exp.bins = Bins::from_edges(to_real_vector(config.bins.edges));
        } else if (config.bins.count > 0) {
            if (!config.apparatus) throw ConfigError("bins.count requires an apparatus block");
            exp.bins = Bins::uniform(exp.lattice, config.bins.count);
        } else {
            throw ConfigError("bins block is required");
        }

        if (config.apparatus) {
            const double half = 0.5 * exp.lattice.length();
            if (std::abs(exp.bins.edges(0) + half) > 1e-9 ||
                std::abs(exp.bins.edges(exp.bins.edges.size() - 1) - half) > 1e-9) {
                throw ConfigError("bin edges must span [-L/2, L/2]");
            }
        }

        // Eigenvalue / bin-edge alignment guard.
        for (int i = 0; i < exp.x.groups(); ++i) {
            const double xi = exp.x.eigenvalues()(i);
            if (exp.bins.locate(xi) < 0) throw BinMisaligned("eigenvalue outside binned range");
            const double margin =
                exp.lattice_based ? 0.5 * exp.lattice.dq() * (1.0 - 1e-9) : 1e-12;
            for (Eigen::Index e = 0; e < exp.bins.edges.size(); ++e) {
                if (std::abs(xi - exp.bins.edges(e)) < margin) {
                    throw BinMisaligned("eigenvalue within half a cell of a bin edge");
                }
            }
        }

        for (const int b : config.target_bins) {
            if (b < 0 || b >= exp.bins.count()) {
                throw ConfigError("target_bins index out of range");
            }
        }
        if (config.apparatus && config.target_bins.empty()) {
            throw ConfigError("target_bins must select at least one bin");
        }
        exp.target_bins = config.target_bins;

        if (config.apparatus) {
            const auto &s_list = config.apparatus->s_list;
            if (s_list.empty()) throw ConfigError("s_list must not be empty");
            for (size_t i = 0; i < s_list.size(); ++i) {
                if (!(s_list[i] > 0.0)) throw ConfigError("s_list entries must be positive");
                if (i > 0 && !(s_list[i] < s_list[i - 1])) {
                    throw ConfigError("s_list must be strictly decreasing");
                }
            }
            for (const double s : s_list) {
                auto prep = ApparatusPreparation::make(exp.lattice,
                                                       config.apparatus->momentum_shape, s);
                // Construction checks the wrap guards for this preparation.
                MeasurementProcess::make(exp.x, exp.lattice, prep);
                exp.preparations.push_back(std::move(prep));
            }
        }
        return exp;
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
}

}  // namespace qmp
