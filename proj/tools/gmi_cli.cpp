#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <tomlplusplus/toml.hpp>

#include "gmi/forecast.hpp"
#include "gmi/minimax.hpp"
#include "gmi/simulate.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gmi;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<int> trunc;
};

struct RunConfig {
    toml::table doc;
    fs::path base;  // directory of the config file
    fs::path out;
    Overrides over;
};

// ---- config helpers

const toml::table& section(const RunConfig& rc, const char* name) {
    const toml::table* t = rc.doc[name].as_table();
    if (!t) throw ConfigError(std::string("missing [") + name + "] section");
    return *t;
}

template <typename T>
T required(const toml::table& t, const char* key, const char* where) {
    const auto v = t[key].value<T>();
    if (!v) throw ConfigError(std::string("missing or mistyped key '") + key + "' in " + where);
    return *v;
}

std::vector<double> number_list(const toml::node_view<const toml::node>& node, const char* what) {
    const toml::array* arr = node.as_array();
    if (!arr) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& el : *arr) {
        const auto v = el.value<double>();
        if (!v) throw ConfigError(std::string(what) + " must contain only numbers");
        out.push_back(*v);
    }
    return out;
}

CMatrix matrix_value(const toml::node& node, const char* what) {
    const toml::array* rows = node.as_array();
    if (!rows || rows->empty()) throw ConfigError(std::string(what) + " must be a nonempty array of rows");
    const int n = static_cast<int>(rows->size());
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const toml::array* row = (*rows)[i].as_array();
        if (!row || static_cast<int>(row->size()) != n) throw ConfigError(std::string(what) + " must be square");
        for (int j = 0; j < n; ++j) {
            const auto v = (*row)[j].value<double>();
            if (!v) throw ConfigError(std::string(what) + " must contain only numbers");
            m(i, j) = *v;
        }
    }
    return m;
}

IncrementSpec read_spec(const RunConfig& rc) {
    const auto& t = section(rc, "increment");
    IncrementSpec spec;
    spec.period = t["period"].value_or(1);
    const toml::array* pats = t["patterns"].as_array();
    if (!pats || pats->empty()) throw ConfigError("[increment] needs a nonempty 'patterns' array");
    for (const auto& node : *pats) {
        const toml::table* p = node.as_table();
        if (!p) throw ConfigError("each increment pattern must be a table");
        Pattern pat;
        pat.mu = (*p)["mu"].value_or(1);
        pat.s = (*p)["s"].value_or(1);
        pat.order = (*p)["order"].value_or(0);
        pat.frac = (*p)["frac"].value_or(0.0);
        spec.patterns.push_back(pat);
    }
    validate(spec);
    return spec;
}

DensityModel read_model(const toml::table& t, const char* where) {
    const std::string kind = t["model"].value_or(std::string("arma"));
    if (kind == "arma") {
        std::vector<double> num = t["num"] ? number_list(t["num"], "num") : std::vector<double>{1.0};
        const std::vector<double> den = t["den"] ? number_list(t["den"], "den") : std::vector<double>{1.0};
        const double s2 = t["sigma2"].value_or(1.0);
        if (!(s2 >= 0.0)) throw ConfigError(std::string("sigma2 must be nonnegative in ") + where);
        for (double& c : num) c *= std::sqrt(s2);
        return DensityModel::make_scalar_arma(num, den);
    }
    if (kind == "constant") {
        if (!t["value"]) throw ConfigError(std::string("constant model needs 'value' in ") + where);
        return DensityModel::make_constant(matrix_value(*t["value"].node(), "value"));
    }
    if (kind == "rational") {
        auto read_list = [&](const char* key) {
            MatrixSeq seq;
            const toml::array* arr = t[key].as_array();
            if (!arr) return seq;
            for (const auto& m : *arr) seq.push_back(matrix_value(m, key));
            return seq;
        };
        MatrixSeq num = read_list("num");
        if (num.empty()) throw ConfigError(std::string("rational model needs 'num' in ") + where);
        return DensityModel::make_rational(num, read_list("den"));
    }
    throw ConfigError(std::string("unknown density model '") + kind + "' in " + where);
}

int grid_size(const RunConfig& rc) {
    if (rc.over.grid) return *rc.over.grid;
    return rc.doc["grid"]["M"].value_or(1024);
}

int trunc_size(const RunConfig& rc) {
    if (rc.over.trunc) return *rc.over.trunc;
    return rc.doc["forecast"]["trunc"].value_or(32);
}

std::uint64_t seed_value(const RunConfig& rc) {
    if (rc.over.seed) return *rc.over.seed;
    return static_cast<std::uint64_t>(rc.doc["simulate"]["seed"].value_or(std::int64_t{1}));
}

/// Signal density f from the increment model in [signal].
DensityGrid signal_grid(const RunConfig& rc, const IncrementSpec& spec, int M) {
    return signal_density_from_increments(eval_density(read_model(section(rc, "signal"), "[signal]"), M), spec);
}

DensityGrid noise_grid(const RunConfig& rc, int T, int M) {
    const toml::table* t = rc.doc["noise"].as_table();
    if (!t) return DensityGrid::zeros(T, M, "g");
    return eval_density(read_model(*t, "[noise]"), M);
}

FunctionalSpec read_functional(const RunConfig& rc, int T) {
    const toml::table* t = rc.doc["functional"].as_table();
    if (!t) return FunctionalSpec::single_value(T, 0, 0);
    const std::string kind = (*t)["kind"].value_or(std::string("single"));
    if (kind == "single") return FunctionalSpec::single_value(T, (*t)["horizon"].value_or(0), (*t)["component"].value_or(0));
    if (kind == "finite") {
        const toml::array* rows = (*t)["weights"].as_array();
        if (!rows || rows->empty()) throw ConfigError("finite functional needs 'weights' rows");
        Weights a(T, 0, static_cast<int>(rows->size()));
        for (int k = 0; k < a.count(); ++k) {
            const toml::array* row = (*rows)[k].as_array();
            if (!row || static_cast<int>(row->size()) != T)
                throw ConfigError("each functional weight row needs one entry per component");
            for (int j = 0; j < T; ++j) a.values(j, k) = (*row)[j].value_or(0.0);
        }
        return FunctionalSpec::finite(a);
    }
    throw ConfigError("unknown functional kind '" + kind + "'");
}

/// c0 + sum_k c_k cos(k lambda) on the grid.
DensityGrid cosine_grid(const std::vector<double>& c, int M, const char* label) {
    if (c.empty()) throw ConfigError(std::string(label) + " needs at least one coefficient");
    return DensityGrid::scalar(M, [&](double l) {
        double v = 0.0;
        for (size_t k = 0; k < c.size(); ++k) v += c[k] * std::cos(static_cast<double>(k) * l);
        return v;
    }, label);
}

// ---- output helpers

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw DataError("cannot write " + tmp.string());
        os << content;
        if (!os) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
    spdlog::info("wrote {}", path.string());
}

std::string number(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

json complex_list(const CVector& v) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return {{"re", re}, {"im", im}};
}

json weights_json(const Weights& w) {
    json lags = json::array();
    for (int k = w.first; k <= w.last(); ++k) lags.push_back({{"k", k}, {"value", complex_list(w.at(k))}});
    return lags;
}

json grid_json(const DensityGrid& d) {
    json out = json::array();
    for (int m = 0; m < d.size(); ++m) {
        json row = {{"lambda", d.lambda(m)}};
        json vals = json::array();
        for (int i = 0; i < d.T; ++i)
            for (int j = 0; j < d.T; ++j) vals.push_back({d.values[m](i, j).real(), d.values[m](i, j).imag()});
        row["value"] = vals;
        out.push_back(row);
    }
    return out;
}

std::string h_csv(const CMatrix& h) {
    const int M = static_cast<int>(h.cols());
    std::ostringstream os;
    os << "lambda";
    for (int p = 0; p < h.rows(); ++p) os << ",abs_h_" << p + 1;
    os << "\n";
    for (int m = 0; m < M; ++m) {
        os << number(DensityGrid::grid_lambda(m, M));
        for (int p = 0; p < h.rows(); ++p) os << "," << number(std::abs(h(p, m)));
        os << "\n";
    }
    return os.str();
}

std::string series_csv(const Eigen::MatrixXd& x) {
    std::ostringstream os;
    os << "t";
    for (int j = 0; j < x.cols(); ++j) os << ",component_" << j + 1;
    os << "\n";
    for (int t = 0; t < x.rows(); ++t) {
        os << t;
        for (int j = 0; j < x.cols(); ++j) os << "," << number(x(t, j));
        os << "\n";
    }
    return os.str();
}

Eigen::MatrixXd read_series_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open observations file " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw DataError("observations file is empty: " + path.string());
    const int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cols < 2 || line.rfind("t", 0) != 0) throw DataError("observations need a header row 't,component_1,...'");
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw DataError("non-numeric cell at line " + std::to_string(lineno));
            row.push_back(v);
        }
        if (static_cast<int>(row.size()) != cols) throw DataError("ragged row at line " + std::to_string(lineno));
        rows.push_back(row);
    }
    if (rows.empty()) throw DataError("observations file has no data rows");
    Eigen::MatrixXd out(rows.size(), cols - 1);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 1; j < cols; ++j) out(i, j - 1) = rows[i][j];
    return out;
}

json diag_json(const ForecastDiagnostics& d) {
    return {{"rcond", d.rcond},
            {"solve_residual", d.solve_residual},
            {"doubling_change", d.doubling_change},
            {"truncation_stable", d.truncation_stable},
            {"subspace_residual", d.subspace_residual},
            {"minimality_value", d.minimality_value},
            {"notes", d.notes}};
}

json report_json(const SaddleReport& r) {
    json eqs = json::array();
    for (const auto& e : r.equations)
        eqs.push_back({{"name", e.name},
                       {"residual", e.residual},
                       {"sign_violation", e.sign_violation},
                       {"free_points", e.free_points}});
    return {{"equations", eqs},
            {"alpha_f", r.alpha_f},
            {"beta", r.beta},
            {"max_violation", r.max_violation},
            {"pass", r.pass},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"last_change", r.last_change},
            {"value", r.value},
            {"message", r.message}};
}

ForecastOptions forecast_options(const RunConfig& rc) {
    ForecastOptions o;
    o.trunc = trunc_size(rc);
    return o;
}

// ---- commands

void cmd_simulate(const RunConfig& rc) {
    const IncrementSpec spec = read_spec(rc);
    const toml::table* sim = rc.doc["simulate"].as_table();
    SimulationConfig cfg;
    cfg.spec = spec;
    cfg.increments = read_model(section(rc, "signal"), "[signal]");
    if (const toml::table* nz = rc.doc["noise"].as_table()) cfg.noise = read_model(*nz, "[noise]");
    if (sim) {
        cfg.length = (*sim)["length"].value_or(cfg.length);
        cfg.burn_in = (*sim)["burn_in"].value_or(cfg.burn_in);
        cfg.filter_length = (*sim)["filter_length"].value_or(cfg.filter_length);
    }
    cfg.seed = seed_value(rc);
    if (sim) cfg.grid = (*sim)["grid"].value_or(cfg.grid);
    if (rc.over.grid) cfg.grid = *rc.over.grid;
    spdlog::info("simulating {} points, seed {}", cfg.length, cfg.seed);
    const GmGenerator gen(cfg);
    const SimulatedPath path = gen.draw();
    write_atomic(rc.out / "series.csv", series_csv(path.zeta));
    write_atomic(rc.out / "signal.csv", series_csv(path.xi));
    json meta = {{"command", "simulate"},
                 {"length", cfg.length},
                 {"dimension", path.xi.cols()},
                 {"seed", cfg.seed},
                 {"burn_in", gen.config().burn_in},
                 {"degree", spec.degree()},
                 {"noise", cfg.noise.has_value()},
                 {"files", {"series.csv", "signal.csv"}}};
    write_atomic(rc.out / "simulate.json", meta.dump(2) + "\n");
}

void cmd_forecast(const RunConfig& rc) {
    const IncrementSpec spec = read_spec(rc);
    const int M = grid_size(rc);
    const DensityGrid f = signal_grid(rc, spec, M);
    const int T = f.T;
    const DensityGrid g = noise_grid(rc, T, M);
    const FunctionalSpec fn = read_functional(rc, T);
    const ForecastOptions opts = forecast_options(rc);
    spdlog::info("forecast on grid {} with truncation {}", M, opts.trunc);
    const ForecastSolution sol = spectral_characteristic(f, g, spec, fn, opts);

    json out = {{"command", "forecast"},
                {"grid", M},
                {"trunc", opts.trunc},
                {"dimension", T},
                {"mse", sol.mse},
                {"filter_available", sol.filter_available},
                {"diagnostics", diag_json(sol.diag)},
                {"c", weights_json(sol.c)}};
    if (sol.filter_available) out["level_weights"] = weights_json(sol.level);

    const toml::table* obs = rc.doc["observations"].as_table();
    if (obs) {
        const fs::path path = rc.base / required<std::string>(*obs, "path", "[observations]");
        Eigen::MatrixXd data = read_series_csv(path);
        if (data.cols() == 1 && T > 1) data = interleave(data.col(0), T);
        if (data.cols() != T) throw DataError("observation columns do not match the dimension");
        if (!sol.filter_available) throw ConfigError("point forecasts need filter weights for this increment spec");
        // point forecasts for each horizon up to the configured one
        std::ostringstream csv;
        csv << "horizon,component,estimate,mse\n";
        const int H = fn.kind == FunctionalKind::SingleValue ? fn.N : -1;
        json points = json::array();
        if (H >= 0) {
            for (int k = 0; k <= H; ++k) {
                const ForecastSolution sk = single_value_forecast(f, g, spec, k, fn.component, opts);
                const double est = apply_forecast(data, sk, spec).real();
                csv << k << "," << fn.component << "," << number(est) << "," << number(sk.mse) << "\n";
                points.push_back({{"horizon", k}, {"estimate", est}, {"mse", sk.mse}});
            }
        } else {
            const double est = apply_forecast(data, sol, spec).real();
            csv << "-1,-1," << number(est) << "," << number(sol.mse) << "\n";
            points.push_back({{"horizon", -1}, {"estimate", est}, {"mse", sol.mse}});
        }
        out["observations"] = data.rows();
        out["point_forecasts"] = points;
        write_atomic(rc.out / "forecasts.csv", csv.str());
    }
    write_atomic(rc.out / "h.csv", h_csv(sol.h));
    write_atomic(rc.out / "forecast.json", out.dump(2) + "\n");
}

AdmissibleClass signal_class(const RunConfig& rc, const IncrementSpec& spec, int M) {
    const toml::table* t = rc.doc["robust"]["signal"].as_table();
    const std::string kind = t ? (*t)["kind"].value_or(std::string("fixed")) : std::string("fixed");
    const int variant = t ? (*t)["variant"].value_or(1) : 1;
    if (kind == "fixed") return AdmissibleClass::fixed(signal_grid(rc, spec, M));
    if (kind == "moment") return AdmissibleClass::moment_class(required<double>(*t, "moment", "[robust.signal]"), variant);
    if (kind == "contaminated")
        return AdmissibleClass::contaminated(signal_grid(rc, spec, M), required<double>(*t, "eps", "[robust.signal]"),
                                             required<double>(*t, "moment", "[robust.signal]"), variant);
    throw ConfigError("unknown signal class '" + kind + "'");
}

AdmissibleClass noise_class(const RunConfig& rc, int M) {
    const toml::table* t = rc.doc["robust"]["noise"].as_table();
    const std::string kind = t ? (*t)["kind"].value_or(std::string("fixed")) : std::string("fixed");
    const int variant = t ? (*t)["variant"].value_or(1) : 1;
    if (kind == "fixed") return AdmissibleClass::fixed(noise_grid(rc, 1, M));
    if (kind == "moment") return AdmissibleClass::moment_class(required<double>(*t, "moment", "[robust.noise]"), variant);
    if (kind == "band")
        return AdmissibleClass::band(cosine_grid(number_list((*t)["lower"], "lower"), M, "V"),
                                     cosine_grid(number_list((*t)["upper"], "upper"), M, "U"),
                                     required<double>(*t, "moment", "[robust.noise]"), variant);
    if (kind == "neighborhood")
        return AdmissibleClass::neighborhood(noise_grid(rc, 1, M), required<double>(*t, "delta", "[robust.noise]"),
                                             variant);
    throw ConfigError("unknown noise class '" + kind + "'");
}

void cmd_robust(const RunConfig& rc) {
    const IncrementSpec spec = read_spec(rc);
    MinimaxOptions o;
    o.grid = grid_size(rc);
    o.forecast = forecast_options(rc);
    if (const toml::table* t = rc.doc["robust"].as_table()) {
        o.damping = (*t)["damping"].value_or(o.damping);
        o.max_iter = (*t)["max_iter"].value_or(o.max_iter);
        o.tol = (*t)["tol"].value_or(o.tol);
    }
    const AdmissibleClass fc = signal_class(rc, spec, o.grid);
    const AdmissibleClass gc = noise_class(rc, o.grid);
    const FunctionalSpec fn = read_functional(rc, 1);
    spdlog::info("least favorable pair: signal {}, noise {}", fc.describe(), gc.describe());
    const LeastFavorable lf = solve_least_favorable(fc, gc, spec, fn, o);
    if (!lf.report.converged) spdlog::warn("{}", lf.report.message);
    const int samples = rc.doc["robust"]["audit_samples"].value_or(0);
    json out = {{"command", "robust"},
                {"grid", o.grid},
                {"trunc", o.forecast.trunc},
                {"signal_class", fc.describe()},
                {"noise_class", gc.describe()},
                {"worst_case_mse", lf.report.value},
                {"report", report_json(lf.report)}};
    if (samples > 0) {
        const SampleAudit audit = verify_saddle(lf.f0, lf.g0, fc, gc, spec, fn, samples, seed_value(rc), 1e-4, o.forecast);
        out["audit"] = {{"samples", audit.samples},
                        {"violations", audit.violations},
                        {"worst_excess", audit.worst_excess},
                        {"pass", audit.pass}};
    }
    json h = json::array();
    for (int m = 0; m < o.grid; ++m)
        h.push_back({lf.solution.h(0, m).real(), lf.solution.h(0, m).imag()});
    out["h0"] = h;
    out["f0"] = grid_json(lf.f0);
    out["g0"] = grid_json(lf.g0);
    write_atomic(rc.out / "h0.csv", h_csv(lf.solution.h));
    write_atomic(rc.out / "robust.json", out.dump(2) + "\n");
}

void cmd_factorize(const RunConfig& rc) {
    const IncrementSpec spec = read_spec(rc);
    const int M = grid_size(rc);
    const toml::table* t = rc.doc["factorize"].as_table();
    const std::string target = t ? (*t)["target"].value_or(std::string("observed")) : std::string("observed");
    const int K = t ? (*t)["K"].value_or(64) : 64;
    const DensityGrid f = signal_grid(rc, spec, M);
    Factorization fac;
    if (target == "observed") {
        fac = factorize_increment_weighted(f, noise_grid(rc, f.T, M), spec, K);
    } else if (target == "increments") {
        fac = canonical_factorize(eval_density(read_model(section(rc, "signal"), "[signal]"), M), K);
    } else if (target == "noise") {
        fac = canonical_factorize(noise_grid(rc, f.T, M), K);
    } else {
        throw ConfigError("unknown factorization target '" + target + "'");
    }
    const Factorization psi = invert_factor(fac, K);
    json coeffs = json::array();
    for (int k = 0; k < fac.length(); ++k) {
        json rows = json::array();
        for (int i = 0; i < fac.dim(); ++i) {
            json row = json::array();
            for (int j = 0; j < fac.dim(); ++j) row.push_back({fac.coeffs[k](i, j).real(), fac.coeffs[k](i, j).imag()});
            rows.push_back(row);
        }
        coeffs.push_back(rows);
    }
    json out = {{"command", "factorize"},
                {"target", target},
                {"grid", M},
                {"K", K},
                {"normalization", fac.normalization},
                {"reconstruction_residual", fac.residual},
                {"inverse_residual", psi.residual},
                {"converged", fac.converged},
                {"iterations", fac.iterations},
                {"coefficients", coeffs}};
    write_atomic(rc.out / "factorize.json", out.dump(2) + "\n");
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("gmi");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("GMI_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Forecasting of sequences with generalized multiple increments"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    Overrides over;
    std::uint64_t seed = 0;
    int grid = 0, trunc = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML run configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed override");
        sub->add_option("--grid", grid, "frequency grid size override");
        sub->add_option("--trunc", trunc, "truncation override");
    };
    std::vector<std::pair<CLI::App*, void (*)(const RunConfig&)>> commands = {
        {app.add_subcommand("simulate", "simulate a sequence"), cmd_simulate},
        {app.add_subcommand("forecast", "optimal estimate and point forecasts"), cmd_forecast},
        {app.add_subcommand("robust", "least favorable densities and minimax estimate"), cmd_robust},
        {app.add_subcommand("factorize", "canonical factorization of a density"), cmd_factorize},
    };
    for (auto& c : commands) add_common(c.first);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        RunConfig rc;
        const fs::path cfg(config_path);
        if (!fs::exists(cfg)) throw ConfigError("config file not found: " + config_path);
        rc.doc = toml::parse_file(cfg.string());
        rc.base = cfg.parent_path();
        rc.out = out_dir;
        fs::create_directories(rc.out);
        for (auto& c : commands) {
            if (!c.first->parsed()) continue;
            if (c.first->count("--seed")) rc.over.seed = seed;
            if (c.first->count("--grid")) rc.over.grid = grid;
            if (c.first->count("--trunc")) rc.over.trunc = trunc;
            c.second(rc);
        }
    } catch (const toml::parse_error& e) {
        spdlog::error("config: {}", e.what());
        return kExitConfig;
    } catch (const ConfigError& e) {
        spdlog::error("config: {}", e.what());
        return kExitConfig;
    } catch (const DataError& e) {
        spdlog::error("data: {}", e.what());
        return kExitData;
    } catch (const NumericError& e) {
        spdlog::error("numeric: {}", e.what());
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        spdlog::error("io: {}", e.what());
        return kExitData;
    }
    return 0;
}
