// arhlab command line: simulation, moment estimation, ARH(1) fitting and
// prediction, rolling cross-validation, change-point diagnostics, the El Nino
// forecasting pipeline, and the Monte Carlo experiment drivers.

#include "arhlab/arh.hpp"
#include "arhlab/elnino.hpp"
#include "arhlab/io.hpp"
#include "arhlab/mc.hpp"
#include "arhlab/moments.hpp"
#include "arhlab/process.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace arhlab;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// config files: `key = value` lines, '#' comments, errors carry line numbers

std::map<std::string, std::string> parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    static const std::set<std::string> known{
        "kind",  "a",         "n",           "seed",       "burnin",
        "grid",  "rho_csv",   "rho_diag",    "noise_count", "noise_decay",
        "noise_eigenvalues", "mean_csv",     "aj_csv",     "aj_diag"};
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!known.count(key)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
        if (out.count(key)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": duplicate key '" + key + "'");
        }
        out[key] = value;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

RegScheme parse_scheme(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("scheme must look like cutoff:4 or penalized:0.1, got " + text);
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "cutoff") return RegScheme::cutoff(std::stoll(arg));
    if (kind == "penalized") return RegScheme::penalized(std::stod(arg));
    if (kind == "tikhonov") return RegScheme::tikhonov(std::stod(arg));
    throw std::runtime_error("unknown scheme kind '" + kind + "'");
}

ordered_json scheme_json(const RegScheme& s) {
    ordered_json j;
    switch (s.kind) {
        case RegScheme::Kind::SpectralCutoff:
            j["kind"] = "cutoff";
            j["k"] = s.k;
            break;
        case RegScheme::Kind::Penalized:
            j["kind"] = "penalized";
            j["alpha"] = s.alpha;
            break;
        case RegScheme::Kind::Tikhonov:
            j["kind"] = "tikhonov";
            j["alpha"] = s.alpha;
            break;
    }
    return j;
}

RegScheme scheme_from_json(const ordered_json& j) {
    const std::string kind = j.at("kind");
    if (kind == "cutoff") return RegScheme::cutoff(j.at("k").get<Index>());
    if (kind == "penalized") return RegScheme::penalized(j.at("alpha").get<double>());
    return RegScheme::tikhonov(j.at("alpha").get<double>());
}

OperatorMatrix diagonal_operator(const GridPtr& grid, const std::vector<double>& coefs) {
    Matrix basis = fourier_basis(grid, static_cast<int>(coefs.size()));
    OperatorMatrix rho = zero_operator(grid);
    for (std::size_t i = 0; i < coefs.size(); ++i) {
        Curve ei(grid, basis.col(static_cast<Index>(i)));
        rho = rho + coefs[i] * tensor_product(ei, ei);
    }
    return rho;
}

ordered_json curve_json(const Curve& c) {
    ordered_json arr = ordered_json::array();
    for (Index i = 0; i < c.values.size(); ++i) arr.push_back(c.values(i));
    return arr;
}

std::string plot_csv(const std::vector<std::pair<std::string, Vector>>& series) {
    std::ostringstream out;
    out << "series,t,value\n";
    for (const auto& [name, values] : series) {
        for (Index t = 0; t < values.size(); ++t) {
            out << name << "," << t << "," << format_double(values(t)) << "\n";
        }
    }
    return out.str();
}

// shared simulate-model options (flags override config values)
struct SimOptions {
    std::string kind = "arh1";
    double a = 1.0;
    int n = 200;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int burnin = 200;
    int grid_m = 101;
    int noise_count = 20;
    double noise_decay = 2.0;
    std::vector<double> noise_eigenvalues;
    std::string rho_csv;
    std::string rho_diag;  // "0.5,0.3" or "0.2;0.4,0.2" for higher order
    std::string mean_csv;
    std::string config_path;
    std::set<std::string> flags_seen;  // config must not override explicit flags
};

const std::map<std::string, std::string>& config_flag_names() {
    static const std::map<std::string, std::string> names{
        {"kind", "kind"},           {"a", "a"},
        {"n", "n"},                 {"seed", "seed"},
        {"burnin", "burnin"},       {"grid", "grid"},
        {"noise_count", "noise-count"}, {"noise_decay", "noise-decay"},
        {"rho_csv", "rho-csv"},     {"rho_diag", "rho-diag"},
        {"mean_csv", "mean-csv"}};
    return names;
}

void merge_config(SimOptions& opt) {
    if (opt.config_path.empty()) return;
    auto cfg = parse_config(opt.config_path);
    auto take = [&](const char* key, auto setter) {
        if (!cfg.count(key)) return;
        const auto& names = config_flag_names();
        const auto flag = names.find(key);
        if (flag != names.end() && opt.flags_seen.count(flag->second)) return;
        setter(cfg.at(key));
    };
    take("kind", [&](const std::string& v) { opt.kind = v; });
    take("a", [&](const std::string& v) { opt.a = std::stod(v); });
    take("n", [&](const std::string& v) { opt.n = std::stoi(v); });
    take("seed", [&](const std::string& v) {
        opt.seed = std::stoull(v);
        opt.seed_set = true;
    });
    take("burnin", [&](const std::string& v) { opt.burnin = std::stoi(v); });
    take("grid", [&](const std::string& v) { opt.grid_m = std::stoi(v); });
    take("noise_count", [&](const std::string& v) { opt.noise_count = std::stoi(v); });
    take("noise_decay", [&](const std::string& v) { opt.noise_decay = std::stod(v); });
    take("noise_eigenvalues",
         [&](const std::string& v) { opt.noise_eigenvalues = parse_double_list(v); });
    take("rho_csv", [&](const std::string& v) { opt.rho_csv = v; });
    take("rho_diag", [&](const std::string& v) { opt.rho_diag = v; });
    take("mean_csv", [&](const std::string& v) { opt.mean_csv = v; });
    // linear-process coefficients share the operator-building path
    if (!opt.flags_seen.count("rho-csv") && cfg.count("aj_csv")) opt.rho_csv = cfg.at("aj_csv");
    if (!opt.flags_seen.count("rho-diag") && cfg.count("aj_diag")) opt.rho_diag = cfg.at("aj_diag");
}

NoiseSpec build_noise(const SimOptions& opt, const GridPtr& grid) {
    NoiseSpec noise = NoiseSpec::fourier(
        grid,
        opt.noise_eigenvalues.empty() ? opt.noise_count
                                      : static_cast<int>(opt.noise_eigenvalues.size()),
        opt.noise_decay, opt.seed);
    if (!opt.noise_eigenvalues.empty()) {
        noise.eigenvalues = Eigen::Map<const Vector>(
            opt.noise_eigenvalues.data(), static_cast<Index>(opt.noise_eigenvalues.size()));
        for (Index p = 1; p < noise.eigenvalues.size(); ++p) {
            if (noise.eigenvalues(p) <= 0 || noise.eigenvalues(p) > noise.eigenvalues(p - 1)) {
                throw std::runtime_error("noise eigenvalues must be positive and nonincreasing");
            }
        }
    }
    return noise;
}

std::vector<OperatorMatrix> build_rhos(const SimOptions& opt, const GridPtr& grid) {
    std::vector<OperatorMatrix> rhos;
    if (!opt.rho_csv.empty()) {
        std::stringstream ss(opt.rho_csv);
        std::string file;
        while (std::getline(ss, file, ';')) {
            rhos.push_back(read_operator_csv(file, grid));
        }
    } else if (!opt.rho_diag.empty()) {
        std::stringstream ss(opt.rho_diag);
        std::string group;
        while (std::getline(ss, group, ';')) {
            rhos.push_back(diagonal_operator(grid, parse_double_list(group)));
        }
    } else {
        rhos.push_back(diagonal_operator(grid, {0.5, 0.3, 0.2}));
    }
    return rhos;
}

int run_simulate(const SimOptions& opt_in, const fs::path& out_dir) {
    SimOptions opt = opt_in;
    merge_config(opt);
    if (!opt.seed_set) throw std::runtime_error("simulate: --seed is required");
    GridPtr grid = Grid::uniform(opt.grid_m);

    SegmentedProcess sim;
    ordered_json params;
    params["kind"] = opt.kind;
    params["n"] = opt.n;
    params["seed"] = opt.seed;
    params["grid"] = opt.grid_m;

    if (opt.kind == "ou") {
        params["a"] = opt.a;
        sim = simulate_ou_segments(opt.a, opt.n, grid, opt.seed);
    } else if (opt.kind == "wong") {
        sim = simulate_wong_segments(opt.n, grid, opt.seed);
    } else if (opt.kind == "arh1" || opt.kind == "arhp") {
        NoiseSpec noise = build_noise(opt, grid);
        std::vector<OperatorMatrix> rhos = build_rhos(opt, grid);
        params["order"] = rhos.size();
        params["burnin"] = opt.burnin;
        sim = simulate_arh_p(rhos, noise, opt.n, opt.burnin);
        if (rhos.size() == 1) sim.truth = rhos.front();
    } else if (opt.kind == "linear") {
        NoiseSpec noise = build_noise(opt, grid);
        LinearProcessSpec spec;
        spec.noise = noise;
        if (!opt.rho_diag.empty() || !opt.rho_csv.empty()) {
            SimOptions tmp = opt;
            spec.coefficients = build_rhos(tmp, grid);
        }
        if (!opt.mean_csv.empty()) {
            auto curves = read_sample_csv(opt.mean_csv, grid);
            spec.mean = curves.at(0);
        }
        sim.sample = simulate_linear_process(spec, opt.n);
        params["order"] = spec.coefficients.size();
    } else if (opt.kind == "noise") {
        NoiseSpec noise = build_noise(opt, grid);
        sim.sample = gen_white_noise(noise, opt.n);
        sim.innovations = sim.sample;
    } else {
        throw std::runtime_error("unknown simulate kind '" + opt.kind + "'");
    }

    write_sample_csv(out_dir / "sample.csv", sim.sample);
    if (!sim.innovations.empty()) {
        write_sample_csv(out_dir / "innovations.csv", sim.innovations, false);
    }
    if (sim.truth) {
        write_operator_csv(out_dir / "truth_operator.csv", *sim.truth, false);
    }
    {
        // concatenated path for plotting; segment junctions collapse for the
        // continuous-path processes
        const bool shared_junction = opt.kind == "ou" || opt.kind == "wong";
        const Index m = grid->size();
        std::vector<double> path;
        for (std::size_t k = 0; k < sim.sample.size(); ++k) {
            const Index start = shared_junction && k > 0 ? 1 : 0;
            for (Index j = start; j < m; ++j) path.push_back(sim.sample[k].values(j));
        }
        Vector flat = Eigen::Map<const Vector>(path.data(), static_cast<Index>(path.size()));
        atomic_write(out_dir / "path_plot.csv", plot_csv({{opt.kind, flat}}));
    }
    write_json(out_dir / "manifest.json", make_manifest("simulate", params, {}));
    std::cout << "wrote " << (out_dir / "sample.csv").string() << " (" << sim.sample.size()
              << " curves)\n";
    return 0;
}

int run_moments(const fs::path& input, const std::string& lags_text, bool center,
                const fs::path& out_dir) {
    std::vector<Curve> sample = read_sample_csv(input);
    std::vector<int> lags;
    for (double v : parse_double_list(lags_text)) lags.push_back(static_cast<int>(v));
    MomentSet ms = compute_moments(sample, lags, center);

    write_sample_csv(out_dir / "mean.csv", {ms.mean});
    write_operator_csv(out_dir / "cov.csv", ms.cov, false);
    for (const auto& [h, op] : ms.crosscov) {
        write_operator_csv(out_dir / ("crosscov_" + std::to_string(h) + ".csv"), op, false);
    }

    EigenSystem eig = functional_pca(ms.cov, std::min<Index>(10, ms.cov.grid->size()));
    ordered_json summary;
    summary["n"] = ms.n;
    summary["trace"] = trace_of(ms.cov);
    summary["leading_eigenvalues"] = std::vector<double>(
        eig.eigenvalues.data(), eig.eigenvalues.data() + eig.count());
    summary["centered"] = center;
    write_json(out_dir / "moments.json", summary);

    ordered_json params;
    params["in"] = input.string();
    params["lags"] = lags_text;
    params["center"] = center;
    write_json(out_dir / "manifest.json", make_manifest("moments", params, {input}));
    return 0;
}

ordered_json cv_json(const CvReport& rep) {
    ordered_json table = ordered_json::array();
    for (const auto& c : rep.candidates) {
        ordered_json row;
        row["scheme"] = scheme_json(c.scheme);
        row["mse"] = c.mse;
        row["evaluations"] = c.evaluations;
        table.push_back(row);
    }
    ordered_json j;
    j["origin"] = rep.origin;
    j["selected"] = rep.selected;
    j["selected_scheme"] = scheme_json(rep.selected_scheme());
    j["table"] = table;
    return j;
}

int run_estimate(const fs::path& input, const std::string& scheme_text, double cv_origin,
                 const fs::path& out_dir) {
    std::vector<Curve> sample = read_sample_csv(input);

    RegScheme scheme = RegScheme::cutoff(1);
    std::optional<CvReport> cv;
    if (scheme_text == "cv") {
        std::vector<RegScheme> candidates;
        const Index kmax = std::min<Index>(6, sample[0].grid->size());
        for (Index k = 1; k <= kmax; ++k) candidates.push_back(RegScheme::cutoff(k));
        cv = cross_validate(sample, candidates, cv_origin);
        scheme = cv->selected_scheme();
    } else if (scheme_text == "auto") {
        scheme = RegScheme::cutoff(cutoff_schedule(static_cast<int>(sample.size())));
    } else {
        scheme = parse_scheme(scheme_text);
    }

    ArhEstimate est = estimate_rho(sample, scheme);
    write_operator_csv(out_dir / "rho_hat.csv", est.rho_hat);
    write_sample_csv(out_dir / "mean.csv", {est.mean}, false);

    const double yw_residual =
        hs_norm(est.moments.crosscov.at(1) - compose(est.rho_hat, est.moments.cov));

    ordered_json model;
    model["schema"] = "arhlab-model-v1";
    model["scheme"] = scheme_json(est.scheme);
    model["n"] = est.n;
    model["grid_points"] = est.rho_hat.grid->size();
    model["projector_rank"] = est.projector_rank;
    const Index show = std::min<Index>(10, est.eigens.count());
    model["leading_eigenvalues"] =
        std::vector<double>(est.eigens.eigenvalues.data(), est.eigens.eigenvalues.data() + show);
    model["yule_walker_residual_hs"] = yw_residual;
    if (cv) model["cv"] = cv_json(*cv);
    model["files"] = {{"rho", "rho_hat.csv"}, {"grid", "rho_hat.grid.csv"}, {"mean", "mean.csv"}};
    write_json(out_dir / "model.json", model);

    ordered_json params;
    params["in"] = input.string();
    params["scheme"] = scheme_text;
    write_json(out_dir / "manifest.json", make_manifest("estimate", params, {input}));
    std::cout << "estimated with scheme " << est.scheme.describe() << "\n";
    return 0;
}

int run_predict(const fs::path& model_path, const std::string& x_spec, const fs::path& sample_path,
                const fs::path& out_dir) {
    const fs::path model_dir = model_path.parent_path();
    std::ifstream in(model_path);
    if (!in) throw std::runtime_error("cannot open model " + model_path.string());
    ordered_json model = ordered_json::parse(in);

    GridPtr grid = read_grid_csv(model_dir / model["files"]["grid"].get<std::string>());
    ArhEstimate est;
    est.rho_hat = read_operator_csv(model_dir / model["files"]["rho"].get<std::string>(), grid);
    est.mean = read_sample_csv(model_dir / model["files"]["mean"].get<std::string>(), grid).at(0);
    est.scheme = scheme_from_json(model["scheme"]);

    Curve x = zero_curve(grid);
    if (x_spec == "last") {
        if (sample_path.empty()) throw std::runtime_error("predict --x last needs --in sample");
        x = read_sample_csv(sample_path, grid).back();
    } else {
        x = read_sample_csv(x_spec, grid).at(0);
    }

    Curve forecast = predict(est, x);
    write_sample_csv(out_dir / "prediction.csv", {forecast}, false);

    ordered_json params;
    params["model"] = model_path.string();
    params["x"] = x_spec;
    std::vector<fs::path> inputs{model_path};
    if (!sample_path.empty()) inputs.push_back(sample_path);
    write_json(out_dir / "manifest.json", make_manifest("predict", params, inputs));
    return 0;
}

int run_cv(const fs::path& input, const std::string& candidates_text, double origin,
           const fs::path& out_dir) {
    std::vector<Curve> sample = read_sample_csv(input);
    std::vector<RegScheme> candidates;
    std::stringstream ss(candidates_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) candidates.push_back(parse_scheme(item));
    }
    CvReport rep = cross_validate(sample, candidates, origin);
    write_json(out_dir / "cv.json", cv_json(rep));

    ordered_json params;
    params["in"] = input.string();
    params["candidates"] = candidates_text;
    params["origin"] = origin;
    write_json(out_dir / "manifest.json", make_manifest("cv", params, {input}));
    std::cout << "selected " << rep.selected_scheme().describe() << "\n";
    return 0;
}

int run_changepoint(const fs::path& input, const std::string& scheme_text, int reps, double level,
                    std::uint64_t seed, const fs::path& out_dir) {
    std::vector<Curve> sample = read_sample_csv(input);
    RegScheme scheme = scheme_text == "auto"
                           ? RegScheme::cutoff(cutoff_schedule(static_cast<int>(sample.size())))
                           : parse_scheme(scheme_text);
    ArhEstimate est = estimate_rho(sample, scheme);
    ResidualSeries res = residuals(est, sample);
    ChangepointStatistic cp = changepoint_statistic(res);
    const double q = changepoint_null_quantile(est, sample, reps, level, seed);

    Vector bridge_norms(static_cast<Index>(cp.partial_sums.size()));
    const Vector& total = cp.partial_sums.back().values;
    for (std::size_t i = 0; i < cp.partial_sums.size(); ++i) {
        const double frac = static_cast<double>(i + 1) / cp.partial_sums.size();
        Curve b(sample[0].grid, cp.partial_sums[i].values - frac * total);
        bridge_norms(static_cast<Index>(i)) = norm(b);
    }
    atomic_write(out_dir / "cusum_path.csv", plot_csv({{"bridge_norm", bridge_norms}}));

    ordered_json report;
    report["max_cusum"] = cp.max_cusum;
    report["null_quantile"] = q;
    report["level"] = level;
    report["reps"] = reps;
    report["reject"] = cp.max_cusum > q;
    report["scheme"] = scheme_json(scheme);
    write_json(out_dir / "changepoint.json", report);

    ordered_json params;
    params["in"] = input.string();
    params["scheme"] = scheme_text;
    params["reps"] = reps;
    params["level"] = level;
    params["seed"] = seed;
    write_json(out_dir / "manifest.json", make_manifest("changepoint", params, {input}));
    std::cout << "max_cusum " << cp.max_cusum << " vs null quantile " << q
              << (cp.max_cusum > q ? " -> reject\n" : " -> keep\n");
    return 0;
}

int run_elnino(const fs::path& data_arg, const std::string& smoothing_text, int basis_dim,
               double penalty, std::uint64_t seed, const fs::path& out_dir) {
    fs::path data = data_arg;
    if (!fs::exists(data)) {
        if (const char* env = std::getenv("ARHLAB_DATA_DIR")) {
            const fs::path candidate = fs::path(env) / data_arg;
            if (fs::exists(candidate)) data = candidate;
        }
    }
    ScalarSeries series = ingest_monthly_csv(data);

    ElninoConfig cfg;
    cfg.seed = seed;
    cfg.smoothing.kind = smoothing_text == "none" ? SmoothingConfig::Kind::None
                                                  : SmoothingConfig::Kind::PenalizedBasis;
    cfg.smoothing.basis_dim = basis_dim;
    cfg.smoothing.penalty = penalty;

    ElninoResult result = elnino_pipeline(series, cfg);

    ordered_json report;
    report["mse"] = result.report.mse;
    report["rmae_percent"] = result.report.rmae_percent;
    report["predictions"] = curve_json(Curve(Grid::uniform(12), result.report.predictions));
    report["actuals"] = curve_json(Curve(Grid::uniform(12), result.report.actuals));
    report["chosen_scheme"] = scheme_json(result.chosen_scheme);
    report["chosen_penalty"] = result.chosen_penalty;
    report["train_years"] = result.train_years;
    report["scheme_cv"] = cv_json(result.scheme_cv);
    write_json(out_dir / "elnino_report.json", report);

    write_sample_csv(out_dir / "prediction.csv", {result.prediction_curve});
    atomic_write(out_dir / "elnino_plot.csv",
                 plot_csv({{"actual", result.report.actuals},
                           {"predicted", result.report.predictions}}));

    ordered_json params;
    params["data"] = data.string();
    params["smoothing"] = smoothing_text;
    params["basis_dim"] = basis_dim;
    params["penalty"] = penalty;
    params["seed"] = seed;
    write_json(out_dir / "manifest.json", make_manifest("elnino", params, {data}));
    std::cout << "MSE " << result.report.mse << "  RMAE " << result.report.rmae_percent
              << "%  scheme " << result.chosen_scheme.describe() << "\n";
    return 0;
}

int run_mc_lln(const SimOptions& opt_in, int reps, const fs::path& out_dir) {
    SimOptions opt = opt_in;
    merge_config(opt);
    if (!opt.seed_set) throw std::runtime_error("mc-lln: --seed is required");
    GridPtr grid = Grid::uniform(opt.grid_m);
    NoiseSpec noise = build_noise(opt, grid);
    std::vector<OperatorMatrix> rhos = build_rhos(opt, grid);
    if (rhos.size() != 1) throw std::runtime_error("mc-lln: needs a single rho");
    ArhSpec spec{rhos.front(), noise, opt.burnin};

    McLlnReport rep = mc_lln_rate(spec, opt.n, reps);

    ordered_json j;
    j["estimate"] = rep.estimate;
    j["standard_error"] = rep.standard_error;
    j["longrun_trace"] = rep.longrun;
    j["ratio"] = rep.ratio;
    j["n"] = opt.n;
    j["reps"] = reps;
    if (rep.wide_variance) j["wide_variance"] = true;
    write_json(out_dir / "mc_lln.json", j);

    ordered_json params;
    params["n"] = opt.n;
    params["reps"] = reps;
    params["seed"] = opt.seed;
    params["rho_diag"] = opt.rho_diag;
    write_json(out_dir / "manifest.json", make_manifest("mc-lln", params, {}));
    std::cout << "n E||S_n/n||^2 = " << rep.estimate << " (SE " << rep.standard_error
              << "), longrun trace " << rep.longrun << ", ratio " << rep.ratio << "\n";
    return 0;
}

int run_mc_clt(const SimOptions& opt_in, int batches, int batch_size, const fs::path& out_dir) {
    SimOptions opt = opt_in;
    merge_config(opt);
    if (!opt.seed_set) throw std::runtime_error("mc-clt: --seed is required");
    GridPtr grid = Grid::uniform(opt.grid_m);
    NoiseSpec noise = build_noise(opt, grid);
    std::vector<OperatorMatrix> rhos = build_rhos(opt, grid);
    if (rhos.size() != 1) throw std::runtime_error("mc-clt: needs a single rho");
    ArhSpec spec{rhos.front(), noise, opt.burnin};

    McCltReport rep = mc_mean_clt(spec, opt.n, batches, batch_size);

    ordered_json dirs = ordered_json::array();
    for (const auto& d : rep.directions) {
        ordered_json row;
        row["variance"] = d.variance;
        row["variance_se"] = d.variance_se;
        row["target"] = d.target;
        row["normality_reject_rate"] = d.normality_reject_rate;
        dirs.push_back(row);
    }
    ordered_json j;
    j["directions"] = dirs;
    j["batches"] = rep.batches;
    j["batch_size"] = rep.batch_size;
    j["level"] = rep.level;
    j["n"] = opt.n;
    write_json(out_dir / "mc_clt.json", j);

    ordered_json params;
    params["n"] = opt.n;
    params["batches"] = batches;
    params["batch_size"] = batch_size;
    params["seed"] = opt.seed;
    params["rho_diag"] = opt.rho_diag;
    write_json(out_dir / "manifest.json", make_manifest("mc-clt", params, {}));
    for (std::size_t p = 0; p < rep.directions.size(); ++p) {
        std::cout << "direction " << p + 1 << ": variance " << rep.directions[p].variance
                  << " target " << rep.directions[p].target << " reject rate "
                  << rep.directions[p].normality_reject_rate << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arhlab: linear processes on function spaces"};
    app.require_subcommand(1);

    SimOptions sim;
    std::string out_text = ".";
    int reps = 200;
    int batches = 100;
    int batch_size = 50;
    double level = 0.95;
    std::string input, scheme_text = "auto", candidates_text, x_spec = "last";
    std::string lags_text = "0,1";
    bool no_center = false;
    double origin = 0.75;
    std::string data_file = "elnino_synthetic.csv", smoothing_text = "penalized";
    int basis_dim = 8;
    double penalty = -1.0;

    auto add_sim_options = [&](CLI::App* cmd) {
        cmd->add_option("--kind", sim.kind, "ou|wong|arh1|arhp|linear|noise");
        cmd->add_option("--a", sim.a, "O-U mean-reversion rate");
        cmd->add_option("--n", sim.n, "sample size");
        cmd->add_option("--seed", sim.seed, "rng seed (required)")->each([&](const std::string&) {
            sim.seed_set = true;
        });
        cmd->add_option("--burnin", sim.burnin, "burn-in iterations");
        cmd->add_option("--grid", sim.grid_m, "grid points");
        cmd->add_option("--noise-count", sim.noise_count, "noise eigenvalue count");
        cmd->add_option("--noise-decay", sim.noise_decay, "gamma_p = p^-decay");
        cmd->add_option("--rho-csv", sim.rho_csv, "operator kernel CSV (';'-separated for arhp)");
        cmd->add_option("--rho-diag", sim.rho_diag,
                        "diagonal coefficients, e.g. 0.5,0.3 (';'-separated groups for arhp)");
        cmd->add_option("--mean-csv", sim.mean_csv, "mean curve CSV");
        cmd->add_option("--config", sim.config_path, "key=value config file");
    };

    CLI::App* c_sim = app.add_subcommand("simulate", "simulate a process, write sample CSVs");
    add_sim_options(c_sim);
    c_sim->add_option("--out", out_text, "output directory");

    CLI::App* c_mom = app.add_subcommand("moments", "empirical mean and lag covariances");
    c_mom->add_option("--in", input, "sample CSV")->required();
    c_mom->add_option("--lags", lags_text, "comma list of lags");
    c_mom->add_flag("--no-center", no_center, "skip mean subtraction");
    c_mom->add_option("--out", out_text, "output directory");

    CLI::App* c_est = app.add_subcommand("estimate", "fit rho_hat = Delta_n Gamma_n^dagger");
    c_est->add_option("--in", input, "sample CSV")->required();
    c_est->add_option("--scheme", scheme_text, "cutoff:K | penalized:A | tikhonov:A | auto | cv");
    c_est->add_option("--origin", origin, "CV origin fraction");
    c_est->add_option("--out", out_text, "output directory");

    CLI::App* c_pred = app.add_subcommand("predict", "one-step prediction from a fitted model");
    std::string model_text;
    c_pred->add_option("--model", model_text, "model.json path")->required();
    c_pred->add_option("--x", x_spec, "'last' or a one-row curve CSV");
    c_pred->add_option("--in", input, "sample CSV (for --x last)");
    c_pred->add_option("--out", out_text, "output directory");

    CLI::App* c_cv = app.add_subcommand("cv", "rolling-origin scheme selection");
    c_cv->add_option("--in", input, "sample CSV")->required();
    c_cv->add_option("--candidates", candidates_text, "comma list, e.g. cutoff:1,cutoff:2")
        ->required();
    c_cv->add_option("--origin", origin, "origin fraction");
    c_cv->add_option("--out", out_text, "output directory");

    CLI::App* c_cp = app.add_subcommand("changepoint", "residual CUSUM with Monte Carlo null");
    c_cp->add_option("--in", input, "sample CSV")->required();
    c_cp->add_option("--scheme", scheme_text, "scheme or 'auto'");
    c_cp->add_option("--reps", reps, "null replications");
    c_cp->add_option("--level", level, "quantile level");
    c_cp->add_option("--seed", sim.seed, "rng seed (required)")->each([&](const std::string&) {
        sim.seed_set = true;
    });
    c_cp->add_option("--out", out_text, "output directory");

    CLI::App* c_el = app.add_subcommand("elnino", "yearly-curve forecasting pipeline");
    c_el->add_option("--data", data_file, "monthly CSV (year,month,value)");
    c_el->add_option("--smoothing", smoothing_text, "none | penalized");
    c_el->add_option("--dim", basis_dim, "spline basis dimension");
    c_el->add_option("--penalty", penalty, "roughness penalty (negative = select by CV)");
    c_el->add_option("--seed", sim.seed, "rng seed (required)")->each([&](const std::string&) {
        sim.seed_set = true;
    });
    c_el->add_option("--out", out_text, "output directory");

    CLI::App* c_lln = app.add_subcommand("mc-lln", "Monte Carlo LLN-rate experiment");
    add_sim_options(c_lln);
    c_lln->add_option("--reps", reps, "replications");
    c_lln->add_option("--out", out_text, "output directory");

    CLI::App* c_clt = app.add_subcommand("mc-clt", "Monte Carlo mean-CLT experiment");
    add_sim_options(c_clt);
    c_clt->add_option("--batches", batches, "batch count");
    c_clt->add_option("--batch-size", batch_size, "replications per batch");
    c_clt->add_option("--out", out_text, "output directory");

    CLI11_PARSE(app, argc, argv);

    for (CLI::App* sub : {c_sim, c_lln, c_clt}) {
        if (!app.got_subcommand(sub)) continue;
        for (const CLI::Option* o : sub->get_options()) {
            if (o->count() == 0) continue;
            for (const std::string& name : o->get_lnames()) sim.flags_seen.insert(name);
        }
    }

    try {
        const fs::path out_dir(out_text);
        fs::create_directories(out_dir);
        if (app.got_subcommand(c_sim)) return run_simulate(sim, out_dir);
        if (app.got_subcommand(c_mom)) return run_moments(input, lags_text, !no_center, out_dir);
        if (app.got_subcommand(c_est)) return run_estimate(input, scheme_text, origin, out_dir);
        if (app.got_subcommand(c_pred)) return run_predict(model_text, x_spec, input, out_dir);
        if (app.got_subcommand(c_cv)) return run_cv(input, candidates_text, origin, out_dir);
        if (app.got_subcommand(c_cp)) {
            if (!sim.seed_set) throw std::runtime_error("changepoint: --seed is required");
            return run_changepoint(input, scheme_text, reps, level, sim.seed, out_dir);
        }
        if (app.got_subcommand(c_el)) {
            if (!sim.seed_set) throw std::runtime_error("elnino: --seed is required");
            return run_elnino(data_file, smoothing_text, basis_dim, penalty, sim.seed, out_dir);
        }
        if (app.got_subcommand(c_lln)) return run_mc_lln(sim, reps, out_dir);
        if (app.got_subcommand(c_clt)) return run_mc_clt(sim, batches, batch_size, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
