/*
 * Copyright 2026 The cascal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "cascal/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cascal/errors.hpp"

namespace cascal {

namespace fs = std::filesystem;

namespace {

// Flags that may override RunConfig; unset optionals keep the file/default.
struct Overrides {
    std::optional<int> n_s;
    std::optional<double> coeff_var;
    std::optional<double> freq_var;
    std::optional<double> noise_var;
    std::optional<int> n_grid;
    std::optional<int> edge_remove;
    std::optional<int> center_remove;
    std::optional<int> n1;
    std::optional<int> n_quad;
    std::optional<int> max_redraws;
    std::optional<int> max_iterations;
    std::optional<double> rel_tolerance;
    bool strict_paper = false;
    std::optional<std::string> extrapolation;
    std::optional<int> n_bins;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> parallel;
    bool full_scale = false;
    std::string config_path;
    std::string out_dir = ".";
};

struct CommandArgs {
    // calibrate
    std::string d1_path;
    std::string d2_path;
    std::string method = "bayesian";
    std::string model_path;
    // predict
    std::string input_path;
    std::string output_path;
    bool with_variance = false;
    // evaluate
    std::string truth_path;
    std::string errors_path;
    // summarize
    std::string trials_path;
    // simulate
    bool export_datasets = false;
};

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

template <class T>
void set_if(const std::optional<T>& v, T& target) {
    if (v) target = *v;
}

void add_shared_options(CLI::App* app, Overrides& o, const RunConfig& d) {
    app->add_option("--config", o.config_path, "Flat JSON file overriding defaults");
    app->add_option("--out", o.out_dir, "Output directory")->default_str(".");
    app->add_option("--seed", o.seed, "Root random seed")->default_str(std::to_string(d.seed));
    app->add_option("--parallel", o.parallel, "Maximum concurrent trials")
        ->default_str(std::to_string(d.parallel));
    app->add_flag("--strict-paper,--strict-paper-mode,--no-stage2-noise", o.strict_paper,
                  "Stage two uses only the propagated covariance, no learned noise");
}

void add_model_options(CLI::App* app, Overrides& o, const RunConfig& d) {
    app->add_option("--max-iterations", o.max_iterations, "Simplex iterations per start")
        ->default_str(std::to_string(d.max_iterations));
    app->add_option("--rel-tolerance", o.rel_tolerance, "Simplex relative stopping tolerance")
        ->default_str(fmt(d.rel_tolerance));
    app->add_option("--extrapolation", o.extrapolation, "Lookup-table extrapolation: slope|clamp")
        ->default_str(to_string(d.extrapolation));
}

void add_sim_options(CLI::App* app, Overrides& o, const RunConfig& d) {
    const SimConfig& s = d.sim;
    app->add_option("--n-s", o.n_s, "Fourier terms per sensor")->default_str(std::to_string(s.n_s));
    app->add_option("--coeff-var", o.coeff_var, "Variance of Fourier coefficients (m^2)")
        ->default_str(fmt(s.coeff_var));
    app->add_option("--freq-var", o.freq_var, "Variance of Fourier frequencies (rad^2/m^2)")
        ->default_str(fmt(s.freq_var));
    app->add_option("--noise-var", o.noise_var, "Measurement noise variance (m^2)")
        ->default_str(fmt(s.noise_var));
    app->add_option("--n-grid", o.n_grid, "Reference grid size before removal")
        ->default_str(std::to_string(s.n_grid));
    app->add_option("--edge-remove", o.edge_remove, "Reference points removed at each edge")
        ->default_str(std::to_string(s.edge_remove));
    app->add_option("--center-remove", o.center_remove, "Reference points removed at the center")
        ->default_str(std::to_string(s.center_remove));
    app->add_option("--n1", o.n1, "Unit-vs-bed grid size")->default_str(std::to_string(s.n1));
    app->add_option("--n-quad", o.n_quad, "Quadrature points for the cost")
        ->default_str(std::to_string(s.n_quad));
    app->add_option("--max-redraws", o.max_redraws, "Non-monotone truth redraws per seed")
        ->default_str(std::to_string(s.max_redraws));
    app->add_option("--trials", o.trials, "Number of Monte Carlo trials")
        ->default_str(std::to_string(d.trials));
    app->add_flag("--full-scale", o.full_scale,
                  "Run " + std::to_string(kFullScaleTrials) + " trials");
    app->add_option("--n-bins,--bins", o.n_bins, "Histogram bins in the summary")
        ->default_str(std::to_string(d.n_bins));
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) {
        Json j;
        try {
            j = read_json_file(o.config_path);
        } catch (const ParseError& e) {
            throw ConfigError(e.what());
        }
        apply_config_json(cfg, j);
    }
    set_if(o.n_s, cfg.sim.n_s);
    set_if(o.coeff_var, cfg.sim.coeff_var);
    set_if(o.freq_var, cfg.sim.freq_var);
    set_if(o.noise_var, cfg.sim.noise_var);
    set_if(o.n_grid, cfg.sim.n_grid);
    set_if(o.edge_remove, cfg.sim.edge_remove);
    set_if(o.center_remove, cfg.sim.center_remove);
    set_if(o.n1, cfg.sim.n1);
    set_if(o.n_quad, cfg.sim.n_quad);
    set_if(o.max_redraws, cfg.sim.max_redraws);
    set_if(o.max_iterations, cfg.max_iterations);
    set_if(o.rel_tolerance, cfg.rel_tolerance);
    if (o.strict_paper) cfg.strict_paper_mode = true;
    if (o.extrapolation) {
        try {
            cfg.extrapolation = extrapolation_from_string(*o.extrapolation);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    set_if(o.n_bins, cfg.n_bins);
    set_if(o.seed, cfg.seed);
    set_if(o.trials, cfg.trials);
    if (o.full_scale) cfg.trials = kFullScaleTrials;
    set_if(o.parallel, cfg.parallel);
    cfg.validate();
    return cfg;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

void print_summary(const CampaignSummary& s, std::ostream& out) {
    out << "trials: " << s.n_trials << " (flagged: " << s.n_flagged << ")\n";
    out << std::setprecision(6);
    for (const auto& m : s.methods) {
        out << "median J " << m.name << ": " << m.median << '\n';
    }
    for (const auto& a : s.methods) {
        for (const auto& b : s.methods) {
            if (a.name == b.name) continue;
            out << "win rate " << a.name << " < " << b.name << ": " << s.win_rate(a.name, b.name)
                << '\n';
        }
    }
}

int cmd_simulate(const RunConfig& cfg, const Overrides& o, const CommandArgs& a,
                 std::ostream& out) {
    const fs::path dir = o.out_dir;
    ensure_dir(dir);
    const TrialConfig tc = cfg.trial_config();
    if (a.export_datasets) {
        const TrialData data = generate_trial_data(cfg.seed, cfg.sim);
        write_dataset_csv(dir / "d1.csv", data.d1);
        write_dataset_csv(dir / "d2.csv", data.d2);
        write_json_file(dir / "truth.json", to_json(data.pair));
    }
    const auto results = run_campaign(cfg.trials, cfg.seed, tc, cfg.parallel);
    write_trials_csv(dir / "trials.csv", results);
    const CampaignSummary summary = summarize(results, cfg.n_bins);
    Json doc = to_json(summary);
    doc["config"] = to_json(cfg);
    write_json_file(dir / "summary.json", doc);
    print_summary(summary, out);
    return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, const CommandArgs& a, std::ostream& out,
                  std::ostream& err) {
    CalibrationDataset d1;
    CalibrationDataset d2;
    try {
        d1 = read_dataset_csv(a.d1_path);
        d2 = read_dataset_csv(a.d2_path);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    CalibrationModel model;
    try {
        if (a.method == "lut") {
            model = calibrate_lut_cascade(d1, d2, cfg.extrapolation);
        } else if (a.method == "alt1") {
            model = calibrate_alternative1(d1, d2, cfg.cascade_config());
        } else {
            model = calibrate_cascaded(d1, d2, cfg.cascade_config());
        }
    } catch (const Error& e) {
        err << "error: calibration failed: " << e.what() << '\n';
        return kExitFailure;
    }
    write_json_file(a.model_path, to_json(model));
    out << "wrote " << method_tag(model) << " model to " << a.model_path << '\n';
    return kExitOk;
}

int cmd_predict(const CommandArgs& a, std::ostream& out, std::ostream& err) {
    CalibrationModel model;
    Vector x;
    try {
        model = model_from_json(read_json_file(a.model_path));
        x = read_column_csv(a.input_path, "x");
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto* cascade = std::get_if<CascadeModel>(&model);
    if (a.with_variance && cascade == nullptr) {
        err << "error: --with-variance needs a GP model; lookup tables carry no variance\n";
        return kExitUsage;
    }
    const Vector y_hat = model_apply(model, x);
    Vector var;
    if (a.with_variance) var = cascade->variance(x);

    std::ofstream file;
    if (!a.output_path.empty()) {
        file.open(a.output_path);
        if (!file) throw Error("cannot write " + a.output_path);
    }
    std::ostream& sink = a.output_path.empty() ? out : file;
    sink << (a.with_variance ? "x,y_hat,var\n" : "x,y_hat\n");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        sink << format_double(x[i]) << ',' << format_double(y_hat[i]);
        if (a.with_variance) sink << ',' << format_double(var[i]);
        sink << '\n';
    }
    return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, const CommandArgs& a, std::ostream& out,
                 std::ostream& err) {
    CalibrationModel model;
    TruthPair truth;
    try {
        model = model_from_json(read_json_file(a.model_path));
        truth = truth_pair_from_json(read_json_file(a.truth_path));
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const ModelApply f = [&](const Vector& y) { return model_apply(model, y); };
    try {
        const auto [y1, e] = error_profile(f, truth, cfg.sim.n_quad);
        const double j = cost_j(f, truth, cfg.sim.n_quad);
        out << "J = " << format_double(j) << '\n';
        if (!a.errors_path.empty()) {
            std::ofstream file(a.errors_path);
            if (!file) throw Error("cannot write " + a.errors_path);
            file << "y1,error\n";
            for (Eigen::Index i = 0; i < y1.size(); ++i) {
                file << format_double(y1[i]) << ',' << format_double(e[i]) << '\n';
            }
        }
    } catch (const NonMonotonic& e) {
        err << "error: " << e.what()
            << "\nthe true map from sensor 1 readings to positions must be invertible\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_summarize(const RunConfig& cfg, const Overrides& o, const CommandArgs& a,
                  std::ostream& out, std::ostream& err) {
    std::vector<TrialResult> results;
    try {
        results = read_trials_csv(a.trials_path);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const CampaignSummary summary = summarize(results, cfg.n_bins);
    ensure_dir(o.out_dir);
    write_json_file(fs::path(o.out_dir) / "summary.json", to_json(summary));
    print_summary(summary, out);
    return kExitOk;
}

} // namespace

void RunConfig::validate() const {
    sim.validate();
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(rel_tolerance >= 0.0)) throw ConfigError("rel_tolerance must be >= 0");
    if (n_bins < 1) throw ConfigError("n_bins must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (parallel < 1) throw ConfigError("parallel must be >= 1");
}

CascadeConfig RunConfig::cascade_config() const {
    CascadeConfig c;
    c.optimizer.max_iterations = max_iterations;
    c.optimizer.rel_tolerance = rel_tolerance;
    c.stage_two_noise = !strict_paper_mode;
    return c;
}

TrialConfig RunConfig::trial_config() const {
    return TrialConfig{sim, cascade_config(), extrapolation};
}

void apply_config_json(RunConfig& cfg, const Json& j) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        const auto as_int = [&, &key = key, &value = value]() {
            if (!value.is_number_integer()) throw ConfigError("config '" + key + "' must be an integer");
            return value.get<int>();
        };
        const auto as_double = [&, &key = key, &value = value]() {
            if (!value.is_number()) throw ConfigError("config '" + key + "' must be a number");
            return value.get<double>();
        };
        if (key == "n_s") cfg.sim.n_s = as_int();
        else if (key == "coeff_var") cfg.sim.coeff_var = as_double();
        else if (key == "freq_var") cfg.sim.freq_var = as_double();
        else if (key == "noise_var") cfg.sim.noise_var = as_double();
        else if (key == "n_grid") cfg.sim.n_grid = as_int();
        else if (key == "edge_remove") cfg.sim.edge_remove = as_int();
        else if (key == "center_remove") cfg.sim.center_remove = as_int();
        else if (key == "n1") cfg.sim.n1 = as_int();
        else if (key == "n_quad") cfg.sim.n_quad = as_int();
        else if (key == "max_redraws") cfg.sim.max_redraws = as_int();
        else if (key == "max_iterations") cfg.max_iterations = as_int();
        else if (key == "rel_tolerance") cfg.rel_tolerance = as_double();
        else if (key == "n_bins") cfg.n_bins = as_int();
        else if (key == "trials") cfg.trials = as_int();
        else if (key == "parallel") cfg.parallel = as_int();
        else if (key == "seed") {
            if (!value.is_number_unsigned()) throw ConfigError("config 'seed' must be a non-negative integer");
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "strict_paper_mode") {
            if (!value.is_boolean()) throw ConfigError("config 'strict_paper_mode' must be a boolean");
            cfg.strict_paper_mode = value.get<bool>();
        } else if (key == "extrapolation") {
            if (!value.is_string()) throw ConfigError("config 'extrapolation' must be a string");
            try {
                cfg.extrapolation = extrapolation_from_string(value.get<std::string>());
            } catch (const InvalidArgument& e) {
                throw ConfigError(e.what());
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

Json to_json(const RunConfig& cfg) {
    return Json{{"n_s", cfg.sim.n_s},
                {"coeff_var", cfg.sim.coeff_var},
                {"freq_var", cfg.sim.freq_var},
                {"noise_var", cfg.sim.noise_var},
                {"n_grid", cfg.sim.n_grid},
                {"edge_remove", cfg.sim.edge_remove},
                {"center_remove", cfg.sim.center_remove},
                {"n1", cfg.sim.n1},
                {"n_quad", cfg.sim.n_quad},
                {"max_redraws", cfg.sim.max_redraws},
                {"max_iterations", cfg.max_iterations},
                {"rel_tolerance", cfg.rel_tolerance},
                {"strict_paper_mode", cfg.strict_paper_mode},
                {"extrapolation", to_string(cfg.extrapolation)},
                {"n_bins", cfg.n_bins},
                {"seed", cfg.seed},
                {"trials", cfg.trials},
                {"parallel", cfg.parallel}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const RunConfig defaults;
    Overrides o;
    CommandArgs a;

    CLI::App app{"cascal: cascaded sensor calibration with Gaussian processes", "cascal"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo comparison campaign");
    add_shared_options(simulate, o, defaults);
    add_sim_options(simulate, o, defaults);
    add_model_options(simulate, o, defaults);
    simulate->add_flag("--export-datasets", a.export_datasets,
                       "Also write d1.csv, d2.csv and truth.json for the base seed");

    auto* calibrate = app.add_subcommand("calibrate", "Fit a calibration model from two CSV datasets");
    add_shared_options(calibrate, o, defaults);
    add_model_options(calibrate, o, defaults);
    calibrate->add_option("--d1", a.d1_path, "Unit vs test-bed CSV (x,y)")->required();
    calibrate->add_option("--d2", a.d2_path, "Test-bed vs reference CSV (x,y)")->required();
    calibrate->add_option("--method", a.method, "bayesian|alt1|lut")
        ->check(CLI::IsMember({"bayesian", "alt1", "lut"}))
        ->default_str("bayesian");
    calibrate->add_option("--model", a.model_path, "Output model JSON")->required();

    auto* predict = app.add_subcommand("predict", "Apply a model to readings in a CSV x column");
    add_shared_options(predict, o, defaults);
    predict->add_option("--model", a.model_path, "Model JSON")->required();
    predict->add_option("--input", a.input_path, "CSV with an x column")->required();
    predict->add_option("--output", a.output_path, "Output CSV (default: standard output)");
    predict->add_flag("--with-variance", a.with_variance, "Add the posterior variance column");

    auto* evaluate = app.add_subcommand("evaluate", "Cost J of a model against a known truth");
    add_shared_options(evaluate, o, defaults);
    evaluate->add_option("--model", a.model_path, "Model JSON")->required();
    evaluate->add_option("--truth", a.truth_path, "Truth JSON")->required();
    evaluate->add_option("--errors", a.errors_path, "Optional per-point error CSV");
    evaluate->add_option("--n-quad", o.n_quad, "Quadrature points")
        ->default_str(std::to_string(defaults.sim.n_quad));

    auto* summarize_cmd = app.add_subcommand("summarize", "Re-summarize an existing trials.csv");
    add_shared_options(summarize_cmd, o, defaults);
    summarize_cmd->add_option("--trials", a.trials_path, "trials.csv to read")->required();
    summarize_cmd->add_option("--n-bins,--bins", o.n_bins, "Histogram bins")
        ->default_str(std::to_string(defaults.n_bins));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg = resolve(o);
    } catch (const ConfigError& e) {
        err << "error: ConfigError: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(cfg, o, a, out);
        if (calibrate->parsed()) return cmd_calibrate(cfg, a, out, err);
        if (predict->parsed()) return cmd_predict(a, out, err);
        if (evaluate->parsed()) return cmd_evaluate(cfg, a, out, err);
        if (summarize_cmd->parsed()) return cmd_summarize(cfg, o, a, out, err);
    } catch (const ConfigError& e) {
        err << "error: ConfigError: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace cascal
