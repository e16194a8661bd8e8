#include "fpp/cli.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "fpp/data/io.hpp"
#include "fpp/data/synth.hpp"
#include "fpp/data/transform.hpp"
#include "fpp/error.hpp"
#include "fpp/optim/fit.hpp"
#include "fpp/parallel.hpp"
#include "fpp/report/bundle.hpp"
#include "fpp/report/json.hpp"
#include "fpp/report/svg.hpp"
#include "fpp/significance/grid.hpp"
#include "fpp/significance/null.hpp"
#include "fpp/version.hpp"

namespace fs = std::filesystem;

namespace fpp::cli {

namespace {

const std::vector<std::string> kHyperKeys{"learning_rate", "batch_size",   "epochs",      "seed",
                                          "degree",        "response_degrees", "hidden_width", "standardize",
                                          "retraction",    "optimizer",    "schedule",    "pre_dim",     "polish_heads",
                                          "divergence_factor", "max_lr_halvings"};

/// Per-phase wall-clock seconds, written next to each report.
class Timings {
 public:
  explicit Timings(std::string command) : command_(std::move(command)) {}

  template <class F>
  auto measure(const std::string& phase, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      record(phase, start);
    } else {
      auto value = body();
      record(phase, start);
      return value;
    }
  }

  void write(const fs::path& dir, unsigned threads) const {
    Json j = {{"command", command_}, {"threads", threads}, {"phases_seconds", phases_}};
    write_json_file(dir / "timings.json", j);
  }

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point start) {
    phases_[phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::string command_;
  Json phases_ = Json::object();
};

/// A subcommand whose settings come from defaults, then --config, then flags.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& description)
      : app_(parent.add_subcommand(name, description)) {
    app_->add_option("--config", config_path_, "JSON file of settings; flags override it");
    accept("config");
  }

  CLI::App* app() const { return app_; }

  template <class T>
  CLI::Option* option(const std::string& flag, const std::string& key, const std::string& description) {
    accept(key);
    CLI::Option* opt = app_->add_option_function<T>(
        flag, [this, key](const T& v) { flags_[key] = v; }, description);
    if constexpr (!CLI::detail::is_mutable_container<T>::value) {
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    return opt;
  }

  CLI::Option* flag(const std::string& flag, const std::string& key, bool value, const std::string& description) {
    accept(key);
    return app_->add_flag_callback(flag, [this, key, value] { flags_[key] = value; }, description);
  }

  void accept(const std::string& key) { known_.insert(key); }

  void hyperparameter_flags() {
    for (const auto& key : kHyperKeys) accept(key);
    option<std::uint64_t>("--seed", "seed", "Base random seed");
    option<int>("--degree", "degree", "Polynomial head degree");
    option<std::size_t>("--epochs", "epochs", "Training epochs");
    option<std::size_t>("--batch", "batch_size", "Mini-batch size");
    option<double>("--lr", "learning_rate", "Learning rate");
    option<std::string>("--retraction", "retraction", "polar | paper-u");
    option<std::size_t>("--pre-dim", "pre_dim", "Random-projection pre-process dimension (0 = off)");
    option<std::string>("--optimizer", "optimizer", "sgd | adam");
    option<std::string>("--schedule", "schedule", "constant | cosine");
    option<int>("--hidden", "hidden_width", "Softmax hidden layer width (0 = linear)");
    flag("--no-standardize", "standardize", false, "Fit on raw features");
  }

  void common_flags(const std::string& default_out) {
    default_out_ = default_out;
    option<std::string>("--out", "out", "Output directory");
    option<unsigned>("--threads", "threads", "Worker threads (default: available cores)");
  }

  /// Merged settings; unknown keys are rejected.
  Json settings() const {
    Json merged = Json::object();
    if (!config_path_.empty()) {
      merged = read_json_file(config_path_);
      if (!merged.is_object()) throw ValidationError("config '" + config_path_ + "' must hold a JSON object");
    }
    for (const auto& [key, value] : flags_.items()) merged[key] = value;
    for (const auto& [key, value] : merged.items()) {
      if (!known_.count(key)) throw ValidationError("unknown config key '" + key + "'");
    }
    if (!merged.contains("out") && !default_out_.empty()) merged["out"] = default_out_;
    return merged;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::string default_out_;
  Json flags_ = Json::object();
  std::set<std::string> known_;
};

template <class T>
T setting(const Json& s, const std::string& key, T fallback) {
  if (!s.contains(key)) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("setting '" + key + "' has the wrong type");
  }
}

HyperParams hyperparams_from_settings(const Json& s, HyperParams base) {
  Json subset = Json::object();
  for (const auto& key : kHyperKeys) {
    if (s.contains(key)) subset[key] = s.at(key);
  }
  return hyperparams_from_json(subset, base);
}

unsigned thread_setting(const Json& s) {
  const auto threads = setting<unsigned>(s, "threads", 0);
  return threads == 0 ? default_thread_count() : threads;
}

fs::path prepare_out(const Json& s) {
  const fs::path out = setting<std::string>(s, "out", "fpp_out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ValidationError("cannot create output directory '" + out.string() + "'");
  return out;
}

void add_input_flags(Command& c) {
  c.option<std::string>("--data", "data", "Dataset bundle directory");
  c.option<std::string>("--csv", "csv", "CSV file with a header row");
  c.option<std::vector<std::string>>("--response", "response",
                                     "CSV response column (name or index), suffix :cat for categorical");
}

/// Checks the input paths without loading them.
void validate_input(const Json& s) {
  const bool bundle = s.contains("data");
  const bool csv = s.contains("csv");
  if (bundle == csv) throw ValidationError("exactly one of --data or --csv is required");
  const fs::path path = bundle ? setting<std::string>(s, "data", "") : setting<std::string>(s, "csv", "");
  if (!fs::exists(path)) throw ValidationError("input '" + path.string() + "' not found");
  if (csv && setting<std::vector<std::string>>(s, "response", {}).empty()) {
    throw ValidationError("--csv needs at least one --response column");
  }
}

Dataset load_input(const Json& s) {
  if (s.contains("data")) return read_bundle(setting<std::string>(s, "data", ""));
  std::vector<ResponseColumn> columns;
  for (const auto& spec : setting<std::vector<std::string>>(s, "response", {})) {
    const auto colon = spec.rfind(":cat");
    if (colon != std::string::npos && colon + 4 == spec.size()) {
      columns.push_back({spec.substr(0, colon), true});
    } else {
      columns.push_back({spec, false});
    }
  }
  return load_csv(setting<std::string>(s, "csv", ""), columns);
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char ch : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    out += ok ? ch : '_';
  }
  return out.empty() ? "response" : out;
}

AxisCaptions captions(const Basis2& p, const std::vector<std::string>& names) {
  const auto axes = top_axis_weights(p, names);
  return {"y1 = " + axis_caption(axes[0]), "y2 = " + axis_caption(axes[1])};
}

std::vector<std::string> column_names(const Dataset& data) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < data.dim(); ++j) names.push_back(data.column_name(j));
  return names;
}

std::string score_label(const ResponseScore& s) {
  return std::string(s.kind == ResponseKind::Categorical ? "accuracy " : "R2 ") + format_double(std::round(s.value * 1e4) / 1e4);
}

Json summary(const std::string& command, const fs::path& out) {
  return {{"command", command}, {"out", out.string()}};
}

void check_layout(const FitResult& fit, const Dataset& data) {
  if (fit.composite.dim() != data.dim()) {
    throw ValidationError("dimension mismatch: fit expects " + std::to_string(fit.composite.dim()) +
                          " features, data has " + std::to_string(data.dim()));
  }
}

// ---------------------------------------------------------------- synth

Json run_synth(const Json& s) {
  const std::string kind = setting<std::string>(s, "kind", "");
  if (kind.empty()) throw ValidationError("synth needs a kind: circle | multi | blobs | noise");
  if (!s.contains("n")) throw ValidationError("missing required flags: --n");
  const auto n = setting<std::size_t>(s, "n", 0);
  const auto seed = setting<std::uint64_t>(s, "seed", 0);
  const fs::path out = prepare_out(s);
  Timings timings("synth");

  const Dataset data = timings.measure("generate", [&] {
    if (kind == "circle") {
      return synth_circle(n, setting<std::size_t>(s, "dim", 5), setting<double>(s, "noise", 0.05), seed);
    }
    if (kind == "multi") {
      return synth_multi(n, setting<std::size_t>(s, "dim", 5), setting<std::size_t>(s, "responses", 15), seed,
                         setting<double>(s, "noise", 0.0));
    }
    if (kind == "blobs") {
      return synth_blobs(n, setting<std::size_t>(s, "dim", 10), setting<int>(s, "k", 5),
                         setting<double>(s, "separation", 8.0), seed);
    }
    if (kind == "noise") return synth_noise(n, setting<std::size_t>(s, "dim", 10), seed);
    throw ValidationError("unknown synth kind '" + kind + "' (expected circle, multi, blobs or noise)");
  });
  timings.measure("write", [&] { write_bundle(out, data); });
  timings.write(out, 1);
  Json j = summary("synth", out);
  j["samples"] = data.sample_count();
  j["dim"] = data.dim();
  j["responses"] = data.response_count();
  return j;
}

// ---------------------------------------------------------------- fit

Json run_fit(const Json& s) {
  validate_input(s);
  const double test_fraction = setting<double>(s, "test_fraction", 0.2);
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ValidationError("--test-fraction must be in [0, 1)");
  const HyperParams hp = hyperparams_from_settings(s, HyperParams{});
  const bool plots = setting<bool>(s, "plots", true);
  const fs::path out = prepare_out(s);
  Timings timings("fit");

  const Dataset data = timings.measure("load", [&] { return load_input(s); });
  FitProvenance prov;
  prov.samples = data.sample_count();
  prov.dim = data.dim();
  prov.test_fraction = test_fraction;
  prov.column_names = column_names(data);
  if (data.meta() && data.meta()->ground_truth.rows() > 0) prov.ground_truth = data.meta()->ground_truth;

  std::optional<Split> split;
  FitResult result = timings.measure("fit", [&] {
    if (test_fraction > 0.0) {
      HoldoutFit h = fit_with_holdout(data, hp, test_fraction);
      split = std::move(h.split);
      return std::move(h.result);
    }
    return fit(data, hp);
  });
  prov.train_samples = split ? split->train.sample_count() : data.sample_count();
  prov.test_samples = split ? split->test.sample_count() : 0;
  prov.stratified = split && split->stratified;
  prov.stratification_fallback = split && split->stratification_fallback;

  const Json report = fit_result_to_json(result, prov);
  timings.measure("write", [&] { write_json_file(out / "fit.json", report); });

  if (plots) {
    timings.measure("plot", [&] {
      const AxisCaptions axes = captions(result.composite.basis(), prov.column_names);
      const Points2 all = result.embed(data.features());
      for (std::size_t l = 0; l < data.response_count(); ++l) {
        const Response& r = data.response(l);
        const std::string title = r.name() + " (train " + score_label(result.train_scores[l]) + ")";
        write_text_file(out / ("scatter_" + file_stem(r.name()) + ".svg"), scatter_svg({all, r, title}, axes));
      }
      if (split) {
        const auto& tr = *split;
        write_text_file(out / "train_test.svg",
                        panels_svg({{result.embed(tr.train.features()), tr.train.response(0),
                                     "train, " + score_label(result.train_scores[0])},
                                    {result.embed(tr.test.features()), tr.test.response(0),
                                     "test, " + score_label(result.test_scores[0])}},
                                   axes));
      }
    });
  }
  timings.write(out, 1);

  Json j = summary("fit", out);
  j["final_train_loss"] = result.final_train_loss;
  j["train_scores"] = report["train_scores"];
  j["test_scores"] = report["test_scores"];
  if (report.contains("ground_truth")) j["principal_angles_deg"] = report["ground_truth"]["principal_angles_deg"];
  return j;
}

// ---------------------------------------------------------------- project

Json run_project(const Json& s) {
  if (!s.contains("fit")) throw ValidationError("missing required flags: --fit");
  validate_input(s);
  const fs::path fit_path = setting<std::string>(s, "fit", "");
  if (!fs::exists(fit_path)) throw ValidationError("fit result '" + fit_path.string() + "' not found");
  const double degrees = setting<double>(s, "rotation", 0.0);
  if (!std::isfinite(degrees)) throw ValidationError("--rotation must be finite");
  const bool plots = setting<bool>(s, "plots", true);
  const fs::path out = prepare_out(s);
  Timings timings("project");

  const FitResult fit = fit_result_from_json(read_json_file(fit_path));
  const Dataset data = timings.measure("load", [&] { return load_input(s); });
  check_layout(fit, data);

  const Mat2 rot = rotation2(degrees);
  const Points2 y = timings.measure("project", [&] { return Points2(fit.embed(data.features()) * rot.transpose()); });

  timings.measure("write", [&] {
    std::ostringstream csv;
    csv << "y1,y2\n";
    for (Eigen::Index i = 0; i < y.rows(); ++i) csv << format_double(y(i, 0)) << ',' << format_double(y(i, 1)) << '\n';
    write_text_file(out / "projection.csv", csv.str());
  });
  if (plots && data.response_count() > 0) {
    timings.measure("plot", [&] {
      const Basis2 rotated = fit.composite.basis() * rot.transpose();
      const Response& r = data.response(0);
      write_text_file(out / "projection.svg",
                      scatter_svg({y, r, r.name() + ", rotated " + format_double(degrees) + " deg"},
                                  captions(rotated, column_names(data))));
    });
  }
  timings.write(out, 1);
  Json j = summary("project", out);
  j["samples"] = y.rows();
  j["rotation_degrees"] = degrees;
  return j;
}

// ---------------------------------------------------------------- pvalue

Json run_pvalue(const Json& s) {
  if (!s.contains("fit")) throw ValidationError("missing required flags: --fit");
  validate_input(s);
  const fs::path fit_path = setting<std::string>(s, "fit", "");
  if (!fs::exists(fit_path)) throw ValidationError("fit result '" + fit_path.string() + "' not found");
  const auto trials = setting<std::size_t>(s, "trials", 300);
  if (trials < 2) throw ValidationError("--trials must be at least 2");
  const double threshold = setting<double>(s, "threshold", 0.05);
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("--threshold must be in (0, 1)");
  const std::string metric = setting<std::string>(s, "metric", "loss");
  if (metric != "loss" && metric != "r2") throw ValidationError("--metric must be loss or r2");
  const unsigned threads = thread_setting(s);
  const bool plots = setting<bool>(s, "plots", true);
  const fs::path out = prepare_out(s);
  Timings timings("pvalue");

  const Json fit_json = read_json_file(fit_path);
  const FitResult fit = fit_result_from_json(fit_json);
  const Dataset data = timings.measure("load", [&] { return load_input(s); });
  check_layout(fit, data);
  if (data.response_count() != fit.response_names.size()) {
    throw ValidationError("response count mismatch between fit result and data");
  }
  for (std::size_t l = 0; l < data.response_count(); ++l) {
    if (data.response(l).name() != fit.response_names[l]) {
      throw ValidationError("response '" + data.response(l).name() + "' does not match fit response '" +
                            fit.response_names[l] + "'");
    }
  }
  if (metric == "r2" && !data.all_continuous()) throw ValidationError("--metric r2 needs continuous responses");

  // The null is fitted on the rows the observed fit was trained on.
  const double fraction = setting<double>(s, "test_fraction", fit_json.at("data").value("test_fraction", 0.0));
  const Dataset train =
      fraction > 0.0 ? train_test_split(data, fraction, holdout_split_seed(fit.seed)).train : data;
  const HyperParams hp = hyperparams_from_settings(s, fit.hyperparams);
  const auto seed = setting<std::uint64_t>(s, "seed", fit.seed);

  NullDistribution null = timings.measure("null", [&] { return null_distribution(train, hp, trials, seed, threads); });
  if (metric == "r2") null = null.as_r2();
  const double observed = metric == "r2" ? mean_score(fit.train_scores) : fit.final_train_loss;
  const SignificanceReport report = significance_report(observed, null, threshold);

  Json j = to_json(report);
  j["metric"] = metric;
  if (!fit.test_scores.empty()) {
    const auto assessment =
        assess_overfit(mean_score(fit.train_scores), mean_score(fit.test_scores), report.p_parametric, threshold);
    j["overfit"] = to_json(assessment);
  }
  timings.measure("write", [&] { write_json_file(out / "significance.json", j); });
  if (plots) {
    timings.measure("plot", [&] {
      write_text_file(out / "null_histogram.svg",
                      histogram_svg(null.samples, observed, "null distribution, " + std::to_string(trials) + " trials",
                                    metric == "r2" ? "training R2" : "training loss"));
    });
  }
  timings.write(out, threads);

  Json sj = summary("pvalue", out);
  sj["observed"] = observed;
  sj["p_empirical"] = report.p_empirical;
  sj["p_parametric"] = report.p_parametric;
  if (j.contains("overfit")) sj["verdict"] = j["overfit"]["verdict"];
  return sj;
}

// ---------------------------------------------------------------- grid

std::string matrix_csv(const Matrix& m, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& sizes) {
  std::ostringstream csv;
  csv << "dim";
  for (auto n : sizes) csv << ",N=" << n;
  csv << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    csv << dims[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) csv << ',' << format_double(m(i, j));
    csv << '\n';
  }
  return csv.str();
}

Json run_grid(const Json& s) {
  GridConfig config;
  config.dims = setting<std::vector<std::size_t>>(s, "dims", config.dims);
  config.sizes = setting<std::vector<std::size_t>>(s, "sizes", config.sizes);
  config.trials = setting<std::size_t>(s, "trials", config.trials);
  config.reference_r2 = setting<double>(s, "reference_r2", config.reference_r2);
  config.min_steps = setting<std::size_t>(s, "min_steps", config.min_steps);
  config.seed = setting<std::uint64_t>(s, "seed", 0);
  config.hyperparams = hyperparams_from_settings(s, config.hyperparams);
  config.threads = thread_setting(s);
  if (config.dims.empty() || config.sizes.empty()) throw ValidationError("grid needs at least one dim and one size");
  if (config.trials < 2) throw ValidationError("--trials must be at least 2");
  const bool plots = setting<bool>(s, "plots", true);
  const fs::path out = prepare_out(s);
  Timings timings("grid");

  const GridStudyResult grid = timings.measure("study", [&] { return grid_study(config); });
  timings.measure("write", [&] {
    write_json_file(out / "grid.json", to_json(grid));
    write_text_file(out / "grid_mean_r2.csv", matrix_csv(grid.mean_r2, grid.dims, grid.sizes));
    write_text_file(out / "grid_p.csv", matrix_csv(grid.p_at_reference, grid.dims, grid.sizes));
  });
  if (plots) {
    timings.measure("plot", [&] {
      std::vector<std::string> rows, cols;
      for (auto d : grid.dims) rows.push_back(std::to_string(d));
      for (auto n : grid.sizes) cols.push_back(std::to_string(n));
      write_text_file(out / "grid_mean_r2.svg",
                      heatmap_svg({grid.mean_r2, rows, cols, "mean training R2 on random data", "dimension D",
                                   "sample size N", 0.0, 1.0}));
      write_text_file(out / "grid_p.svg",
                      heatmap_svg({grid.p_at_reference, rows, cols,
                                   "p-value of R2 " + format_double(grid.reference_r2) + " (colour clamped at 0.05)",
                                   "dimension D", "sample size N", 0.0, 0.05}));
    });
  }
  timings.write(out, config.threads);
  Json j = summary("grid", out);
  j["cells"] = grid.dims.size() * grid.sizes.size();
  j["failed_trials"] = grid.failures.sum();
  return j;
}

void error_json(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", {{"type", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Function preserving projections: fit interpretable 2-D linear views of labelled data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::deque<Command> commands;
  std::map<std::string, std::function<Json(const Json&)>> runners;

  auto& synth = commands.emplace_back(app, "synth", "Generate a synthetic dataset bundle");
  synth.option<std::string>("kind", "kind", "circle | multi | blobs | noise");
  synth.option<std::size_t>("--n", "n", "Sample count (required)");
  synth.option<std::size_t>("--dim", "dim", "Feature dimension");
  synth.option<double>("--noise", "noise", "Gaussian noise sigma on the response");
  synth.option<std::size_t>("--responses", "responses", "Response count (multi)");
  synth.option<int>("--k", "k", "Class count (blobs)");
  synth.option<double>("--separation", "separation", "Cluster mean spacing (blobs)");
  synth.option<std::uint64_t>("--seed", "seed", "Random seed");
  synth.common_flags("fpp_data");
  runners["synth"] = run_synth;

  auto& fit_cmd = commands.emplace_back(app, "fit", "Fit a projection and heads, write fit.json and plots");
  add_input_flags(fit_cmd);
  fit_cmd.hyperparameter_flags();
  fit_cmd.option<double>("--test-fraction", "test_fraction", "Held-out fraction (0 = fit on all rows)");
  fit_cmd.flag("--no-plots", "plots", false, "Skip SVG output");
  fit_cmd.common_flags("fpp_out");
  runners["fit"] = run_fit;

  auto& project = commands.emplace_back(app, "project", "Apply a fitted projection to data");
  project.option<std::string>("--fit", "fit", "fit.json from the fit command");
  add_input_flags(project);
  project.option<double>("--rotation", "rotation", "In-plane rotation in degrees");
  project.flag("--no-plots", "plots", false, "Skip SVG output");
  project.common_flags("fpp_out");
  runners["project"] = run_project;

  auto& pvalue = commands.emplace_back(app, "pvalue", "Null distribution and p-values for a fit");
  pvalue.option<std::string>("--fit", "fit", "fit.json from the fit command");
  add_input_flags(pvalue);
  pvalue.hyperparameter_flags();
  pvalue.option<std::size_t>("--trials", "trials", "Shuffled refits (default 300)");
  pvalue.option<std::string>("--metric", "metric", "loss | r2");
  pvalue.option<double>("--threshold", "threshold", "Significance threshold (default 0.05)");
  pvalue.option<double>("--test-fraction", "test_fraction", "Override the fit's held-out fraction");
  pvalue.flag("--no-plots", "plots", false, "Skip SVG output");
  pvalue.common_flags("fpp_out");
  runners["pvalue"] = run_pvalue;

  auto& grid = commands.emplace_back(app, "grid", "Training R2 of fits to random data over a (D, N) grid");
  grid.hyperparameter_flags();
  grid.option<std::vector<std::size_t>>("--dims", "dims", "Comma-separated dimensions")->delimiter(',');
  grid.option<std::vector<std::size_t>>("--sizes", "sizes", "Comma-separated sample sizes")->delimiter(',');
  grid.option<std::size_t>("--trials", "trials", "Random datasets per cell (default 20)");
  grid.option<double>("--reference", "reference_r2", "Reference R2 for the p-value map (default 0.5)");
  grid.option<std::size_t>("--min-steps", "min_steps", "Minimum gradient steps per fit");
  grid.flag("--no-plots", "plots", false, "Skip SVG output");
  grid.common_flags("fpp_grid");
  runners["grid"] = run_grid;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    error_json(err, "validation", e.what());
    return kValidation;
  }

  try {
    for (const auto& c : commands) {
      if (c.app()->parsed()) {
        const Json result = runners.at(c.app()->get_name())(c.settings());
        out << result.dump() << '\n';
        return kSuccess;
      }
    }
    error_json(err, "validation", "no command given");
    return kValidation;
  } catch (const ValidationError& e) {
    error_json(err, "validation", e.what());
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    error_json(err, "validation", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    error_json(err, "runtime", e.what());
    return kRuntime;
  }
}

}  // namespace fpp::cli
