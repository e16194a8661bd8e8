#include "fpp/report/json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fpp/error.hpp"
#include "fpp/models/softmax.hpp"
#include "fpp/version.hpp"

namespace fpp {

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json vector_to_json(const Eigen::Ref<const Vector>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = j[i].is_null() ? std::nan("") : j[i].get<double>();
  }
  return v;
}

const char* kind_name(ResponseKind kind) {
  return kind == ResponseKind::Categorical ? "categorical" : "continuous";
}

ResponseKind parse_kind(const std::string& s) {
  if (s == "categorical") return ResponseKind::Categorical;
  if (s == "continuous") return ResponseKind::Continuous;
  throw ValidationError("unknown response kind '" + s + "'");
}

Json scores_to_json(const std::vector<ResponseScore>& scores) {
  Json out = Json::array();
  for (const auto& s : scores) {
    out.push_back({{"name", s.name},
                   {"kind", kind_name(s.kind)},
                   {"metric", s.kind == ResponseKind::Categorical ? "accuracy" : "r2"},
                   {"value", number(s.value)}});
  }
  return out;
}

std::vector<ResponseScore> scores_from_json(const Json& j) {
  std::vector<ResponseScore> out;
  for (const auto& s : j) {
    out.push_back({s.at("name").get<std::string>(), parse_kind(s.at("kind").get<std::string>()),
                   s.at("value").is_null() ? std::nan("") : s.at("value").get<double>()});
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json matrix_to_json(const Matrix& m) {
  Json values = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(number(m(r, c)));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"layout", "row-major"}, {"values", values}};
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& values = j.at("values");
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) throw ValidationError("matrix JSON: value count mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = values[static_cast<std::size_t>(r * cols + c)];
      m(r, c) = v.is_null() ? std::nan("") : v.get<double>();
    }
  }
  return m;
}

const char* to_string(RetractionMode mode) {
  return mode == RetractionMode::PolarFactor ? "polar" : "paper-u";
}

RetractionMode parse_retraction(const std::string& text) {
  if (text == "polar") return RetractionMode::PolarFactor;
  if (text == "paper-u") return RetractionMode::PaperU;
  throw ValidationError("unknown retraction '" + text + "' (expected polar or paper-u)");
}

const char* to_string(LearningRateSchedule schedule) {
  return schedule == LearningRateSchedule::Constant ? "constant" : "cosine";
}

LearningRateSchedule parse_schedule(const std::string& text) {
  if (text == "constant") return LearningRateSchedule::Constant;
  if (text == "cosine") return LearningRateSchedule::Cosine;
  throw ValidationError("unknown schedule '" + text + "' (expected constant or cosine)");
}

const char* to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(const std::string& text) {
  if (text == "sgd") return OptimizerKind::Sgd;
  if (text == "adam") return OptimizerKind::Adam;
  throw ValidationError("unknown optimizer '" + text + "' (expected sgd or adam)");
}

Json to_json(const HyperParams& hp) {
  return {{"learning_rate", hp.learning_rate},
          {"batch_size", hp.batch_size},
          {"epochs", hp.epochs},
          {"seed", hp.seed},
          {"degree", hp.degree},
          {"response_degrees", hp.response_degrees},
          {"hidden_width", hp.hidden_width},
          {"standardize", hp.standardize},
          {"retraction", to_string(hp.retraction)},
          {"optimizer", to_string(hp.optimizer)},
          {"schedule", to_string(hp.schedule)},
          {"pre_dim", hp.pre_dim},
          {"polish_heads", hp.polish_heads},
          {"divergence_factor", hp.divergence_factor},
          {"max_lr_halvings", hp.max_lr_halvings}};
}

HyperParams hyperparams_from_json(const Json& j, HyperParams hp) {
  static const std::set<std::string> known{"learning_rate", "batch_size",      "epochs",       "seed",
                                           "degree",        "response_degrees", "hidden_width", "standardize",
                                           "retraction",    "optimizer",       "schedule", "pre_dim",      "polish_heads",
                                           "divergence_factor", "max_lr_halvings"};
  if (!j.is_object()) throw ValidationError("hyperparameters must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown hyperparameter key '" + key + "'");
  }
  try {
    if (j.contains("learning_rate")) hp.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) hp.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("epochs")) hp.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("seed")) hp.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("degree")) hp.degree = j["degree"].get<int>();
    if (j.contains("response_degrees")) hp.response_degrees = j["response_degrees"].get<std::vector<int>>();
    if (j.contains("hidden_width")) hp.hidden_width = j["hidden_width"].get<int>();
    if (j.contains("standardize")) hp.standardize = j["standardize"].get<bool>();
    if (j.contains("retraction")) hp.retraction = parse_retraction(j["retraction"].get<std::string>());
    if (j.contains("optimizer")) hp.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
    if (j.contains("schedule")) hp.schedule = parse_schedule(j["schedule"].get<std::string>());
    if (j.contains("pre_dim")) hp.pre_dim = j["pre_dim"].get<std::size_t>();
    if (j.contains("polish_heads")) hp.polish_heads = j["polish_heads"].get<bool>();
    if (j.contains("divergence_factor")) hp.divergence_factor = j["divergence_factor"].get<double>();
    if (j.contains("max_lr_halvings")) hp.max_lr_halvings = j["max_lr_halvings"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("hyperparameters: ") + e.what());
  }
  return hp;
}

Json to_json(const Head& head) {
  if (const auto* poly = std::get_if<PolynomialHead>(&head)) {
    return {{"type", "polynomial"},
            {"degree", poly->degree},
            {"ordering", "graded-lex"},
            {"coefficients", vector_to_json(poly->coefficients)}};
  }
  const auto& soft = std::get<SoftmaxHead>(head);
  return {{"type", "softmax"},
          {"classes", soft.classes},
          {"hidden_width", soft.hidden_width},
          {"activation", "relu"},
          {"probability_floor", kProbabilityFloor},
          {"w1", matrix_to_json(soft.w1)},
          {"b1", vector_to_json(soft.b1)},
          {"w2", matrix_to_json(soft.w2)},
          {"b2", vector_to_json(soft.b2)}};
}

Head head_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "polynomial") {
    PolynomialHead h{j.at("degree").get<int>(), vector_from_json(j.at("coefficients"))};
    h.validate();
    return h;
  }
  if (type == "softmax") {
    SoftmaxHead h;
    h.classes = j.at("classes").get<int>();
    h.hidden_width = j.at("hidden_width").get<int>();
    h.w1 = matrix_from_json(j.at("w1"));
    h.b1 = vector_from_json(j.at("b1"));
    h.w2 = matrix_from_json(j.at("w2"));
    h.b2 = vector_from_json(j.at("b2"));
    if (h.hidden_width == 0) h.w1.resize(0, 2);
    h.validate();
    return h;
  }
  throw ValidationError("unknown head type '" + type + "'");
}

std::array<std::vector<AxisWeight>, 2> top_axis_weights(const Basis2& p, const std::vector<std::string>& names,
                                                       std::size_t top) {
  std::array<std::vector<AxisWeight>, 2> out;
  for (int c = 0; c < 2; ++c) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(p(a, c)) > std::abs(p(b, c)); });
    for (std::size_t k = 0; k < std::min<std::size_t>(top, idx.size()); ++k) {
      const auto j = idx[k];
      const auto uj = static_cast<std::size_t>(j);
      out[static_cast<std::size_t>(c)].push_back(
          {uj < names.size() ? names[uj] : "x" + std::to_string(j), p(j, c)});
    }
  }
  return out;
}

Json fit_result_to_json(const FitResult& result, const FitProvenance& provenance) {
  Json j;
  j["format"] = "fpp.fit_result";
  j["version"] = kVersion;
  j["seed"] = result.seed;
  j["hyperparams"] = to_json(result.hyperparams);
  j["data"] = {{"samples", provenance.samples},
               {"dim", provenance.dim},
               {"train_samples", provenance.train_samples},
               {"test_samples", provenance.test_samples},
               {"test_fraction", provenance.test_fraction},
               {"stratified", provenance.stratified},
               {"stratification_fallback", provenance.stratification_fallback}};
  j["projection"] = matrix_to_json(result.composite.basis());
  if (result.pre_projection) {
    j["pre_projection"] = {{"dim_in", result.pre_projection->rows()},
                           {"dim_out", result.pre_projection->cols()},
                           {"seed", pre_projection_seed(result.seed)}};
    j["working_projection"] = matrix_to_json(result.projection.basis());
  }
  if (result.scaling) {
    Json responses = Json::array();
    for (const auto& ms : result.scaling->response_mean_scale) {
      if (ms) {
        responses.push_back({{"mean", ms->first}, {"scale", ms->second}});
      } else {
        responses.push_back(nullptr);
      }
    }
    j["scaling"] = {{"feature_mean", vector_to_json(result.scaling->feature_mean)},
                    {"feature_scale", vector_to_json(result.scaling->feature_scale)},
                    {"responses", responses}};
  }
  Json responses = Json::array();
  for (std::size_t l = 0; l < result.heads.size(); ++l) {
    responses.push_back({{"name", result.response_names[l]},
                         {"kind", kind_name(result.response_kinds[l])},
                         {"head", to_json(result.heads[l])}});
  }
  j["responses"] = responses;
  Json history = Json::array();
  for (double v : result.loss_history) history.push_back(number(v));
  j["loss_history"] = history;
  j["final_train_loss"] = number(result.final_train_loss);
  Json per = Json::array();
  for (double v : result.final_response_losses) per.push_back(number(v));
  j["final_response_losses"] = per;
  j["train_scores"] = scores_to_json(result.train_scores);
  j["test_scores"] = scores_to_json(result.test_scores);
  j["test_loss"] = result.test_loss ? number(*result.test_loss) : Json(nullptr);
  j["epochs_run"] = result.epochs_run;
  j["final_learning_rate"] = result.final_learning_rate;
  j["learning_rate_halvings"] = result.learning_rate_halvings;
  j["retraction_recoveries"] = result.retraction_recoveries;
  j["max_orthonormality_error"] = result.max_orthonormality_error;

  const auto axes = top_axis_weights(result.composite.basis(), provenance.column_names);
  Json axis_json = Json::array();
  for (const auto& axis : axes) {
    Json entries = Json::array();
    for (const auto& w : axis) entries.push_back({{"feature", w.feature}, {"weight", w.weight}});
    axis_json.push_back(entries);
  }
  j["axes"] = axis_json;
  if (provenance.ground_truth && provenance.ground_truth->rows() == result.composite.basis().rows()) {
    const ProjectionMatrix truth(*provenance.ground_truth);
    const Vec2 angles = principal_angles(result.composite, truth);
    j["ground_truth"] = {{"basis", matrix_to_json(*provenance.ground_truth)},
                         {"principal_angles_deg", {angles[0] * 180.0 / M_PI, angles[1] * 180.0 / M_PI}}};
  }
  return j;
}

FitResult fit_result_from_json(const Json& j) {
  try {
    if (j.value("format", "") != "fpp.fit_result") throw ValidationError("not an fpp fit result");
    const HyperParams hp = hyperparams_from_json(j.at("hyperparams"));
    const ProjectionMatrix composite(matrix_from_json(j.at("projection")));
    std::optional<Matrix> pre;
    ProjectionMatrix working = composite;
    if (j.contains("pre_projection")) {
      const auto& pj = j.at("pre_projection");
      pre = random_projection_preprocess(pj.at("dim_in").get<std::size_t>(), pj.at("dim_out").get<std::size_t>(),
                                         pj.at("seed").get<std::uint64_t>());
      working = ProjectionMatrix(matrix_from_json(j.at("working_projection")));
    }
    std::optional<ScalingInfo> scaling;
    if (j.contains("scaling")) {
      ScalingInfo s;
      s.feature_mean = vector_from_json(j["scaling"].at("feature_mean"));
      s.feature_scale = vector_from_json(j["scaling"].at("feature_scale"));
      for (const auto& r : j["scaling"].at("responses")) {
        if (r.is_null()) {
          s.response_mean_scale.emplace_back(std::nullopt);
        } else {
          s.response_mean_scale.emplace_back(std::make_pair(r.at("mean").get<double>(), r.at("scale").get<double>()));
        }
      }
      scaling = std::move(s);
    }
    FitResult result{.projection = working, .pre_projection = pre, .composite = composite, .scaling = scaling};
    for (const auto& r : j.at("responses")) {
      result.response_names.push_back(r.at("name").get<std::string>());
      result.response_kinds.push_back(parse_kind(r.at("kind").get<std::string>()));
      result.heads.push_back(head_from_json(r.at("head")));
    }
    for (const auto& v : j.at("loss_history")) result.loss_history.push_back(v.is_null() ? std::nan("") : v.get<double>());
    result.final_train_loss = j.at("final_train_loss").get<double>();
    if (j.contains("final_response_losses")) {
      result.final_response_losses = j["final_response_losses"].get<std::vector<double>>();
    }
    result.train_scores = scores_from_json(j.at("train_scores"));
    result.test_scores = scores_from_json(j.at("test_scores"));
    if (!j.at("test_loss").is_null()) result.test_loss = j["test_loss"].get<double>();
    result.epochs_run = j.at("epochs_run").get<std::size_t>();
    result.seed = j.at("seed").get<std::uint64_t>();
    result.hyperparams = hp;
    result.final_learning_rate = j.at("final_learning_rate").get<double>();
    result.learning_rate_halvings = j.at("learning_rate_halvings").get<int>();
    result.retraction_recoveries = j.at("retraction_recoveries").get<std::size_t>();
    result.max_orthonormality_error = j.at("max_orthonormality_error").get<double>();
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("fit result JSON: ") + e.what());
  }
}

Json to_json(const NullDistribution& null) {
  Json samples = Json::array();
  for (double v : null.samples) samples.push_back(number(v));
  Json j = {{"metric", null.metric == MetricKind::Loss ? "loss" : "r2"},
            {"trials", null.samples.size()},
            {"samples", samples},
            {"trial_seeds", null.trial_seeds},
            {"hyperparams", to_json(null.hyperparams)}};
  if (null.samples.size() >= 2) {
    j["mean"] = number(null.mean());
    j["stddev"] = number(null.stddev());
  }
  if (!null.r2_samples.empty()) {
    Json r2 = Json::array();
    for (double v : null.r2_samples) r2.push_back(number(v));
    j["r2_samples"] = r2;
  }
  return j;
}

Json to_json(const SignificanceReport& report) {
  return {{"format", "fpp.significance"},
          {"version", kVersion},
          {"observed", number(report.observed)},
          {"p_empirical", report.p_empirical},
          {"p_empirical_note", "add-one permutation estimate; never below 1/(T+1)"},
          {"p_parametric", report.p_parametric},
          {"p_parametric_note", "Gaussian tail from null sample mean and standard deviation"},
          {"verdict_threshold", report.verdict_threshold},
          {"null", to_json(report.null)}};
}

Json to_json(const OverfitAssessment& a) {
  return {{"train_score", number(a.train_score)},
          {"test_score", number(a.test_score)},
          {"p_value", number(a.p_value)},
          {"verdict", a.verdict()},
          {"reason", a.reason}};
}

Json to_json(const GridStudyResult& grid) {
  Json samples = Json::array();
  for (const auto& row : grid.samples) {
    Json r = Json::array();
    for (const auto& cell : row) {
      Json c = Json::array();
      for (double v : cell) c.push_back(number(v));
      r.push_back(c);
    }
    samples.push_back(r);
  }
  return {{"format", "fpp.grid_study"},
          {"version", kVersion},
          {"r2_computed_on", "training data"},
          {"dims", grid.dims},
          {"sizes", grid.sizes},
          {"trials", grid.trials},
          {"reference_r2", grid.reference_r2},
          {"mean_r2", matrix_to_json(grid.mean_r2)},
          {"sd_r2", matrix_to_json(grid.sd_r2)},
          {"p_at_reference", matrix_to_json(grid.p_at_reference)},
          {"failures", matrix_to_json(grid.failures.cast<double>())},
          {"errors", grid.errors},
          {"samples", samples}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing file '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace fpp
