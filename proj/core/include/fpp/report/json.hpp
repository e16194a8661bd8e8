#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpp/optim/fit.hpp"
#include "fpp/significance/grid.hpp"
#include "fpp/significance/null.hpp"

namespace fpp {

using Json = nlohmann::ordered_json;

/// Row-major {"rows", "cols", "values"} block.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const HyperParams& hp);
/// Rejects unknown keys; missing keys keep the values already in `base`.
HyperParams hyperparams_from_json(const Json& j, HyperParams base = {});

const char* to_string(RetractionMode mode);
RetractionMode parse_retraction(const std::string& text);
const char* to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& text);
const char* to_string(LearningRateSchedule schedule);
LearningRateSchedule parse_schedule(const std::string& text);

Json to_json(const Head& head);
Head head_from_json(const Json& j);

struct AxisWeight {
  std::string feature;
  double weight = 0.0;
};
/// Largest-|weight| input features of each projection column, signed.
std::array<std::vector<AxisWeight>, 2> top_axis_weights(const Basis2& p, const std::vector<std::string>& names,
                                                       std::size_t top = 3);

/// Where a fit came from; echoed into the report.
struct FitProvenance {
  std::size_t samples = 0;
  std::size_t dim = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  double test_fraction = 0.0;
  bool stratified = false;
  bool stratification_fallback = false;
  std::vector<std::string> column_names;
  std::optional<Basis2> ground_truth;
};

/// Deterministic given the fit; carries no timings.
Json fit_result_to_json(const FitResult& result, const FitProvenance& provenance);
/// Rebuilds what embed() and evaluate() need: projection, pre-projection,
/// scaling, heads, response layout, hyperparameters and scores.
FitResult fit_result_from_json(const Json& j);

Json to_json(const NullDistribution& null);
Json to_json(const SignificanceReport& report);
Json to_json(const OverfitAssessment& assessment);
Json to_json(const GridStudyResult& grid);

/// Shortest round-trip text for a double (17 significant digits at most).
std::string format_double(double v);

Json read_json_file(const std::filesystem::path& path);
/// Two-space indent with trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fpp
