#include "fpp/report/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fpp/data/io.hpp"
#include "fpp/error.hpp"
#include "fpp/report/json.hpp"

namespace fpp {

namespace {

std::string class_label(const Response& r, int label) {
  const auto u = static_cast<std::size_t>(label);
  return u < r.class_names().size() ? r.class_names()[u] : std::to_string(label);
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
    throw ValidationError("responses.csv row " + std::to_string(row) + ", column '" + column +
                          "': not a finite number ('" + cell + "')");
  }
  return v;
}

}  // namespace

void write_bundle(const std::filesystem::path& dir, const Dataset& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create '" + dir.string() + "': " + ec.message());

  save_npy(dir / "features.npy", data.features());

  std::ostringstream csv;
  for (std::size_t l = 0; l < data.response_count(); ++l) {
    csv << (l ? "," : "") << csv_escape(data.response(l).name());
  }
  csv << '\n';
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    for (std::size_t l = 0; l < data.response_count(); ++l) {
      const Response& r = data.response(l);
      if (l) csv << ',';
      csv << (r.is_categorical() ? csv_escape(class_label(r, r.labels()[i]))
                                 : format_double(r.values()[static_cast<Eigen::Index>(i)]));
    }
    csv << '\n';
  }
  write_text_file(dir / "responses.csv", csv.str());

  Json meta;
  meta["format"] = "fpp.bundle";
  meta["samples"] = data.sample_count();
  meta["dim"] = data.dim();
  meta["column_names"] = data.column_names();
  Json responses = Json::array();
  for (const auto& r : data.responses()) {
    Json entry = {{"name", r.name()}, {"kind", r.is_categorical() ? "categorical" : "continuous"}};
    if (r.is_categorical()) {
      Json classes = Json::array();
      for (int k = 0; k < r.class_count(); ++k) classes.push_back(class_label(r, k));
      entry["classes"] = classes;
    }
    responses.push_back(entry);
  }
  meta["responses"] = responses;
  if (data.meta()) {
    Json params = Json::object();
    for (const auto& [key, value] : data.meta()->parameters) params[key] = value;
    Json synthetic = {{"generator", data.meta()->generator}, {"parameters", params}};
    if (data.meta()->ground_truth.rows() > 0) synthetic["ground_truth"] = matrix_to_json(data.meta()->ground_truth);
    meta["synthetic"] = synthetic;
  }
  write_json_file(dir / "meta.json", meta);
}

Dataset read_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("dataset directory '" + dir.string() + "' not found");
  RowMatrix features = load_npy(dir / "features.npy");
  const CsvTable table = read_csv_table(dir / "responses.csv");
  const auto n = static_cast<std::size_t>(features.rows());
  if (table.rows.size() != n) {
    throw ValidationError("responses.csv has " + std::to_string(table.rows.size()) + " rows but features.npy has " +
                          std::to_string(n));
  }
  Json meta;
  const bool has_meta = std::filesystem::exists(dir / "meta.json");
  if (has_meta) meta = read_json_file(dir / "meta.json");

  std::vector<Response> responses;
  try {
    for (std::size_t l = 0; l < table.header.size(); ++l) {
      const std::string& name = table.header[l];
      const Json* info = nullptr;
      if (has_meta && meta.contains("responses") && l < meta["responses"].size()) info = &meta["responses"][l];
      for (std::size_t i = 0; i < n; ++i) {
        if (table.rows[i].size() != table.header.size()) {
          throw ValidationError("responses.csv row " + std::to_string(i) + " has the wrong number of cells");
        }
      }
      if (info && info->value("kind", "continuous") == "categorical") {
        const auto classes = info->at("classes").get<std::vector<std::string>>();
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto it = std::find(classes.begin(), classes.end(), table.rows[i][l]);
          if (it == classes.end()) {
            throw ValidationError("responses.csv row " + std::to_string(i) + ": unknown class '" + table.rows[i][l] +
                                  "' for '" + name + "'");
          }
          labels[i] = static_cast<int>(it - classes.begin());
        }
        responses.push_back(Response::categorical(name, std::move(labels), static_cast<int>(classes.size()), classes));
      } else {
        Vector values(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) values[static_cast<Eigen::Index>(i)] = parse_cell(table.rows[i][l], i, name);
        responses.push_back(Response::continuous(name, std::move(values)));
      }
    }
    std::vector<std::string> names;
    if (has_meta && meta.contains("column_names")) names = meta["column_names"].get<std::vector<std::string>>();
    Dataset data(std::move(features), std::move(responses), std::move(names));
    if (has_meta && meta.contains("synthetic")) {
      const Json& s = meta["synthetic"];
      SyntheticMeta sm;
      sm.generator = s.value("generator", "");
      if (s.contains("ground_truth")) sm.ground_truth = matrix_from_json(s["ground_truth"]);
      if (s.contains("parameters")) {
        for (const auto& [key, value] : s["parameters"].items()) sm.parameters.emplace_back(key, value.get<double>());
      }
      data.set_meta(std::move(sm));
    }
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("meta.json: " + std::string(e.what()));
  }
}

}  // namespace fpp
