#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fpp/data/io.hpp"
#include "fpp/error.hpp"

namespace fpp {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// from_chars also accepts nan/inf spellings; callers check finiteness.
bool parse_double(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  std::size_t start = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) start = 3;
  for (i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("csv: unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw ValidationError("csv: missing header row");
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw ValidationError("csv: row " + std::to_string(r) + " has " +
                            std::to_string(table.rows[r].size()) + " fields, header has " +
                            std::to_string(table.header.size()));
    }
  }
  return table;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("missing file '" + path.string() + "'");
  return parse_csv(slurp(path));
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<ResponseColumn>& responses) {
  const CsvTable table = read_csv_table(path);
  const std::size_t ncols = table.header.size();
  const std::size_t n = table.rows.size();
  if (n == 0) throw ValidationError("empty dataset: '" + path.string() + "' has no data rows");

  std::vector<std::size_t> response_cols;
  std::vector<bool> is_response(ncols, false);
  for (const auto& sel : responses) {
    std::size_t col = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (trim(table.header[j]) == sel.column) {
        col = j;
        break;
      }
    }
    if (col == ncols && is_index(sel.column)) col = std::stoul(sel.column);
    if (col >= ncols) throw ValidationError("csv: response column '" + sel.column + "' not found");
    if (is_response[col]) throw ValidationError("csv: column '" + sel.column + "' selected twice");
    is_response[col] = true;
    response_cols.push_back(col);
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < ncols; ++j) {
    if (!is_response[j]) {
      feature_cols.push_back(j);
      names.push_back(trim(table.header[j]));
    }
  }
  if (feature_cols.empty()) throw ValidationError("csv: no feature columns left");

  RowMatrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const std::string& cell = table.rows[r][feature_cols[k]];
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw ValidationError("csv: non-numeric feature cell '" + cell + "' at row " +
                              std::to_string(r) + ", column '" + names[k] + "'");
      }
      if (!std::isfinite(v)) {
        throw ValidationError("csv: non-finite feature value at row " + std::to_string(r) +
                              ", column '" + names[k] + "'");
      }
      features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v;
    }
  }

  std::vector<Response> out;
  for (std::size_t s = 0; s < responses.size(); ++s) {
    const std::size_t col = response_cols[s];
    const std::string name = trim(table.header[col]);
    if (responses[s].categorical) {
      std::unordered_map<std::string, int> codes;
      std::vector<std::string> class_names;
      std::vector<int> labels(n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::string key = trim(table.rows[r][col]);
        auto [it, inserted] = codes.try_emplace(key, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(key);
        labels[r] = it->second;
      }
      if (class_names.size() < 2) {
        throw ValidationError("csv: categorical response '" + name + "' has K=" +
                              std::to_string(class_names.size()) + " (< 2) classes");
      }
      const int k = static_cast<int>(class_names.size());
      out.push_back(Response::categorical(name, std::move(labels), k, std::move(class_names)));
    } else {
      Vector values(static_cast<Eigen::Index>(n));
      for (std::size_t r = 0; r < n; ++r) {
        double v = 0.0;
        if (!parse_double(table.rows[r][col], v) || !std::isfinite(v)) {
          throw ValidationError("csv: invalid continuous response value '" + table.rows[r][col] +
                                "' at row " + std::to_string(r) + ", column '" + name + "'");
        }
        values[static_cast<Eigen::Index>(r)] = v;
      }
      out.push_back(Response::continuous(name, std::move(values)));
    }
  }
  return Dataset(std::move(features), std::move(out), std::move(names));
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace fpp
