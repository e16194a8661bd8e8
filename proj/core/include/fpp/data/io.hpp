#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fpp/data/dataset.hpp"

namespace fpp {

/// A response column picked out of a CSV: by header name, or by zero-based
/// index when `column` is all digits and no header matches it.
struct ResponseColumn {
  std::string column;
  bool categorical = false;
};

/// Parsed CSV table; cells are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF, embedded newlines.
CsvTable read_csv_table(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

/// Header row required. Selected columns become responses, every other column
/// a numeric feature. Categorical columns are label-encoded in first-appearance
/// order. Rows with a non-finite feature are rejected with the row index.
Dataset load_csv(const std::filesystem::path& path, const std::vector<ResponseColumn>& responses);

/// NPY 1.0/2.0, C-order, little-endian <f4 or <f8, 2-D. f4 is widened.
RowMatrix load_npy(const std::filesystem::path& path);
RowMatrix parse_npy(const std::string& bytes);

/// Writes NPY 1.0 <f8, C-order.
void save_npy(const std::filesystem::path& path, const RowMatrix& matrix);
std::string encode_npy(const RowMatrix& matrix);

/// Quotes a cell when it holds a delimiter, quote, or newline.
std::string csv_escape(const std::string& cell);

}  // namespace fpp
