#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "fpp/data/io.hpp"
#include "fpp/error.hpp"

namespace fpp {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

static_assert(std::endian::native == std::endian::little,
              "NPY reader assumes a little-endian host");

std::uint32_t read_le(const std::string& bytes, std::size_t offset, std::size_t width) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::string dict_value(const std::string& header, const std::string& key) {
  const std::regex re("['\"]" + key + "['\"]\\s*:\\s*(\\([^)]*\\)|'[^']*'|\"[^\"]*\"|True|False)");
  std::smatch m;
  if (!std::regex_search(header, m, re)) throw ValidationError("npy: header lacks '" + key + "'");
  return m[1].str();
}

}  // namespace

RowMatrix parse_npy(const std::string& bytes) {
  if (bytes.size() < kMagicLen + 4 || bytes.compare(0, kMagicLen, kMagic, kMagicLen) != 0) {
    throw ValidationError("npy: bad magic string");
  }
  const int major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = read_le(bytes, 8, 2);
    header_start = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) throw ValidationError("npy: truncated header");
    header_len = read_le(bytes, 8, 4);
    header_start = 12;
  } else {
    throw ValidationError("npy: unsupported format version " + std::to_string(major));
  }
  if (bytes.size() < header_start + header_len) throw ValidationError("npy: truncated header");
  const std::string header = bytes.substr(header_start, header_len);

  std::string descr = dict_value(header, "descr");
  descr = descr.substr(1, descr.size() - 2);
  std::size_t width = 0;
  if (descr == "<f8" || descr == "f8") {
    width = 8;
  } else if (descr == "<f4" || descr == "f4") {
    width = 4;
  } else {
    throw ValidationError("npy: unsupported dtype '" + descr + "' (need <f4 or <f8)");
  }
  if (dict_value(header, "fortran_order") != "False") throw ValidationError("npy: unsupported order");

  const std::string shape_text = dict_value(header, "shape");
  std::vector<std::size_t> shape;
  {
    const std::regex num("\\d+");
    for (auto it = std::sregex_iterator(shape_text.begin(), shape_text.end(), num);
         it != std::sregex_iterator(); ++it) {
      shape.push_back(std::stoull(it->str()));
    }
  }
  if (shape.size() != 2) {
    throw ValidationError("npy: expected a 2-D array, got " + std::to_string(shape.size()) + "-D");
  }
  if (shape[0] == 0 || shape[1] == 0) throw ValidationError("npy: empty dataset");

  const std::size_t count = shape[0] * shape[1];
  const std::size_t payload = header_start + header_len;
  if (bytes.size() < payload + count * width) throw ValidationError("npy: truncated payload");

  RowMatrix out(static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1]));
  const char* src = bytes.data() + payload;
  if (width == 8) {
    std::memcpy(out.data(), src, count * 8);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f = 0;
      std::memcpy(&f, src + 4 * i, 4);
      out.data()[i] = static_cast<double>(f);
    }
  }
  return out;
}

RowMatrix load_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_npy(ss.str());
}

std::string encode_npy(const RowMatrix& matrix) {
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                       std::to_string(matrix.rows()) + ", " + std::to_string(matrix.cols()) +
                       "), }";
  // Pad so magic + version + length + header is a multiple of 64, ending in '\n'.
  const std::size_t total = kMagicLen + 2 + 2 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header += '\n';

  std::string out(kMagic, kMagicLen);
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(header.size() & 0xff);
  out += static_cast<char>((header.size() >> 8) & 0xff);
  out += header;
  const std::size_t bytes = static_cast<std::size_t>(matrix.size()) * sizeof(double);
  const std::size_t offset = out.size();
  out.resize(offset + bytes);
  std::memcpy(out.data() + offset, matrix.data(), bytes);
  return out;
}

void save_npy(const std::filesystem::path& path, const RowMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  const std::string bytes = encode_npy(matrix);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

}  // namespace fpp
