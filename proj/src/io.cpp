#include "repsim/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "repsim/errors.hpp"

namespace repsim {
namespace {

constexpr char kMagic[4] = {'R', 'S', 'M', '1'};

uint64_t decode_u64_le(const unsigned char* b) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void encode_u64_le(uint64_t v, unsigned char* b) {
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
}

double decode_f64_le(const unsigned char* b) {
  uint64_t bits = decode_u64_le(b);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void encode_f64_le(double v, unsigned char* b) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  encode_u64_le(bits, b);
}

ActivationMatrix load_rsm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 20)
    throw parse_error(path.string() + ": truncated header at byte " +
                      std::to_string(bytes.size()));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw parse_error(path.string() + ": bad magic at byte 0 (expected RSM1)");
  const uint64_t n = decode_u64_le(bytes.data() + 4);
  const uint64_t p = decode_u64_le(bytes.data() + 12);
  const uint64_t expected = 20 + n * p * 8;
  if (n == 0 || p == 0 || n > (1ull << 32) || p > (1ull << 32))
    throw parse_error(path.string() + ": implausible dimensions at byte 4");
  if (bytes.size() != expected)
    throw parse_error(path.string() + ": payload ends at byte " +
                      std::to_string(bytes.size()) + ", expected " +
                      std::to_string(expected));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const unsigned char* cur = bytes.data() + 20;
  for (uint64_t i = 0; i < n; ++i)
    for (uint64_t j = 0; j < p; ++j, cur += 8)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = decode_f64_le(cur);
  return ActivationMatrix(std::move(m), false);
}

// One CSV line -> numeric fields. Returns false if any field fails to parse
// (used for header detection on the first line).
bool parse_numeric_line(const std::string& line, std::vector<double>& out) {
  out.clear();
  size_t pos = 0;
  while (true) {
    size_t comma = line.find(',', pos);
    std::string_view field(line.data() + pos,
                           (comma == std::string::npos ? line.size() : comma) - pos);
    // trim spaces
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
      field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
      field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) return false;
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return true;
}

ActivationMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  bool first_data_line = true;
  std::vector<double> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_numeric_line(line, fields)) {
      if (first_data_line) {
        first_data_line = false;  // header row, skip
        continue;
      }
      throw parse_error(path.string() + ": line " + std::to_string(line_no) +
                        ": non-numeric field");
    }
    first_data_line = false;
    if (!rows.empty() && fields.size() != rows.front().size())
      throw parse_error(path.string() + ": line " + std::to_string(line_no) +
                        ": ragged row, got " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(rows.front().size()));
    rows.push_back(fields);
  }
  if (rows.empty()) throw parse_error(path.string() + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return ActivationMatrix(std::move(m), false);
}

}  // namespace

ActivationMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::rsm_binary:
      return load_rsm(path);
    case MatrixFormat::csv:
      return load_csv(path);
  }
  throw validation_error("unknown matrix format");
}

MatrixFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  char head[4] = {};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0)
    return MatrixFormat::rsm_binary;
  return MatrixFormat::csv;
}

void save_rsm(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(kMagic, 4);
  unsigned char buf[8];
  encode_u64_le(static_cast<uint64_t>(m.rows()), buf);
  out.write(reinterpret_cast<const char*>(buf), 8);
  encode_u64_le(static_cast<uint64_t>(m.cols()), buf);
  out.write(reinterpret_cast<const char*>(buf), 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      encode_f64_le(m(i, j), buf);
      out.write(reinterpret_cast<const char*>(buf), 8);
    }
  if (!out) throw io_error("write failed for " + path.string());
}

void save_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace repsim
