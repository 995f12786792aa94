#include "frlc/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace frlc::io {

namespace {

constexpr char kMagic[8] = {'F', 'R', 'L', 'C', 'M', 'A', 'T', '1'};

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& tok, double& out) {
  const std::string t = trim(tok);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ls(line);
  while (std::getline(ls, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(const unsigned char* p) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

// Rows of numeric cells; `skip_header` drops a first line that fails to parse.
std::vector<std::vector<double>> parse_rows(const std::string& text, bool allow_header, std::vector<std::string>* header) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool ok = true;
    for (const auto& c : cells) {
      double v;
      if (!parse_double(c, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (allow_header && rows.empty() && header && header->empty()) {
        for (const auto& c : cells) header->push_back(trim(c));
        continue;
      }
      throw ParseError("non-numeric CSV cell", lineno);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("expected " + std::to_string(rows.front().size()) + " columns, found " +
                           std::to_string(row.size()),
                       lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix M(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
  return M;
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f << s;
}

}  // namespace

Matrix parse_csv(const std::string& text) { return to_matrix(parse_rows(text, false, nullptr)); }

std::string format_csv(const Matrix& M) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      // Shortest round-trip representation.
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, M(i, j));
      (void)ec;
      if (j) out += ',';
      out.append(buf, p);
    }
    out += '\n';
  }
  return out;
}

Matrix read_binary(const std::string& path) {
  const std::string data = slurp(path);
  if (data.size() < 16 || std::memcmp(data.data(), kMagic, 8) != 0)
    throw ParseError("'" + path + "' lacks the FRLCMAT1 header", 1);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  const std::uint32_t rows = get_le<std::uint32_t>(p + 8);
  const std::uint32_t cols = get_le<std::uint32_t>(p + 12);
  const std::size_t need = 16 + std::size_t(rows) * cols * 8;
  if (data.size() != need)
    throw ParseError("'" + path + "' payload size " + std::to_string(data.size() - 16) + " does not match " +
                         std::to_string(rows) + "x" + std::to_string(cols),
                     1);
  Matrix M(rows, cols);
  std::size_t off = 16;
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j, off += 8) M(i, j) = get_le<double>(p + off);
  return M;
}

void write_binary(const std::string& path, const Matrix& M) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f.write(kMagic, 8);
  put_le<std::uint32_t>(f, std::uint32_t(M.rows()));
  put_le<std::uint32_t>(f, std::uint32_t(M.cols()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) put_le<double>(f, M(i, j));
}

Matrix read_matrix(const std::string& path) {
  if (ends_with(path, ".mat")) return read_binary(path);
  return parse_csv(slurp(path));
}

void write_matrix(const std::string& path, const Matrix& M) {
  if (ends_with(path, ".mat")) return write_binary(path, M);
  write_text(path, format_csv(M));
}

Vector read_vector(const std::string& path) {
  const Matrix M = read_matrix(path);
  if (M.size() == 0) throw ParseError("'" + path + "' is empty", 1);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  fail(ErrorKind::ShapeMismatch, "'" + path + "' is not a single row or column");
}

void write_vector(const std::string& path, const Vector& v) { write_matrix(path, Matrix(v)); }

PointCloud read_points(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = parse_rows(slurp(path), true, &header);
  if (rows.empty()) throw ParseError("'" + path + "' has no points", 1);
  Matrix M = to_matrix(rows);
  PointCloud pc;
  if (!header.empty() && header.back() == "label") {
    pc.labels.resize(M.rows());
    for (Index i = 0; i < M.rows(); ++i) pc.labels[i] = int(M(i, M.cols() - 1));
    pc.points = M.leftCols(M.cols() - 1);
  } else {
    pc.points = std::move(M);
  }
  return pc;
}

void write_points(const std::string& path, const PointCloud& pc) {
  std::string out;
  for (Index d = 0; d < pc.points.cols(); ++d) out += (d ? ",x" : "x") + std::to_string(d);
  if (!pc.labels.empty()) out += ",label";
  out += '\n';
  Matrix M = pc.points;
  if (!pc.labels.empty()) {
    M.conservativeResize(Eigen::NoChange, M.cols() + 1);
    for (Index i = 0; i < M.rows(); ++i) M(i, M.cols() - 1) = pc.labels[i];
  }
  out += format_csv(M);
  write_text(path, out);
}

std::vector<int> read_labels(const std::string& path) {
  const Vector v = read_vector(path);
  std::vector<int> out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = int(std::lround(v[i]));
  return out;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::string out;
  for (int l : labels) out += std::to_string(l) + '\n';
  write_text(path, out);
}

}  // namespace frlc::io
