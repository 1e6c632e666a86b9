#include "spb/matrix_io.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "spb/errors.hpp"

namespace spb {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'B', '1'};
constexpr std::uint64_t kMaxDim = 1ull << 20;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("SPB1: truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("SPB1: truncated data");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_header(std::ostream& out, std::uint8_t kind, Index rows, Index cols) {
  out.write(kMagic.data(), 4);
  const std::array<char, 4> flags{static_cast<char>(kind), 0, 0, 0};
  out.write(flags.data(), 4);
  put_u64(out, static_cast<std::uint64_t>(rows));
  put_u64(out, static_cast<std::uint64_t>(cols));
}

std::uint8_t read_header(std::istream& in, Index& rows, Index& cols) {
  std::array<char, 8> head;
  if (!in.read(head.data(), 8)) throw FormatError("SPB1: truncated header");
  if (std::memcmp(head.data(), kMagic.data(), 4) != 0) throw FormatError("SPB1: bad magic");
  const auto kind = static_cast<std::uint8_t>(head[4]);
  if (kind > 1 || head[5] != 0 || head[6] != 0 || head[7] != 0) {
    throw FormatError("SPB1: unknown element kind");
  }
  const std::uint64_t r = get_u64(in);
  const std::uint64_t c = get_u64(in);
  if (r == 0 || c == 0 || r > kMaxDim || c > kMaxDim) throw FormatError("SPB1: bad dimensions");
  rows = static_cast<Index>(r);
  cols = static_cast<Index>(c);
  return kind;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, Index row) {
  const char* s = field.c_str();
  while (*s == ' ' || *s == '\t') ++s;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == s || !end || *end != '\0' || errno == ERANGE) {
    std::ostringstream msg;
    msg << "CSV: bad number '" << field << "' on data row " << row + 1;
    throw FormatError(msg.str());
  }
  return v;
}

Index parse_dim(const std::string& field) {
  const char* s = field.c_str();
  while (*s == ' ') ++s;
  char* end = nullptr;
  const long long v = std::strtoll(s, &end, 10);
  while (end && *end == ' ') ++end;
  if (end == s || !end || *end != '\0' || v <= 0 || static_cast<std::uint64_t>(v) > kMaxDim) {
    throw FormatError("CSV: header must be 'rows,cols' with positive integers");
  }
  return static_cast<Index>(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("CSV: missing header");
  const auto head = split_fields(line);
  if (head.size() != 2) throw FormatError("CSV: header must be 'rows,cols'");
  const Index rows = parse_dim(head[0]);
  const Index cols = parse_dim(head[1]);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw FormatError("CSV: fewer data rows than the header states");
    const auto fields = split_fields(line);
    if (static_cast<Index>(fields.size()) != cols) {
      std::ostringstream msg;
      msg << "CSV: data row " << i + 1 << " has " << fields.size() << " fields, expected " << cols;
      throw FormatError(msg.str());
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(fields[j], i);
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw FormatError("CSV: more data rows than the header states");
    }
  }
  return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_binary(std::istream& in) {
  Index rows = 0, cols = 0;
  if (read_header(in, rows, cols) != 0) {
    throw FormatError("SPB1: complex matrix given to a real-only reader");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = get_f64(in);
  }
  return m;
}

void write_matrix_binary(std::ostream& out, const Matrix& m) {
  write_header(out, 0, m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
  }
}

void write_complex_binary(std::ostream& out, const Eigen::MatrixXcd& m) {
  write_header(out, 1, m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
  }
}

Eigen::MatrixXcd read_complex_binary(std::istream& in) {
  Index rows = 0, cols = 0;
  if (read_header(in, rows, cols) != 1) throw FormatError("SPB1: expected a complex matrix");
  Eigen::MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      m(i, j) = {re, im};
    }
  }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), 4);
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_matrix_binary(in) : read_matrix_csv(in);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ostringstream out(std::ios::binary);
  if (format == MatrixFormat::Csv) {
    write_matrix_csv(out, m);
  } else {
    write_matrix_binary(out, m);
  }
  atomic_write(path, out.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename onto " + path.string());
  }
}

}  // namespace spb
