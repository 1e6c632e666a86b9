#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "spb/linalg.hpp"

namespace spb {

// CSV: first line "rows,cols", then one row-major line per matrix row.
// Binary: "SPB1", u8 kind (0 real, 1 complex), 3 zero bytes, u64 rows,
// u64 cols, then row-major little-endian f64 (complex interleaved re, im).
enum class MatrixFormat { Csv, Binary };

Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

Matrix read_matrix_binary(std::istream& in);
void write_matrix_binary(std::ostream& out, const Matrix& m);
void write_complex_binary(std::ostream& out, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_complex_binary(std::istream& in);

// Detects the format from the leading bytes.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format);

std::string format_double(double v);

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

}  // namespace spb
