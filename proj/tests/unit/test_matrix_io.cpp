#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spb/errors.hpp"
#include "spb/matrix_io.hpp"

using namespace spb;

TEST(MatrixCsv, RoundTripIsExact) {
  const Matrix m = oracle::gaussian(5, 3, 11);
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const Matrix back = read_matrix_csv(ss);
  EXPECT_EQ(back, m);
}

TEST(MatrixCsv, HeaderAndLayout) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4.5;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  EXPECT_EQ(ss.str(), "2,2\n1,2\n3,4.5\n");
}

TEST(MatrixCsv, RejectsMalformedInput) {
  for (const char* text : {"", "2\n1,2\n", "2,2\n1,2\n", "2,2\n1,2\n3,x\n", "2,2\n1,2\n3,4\n5,6\n",
                           "1,2\n1,2,3\n", "0,2\n"}) {
    std::stringstream ss(text);
    EXPECT_THROW(read_matrix_csv(ss), FormatError) << text;
  }
}

TEST(MatrixBinary, RoundTripAndMagic) {
  const Matrix m = oracle::gaussian(4, 7, 12);
  std::stringstream ss;
  write_matrix_binary(ss, m);
  const std::string bytes = ss.str();
  ASSERT_GE(bytes.size(), 24u + 8u * 28u);
  EXPECT_EQ(bytes.substr(0, 4), "SPB1");
  EXPECT_EQ(bytes[4], 0);
  EXPECT_EQ(read_matrix_binary(ss), m);
}

TEST(MatrixBinary, ComplexRoundTripAndRealReaderRejects) {
  Eigen::MatrixXcd c(2, 2);
  c << std::complex<double>(1, 2), std::complex<double>(3, -4), std::complex<double>(0, 1),
      std::complex<double>(5, 0);
  std::stringstream ss;
  write_complex_binary(ss, c);
  std::stringstream copy(ss.str());
  EXPECT_EQ(read_complex_binary(ss), c);
  EXPECT_THROW(read_matrix_binary(copy), FormatError);
}

TEST(MatrixBinary, TruncatedAndBadMagic) {
  const Matrix m = oracle::gaussian(3, 3, 13);
  std::stringstream ss;
  write_matrix_binary(ss, m);
  std::string bytes = ss.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_matrix_binary(cut), FormatError);
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  EXPECT_THROW(read_matrix_binary(bad), FormatError);
}

TEST(MatrixFile, DetectsFormatAndWritesAtomically) {
  const auto dir = std::filesystem::temp_directory_path() / "spb_matrix_io_test";
  std::filesystem::create_directories(dir);
  const Matrix m = oracle::gaussian(6, 2, 14);
  write_matrix(dir / "m.csv", m, MatrixFormat::Csv);
  write_matrix(dir / "m.bin", m, MatrixFormat::Binary);
  EXPECT_EQ(read_matrix(dir / "m.csv"), m);
  EXPECT_EQ(read_matrix(dir / "m.bin"), m);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    EXPECT_TRUE(name == "m.csv" || name == "m.bin") << name;
  }
  EXPECT_THROW(read_matrix(dir / "missing.csv"), FormatError);
  std::filesystem::remove_all(dir);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
