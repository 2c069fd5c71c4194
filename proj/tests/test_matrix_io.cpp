#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "shiftseq/matrix_io.hpp"

using namespace shiftseq;

TEST_CASE("matrices round-trip exactly through the text format") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd m = oracles::random_matrix(4, 3, seed);
    m *= std::pow(10.0, static_cast<double>(seed) - 10.0);
    std::stringstream buf;
    write_matrix(buf, m);
    const Eigen::MatrixXd back = read_matrix(buf, "roundtrip");
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    REQUIRE((back - m).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "shiftseq_m.mat";
  const Eigen::MatrixXd m = oracles::random_matrix(5, 5, 3);
  write_matrix(path.string(), m);
  REQUIRE((read_matrix(path.string()) - m).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("malformed matrices are rejected with the file named") {
  std::stringstream missing("2 2\n1 2 3\n");
  REQUIRE_THROWS_WITH(read_matrix(missing, "short.mat"),
                      Catch::Matchers::ContainsSubstring("short.mat"));
  std::stringstream header("x y\n");
  REQUIRE_THROWS_AS(read_matrix(header, "h"), IoError);
  REQUIRE_THROWS_WITH(read_matrix("/no/such/matrix.mat"),
                      Catch::Matchers::ContainsSubstring("/no/such/matrix.mat"));
}

TEST_CASE("signals must be single-column") {
  const auto path = std::filesystem::temp_directory_path() / "shiftseq_s.mat";
  write_matrix(path.string(), oracles::random_matrix(3, 2, 1));
  REQUIRE_THROWS_AS(read_signal(path.string()), IoError);
  write_signal(path.string(), oracles::random_vector(6, 2));
  REQUIRE(read_signal(path.string()).size() == 6);
  std::filesystem::remove(path);
}
