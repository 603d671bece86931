#include "doctest.h"

#include "rodessa/csv.hpp"
#include "rodessa/error.hpp"
#include "rodessa/series.hpp"
#include "support.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace rodessa;

TEST_CASE("embed matches the lagged-vector definition") {
  SUBCASE("single series") {
    Matrix x(4, 1);
    x << 1, 2, 3, 4;
    Matrix expected(2, 3);
    expected << 1, 2, 3, 2, 3, 4;
    CHECK(embed(MultivariateSeries(x), 2).data == expected);
  }
  SUBCASE("constant series") {
    Matrix x = Matrix::Constant(3, 1, 5.0);
    CHECK(embed(MultivariateSeries(x), 2).data == Matrix::Constant(2, 2, 5.0));
  }
  SUBCASE("two series are stacked side by side") {
    Matrix x(3, 2);
    x << 1, 4, 2, 5, 3, 6;
    Matrix expected(2, 4);
    expected << 1, 2, 4, 5, 2, 3, 5, 6;
    const auto traj = embed(MultivariateSeries(x), 2);
    CHECK(traj.data == expected);
    CHECK(traj.spec.columns() == 4);
  }
  SUBCASE("invalid windows") {
    const MultivariateSeries s(Matrix::Ones(4, 1));
    CHECK_THROWS_AS(embed(s, 1), Error);
    CHECK_THROWS_AS(embed(s, 4), Error);
    try {
      embed(s, 4);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidWindow);
    }
  }
}

TEST_CASE("series ingestion rejects bad data") {
  Matrix x = Matrix::Ones(3, 1);
  x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(MultivariateSeries{x}, Error);
  CHECK_THROWS_AS(MultivariateSeries{Matrix::Ones(1, 2)}, Error);
}

TEST_CASE("anti-diagonal cells") {
  const EmbeddingSpec spec(2, 4, 1);
  SUBCASE("corner") {
    const auto d = antidiagonal_cells(1, 1, spec);
    CHECK(d.size == 1);
    REQUIRE(d.cells.size() == 1);
    CHECK(d.cells[0] == std::pair<std::size_t, std::size_t>{1, 1});
  }
  SUBCASE("second diagonal") {
    const auto d = antidiagonal_cells(2, 1, spec);
    CHECK(d.size == 2);
    CHECK(d.cells == std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {1, 2}});
  }
  SUBCASE("cardinality in the middle of a long series") {
    const EmbeddingSpec s(35, 70, 1);
    CHECK(s.lagged() == 36);
    CHECK(antidiagonal_cells(36, 1, s).size == 35);
  }
  SUBCASE("index errors") {
    CHECK_THROWS_AS(antidiagonal_cells(0, 1, spec), Error);
    CHECK_THROWS_AS(antidiagonal_cells(5, 1, spec), Error);
    CHECK_THROWS_AS(antidiagonal_cells(1, 2, spec), Error);
  }
}

TEST_CASE("anti-diagonal cells agree with a brute-force enumeration") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t N = 3 + gen() % 40;
    const std::size_t L = 2 + gen() % (N - 2);
    const std::size_t p = 1 + gen() % 3;
    const EmbeddingSpec spec(L, N, p);
    const std::size_t Ku = spec.lagged();
    std::size_t total = 0;
    for (std::size_t j = 1; j <= p; ++j) {
      for (std::size_t i = 1; i <= N; ++i) {
        std::set<std::pair<std::size_t, std::size_t>> brute;
        for (std::size_t l = 1; l <= L; ++l)
          for (std::size_t k = 1; k <= Ku; ++k)
            if (l + k == i + 1) brute.insert({l, k + Ku * (j - 1)});
        const auto d = antidiagonal_cells(i, j, spec);
        CHECK(d.size == std::min({i, L, Ku, N - i + 1}));
        CHECK(std::set(d.cells.begin(), d.cells.end()) == brute);
        if (j == 1) total += d.size;
      }
    }
    CHECK(total == L * Ku);
  }
}

TEST_CASE("diagonal averaging") {
  SUBCASE("inverts the embedding") {
    Matrix x(4, 1);
    x << 1, 2, 3, 4;
    const auto traj = embed(MultivariateSeries(x), 2);
    CHECK(diagonal_average(traj.data, traj.spec) == x);
  }
  SUBCASE("hand example") {
    Matrix fit(2, 2);
    fit << 1, 2, 4, 3;
    Matrix expected(3, 1);
    expected << 1, 3, 3;
    CHECK(diagonal_average(fit, EmbeddingSpec(2, 3, 1)) == expected);
  }
  SUBCASE("zero matrix") {
    CHECK(diagonal_average(Matrix::Zero(3, 8), EmbeddingSpec(3, 6, 2)) == Matrix::Zero(6, 2));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(diagonal_average(Matrix::Zero(3, 7), EmbeddingSpec(3, 6, 2)), Error);
  }
}

TEST_CASE("round trip and Hankel property on random series") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t N = 5 + gen() % 60;
    const std::size_t L = 2 + gen() % (N - 2);
    const std::size_t p = 1 + gen() % 5;
    const Matrix x = test::random_matrix(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(p), gen());
    const auto traj = embed(x, EmbeddingSpec(L, N, p));
    CHECK(traj.data == test::naive_embed(x, L));
    CHECK((diagonal_average(traj.data, traj.spec) - x).cwiseAbs().maxCoeff() < 1e-12);
    for (std::size_t j = 1; j <= p; ++j) {
      for (std::size_t i = 1; i <= N; ++i) {
        for (const auto& [l, k] : antidiagonal_cells(i, j, traj.spec).cells) {
          CHECK(traj.data(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(k - 1)) ==
                x(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)));
        }
      }
    }
  }
}

TEST_CASE("predicted cells") {
  const EmbeddingSpec spec(3, 6, 2);  // Ku = 4, K = 8
  SUBCASE("zero factors") {
    const Matrix U = Matrix::Zero(3, 2), V = Matrix::Zero(8, 2);
    CHECK(predicted_cell(U, V, 3, 1, 2, spec) == 0.0);
  }
  SUBCASE("unit rank-one factors") {
    const Matrix U = Matrix::Ones(3, 1), V = Matrix::Ones(8, 1);
    for (std::size_t j = 1; j <= 2; ++j)
      for (std::size_t i = 1; i <= 6; ++i)
        for (std::size_t a = 1; a <= spec.diagonal_size(i); ++a)
          CHECK(predicted_cell(U, V, i, a, j, spec) == doctest::Approx(1.0));
  }
  SUBCASE("reads the explicit product and covers every entry once") {
    const Matrix U = test::random_matrix(3, 2, 1), V = test::random_matrix(8, 2, 2);
    const Matrix P = U * V.transpose();
    Matrix hits = Matrix::Zero(3, 8);
    for (std::size_t j = 1; j <= 2; ++j) {
      for (std::size_t i = 1; i <= 6; ++i) {
        for (std::size_t a = 1; a <= spec.diagonal_size(i); ++a) {
          const auto [l, k] = diagonal_cell(i, a, j, spec);
          CHECK(predicted_cell(U, V, i, a, j, spec) ==
                doctest::Approx(P(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(k - 1))));
          hits(static_cast<Eigen::Index>(l - 1), static_cast<Eigen::Index>(k - 1)) += 1.0;
        }
      }
    }
    CHECK(hits == Matrix::Ones(3, 8));
  }
  SUBCASE("position outside the diagonal") {
    const Matrix U = Matrix::Ones(3, 1), V = Matrix::Ones(8, 1);
    CHECK_THROWS_AS(predicted_cell(U, V, 1, 2, 1, spec), Error);
  }
}

TEST_CASE("csv ingestion") {
  SUBCASE("with time column and provenance comments") {
    std::istringstream in("# seed=4\ntime,a,b\nt1,1.5,2\nt2,3,-4e-1\nt3,5,6\n");
    const auto s = read_series_csv(in);
    CHECK(s.length() == 3);
    CHECK(s.count() == 2);
    CHECK(s.names() == std::vector<std::string>{"a", "b"});
    CHECK(s.timestamps() == std::vector<std::string>{"t1", "t2", "t3"});
    CHECK(s.at(2, 2) == -0.4);
  }
  SUBCASE("without time column") {
    std::istringstream in("u\n1\n2\n");
    const auto s = read_series_csv(in);
    CHECK(s.count() == 1);
    CHECK(s.timestamps().empty());
  }
  SUBCASE("ragged rows and bad numbers") {
    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_series_csv(ragged), Error);
    std::istringstream bad("a\n1\nx\n");
    CHECK_THROWS_AS(read_series_csv(bad), Error);
    std::istringstream nan("a\n1\nnan\n");
    CHECK_THROWS_AS(read_series_csv(nan), Error);
  }
  SUBCASE("write then read preserves values exactly") {
    const Matrix x = test::random_matrix(7, 3, 5, 100.0);
    std::ostringstream out;
    write_series_csv(out, MultivariateSeries(x), {{"seed", "1"}});
    std::istringstream in(out.str());
    const auto back = read_series_csv(in);
    CHECK(back.values() == x);
    CHECK(back.timestamps().size() == 7);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_series_csv(std::filesystem::path("/nonexistent/file.csv")), Error);
  }
}
