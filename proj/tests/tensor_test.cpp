/* Copyright 2026 The t2v Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>

#include "doctest.h"
#include "t2v/tensor.hpp"

namespace t2v {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, SeededRng& rng) {
  Matrix m(r, c);
  for (double& v : m.data()) v = 2.0 * rng.uniform() - 1.0;
  return m;
}

// Textbook i-j-k product, independent of the library's loop order.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

TEST_CASE("matmul examples") {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(matmul(Matrix::identity(2), m) == m);

  Matrix z = matmul(Matrix(2, 2), Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}));
  CHECK(z == Matrix(2, 3));

  const Matrix col = Matrix::from_rows({{5}, {6}});
  const Matrix expected = Matrix::from_rows({{17}, {39}});
  CHECK(matmul(m, col) == expected);
  CHECK(naive_product(m, col) == expected);
}

TEST_CASE("matmul rejects mismatched shapes and names both") {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2x3)") != std::string::npos);
  }
}

TEST_CASE("matrix construction requires positive dims") {
  CHECK_THROWS_AS(Matrix(0, 3), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST_CASE("elementwise examples") {
  const Matrix zero(2, 3);
  const Matrix half = sigmoid(zero);
  for (double v : half.data()) CHECK(v == 0.5);
  CHECK(tanh(zero) == zero);
  CHECK(hadamard(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3, 4}})) ==
        Matrix::from_rows({{3, 8}}));
  CHECK_THROWS_AS(hadamard(Matrix(1, 2), Matrix(2, 1)), ShapeError);
  CHECK_THROWS_AS(elementwise(ElementwiseOp::kAdd, zero), ShapeError);
}

TEST_CASE("matmul properties on random matrices") {
  SeededRng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(5), k = 1 + rng.below(5), m = 1 + rng.below(5),
                      p = 1 + rng.below(5);
    const Matrix a = random_matrix(n, k, rng), b = random_matrix(k, m, rng),
                 c = random_matrix(m, p, rng);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      CHECK(std::fabs(left[i] - right[i]) <= 1e-9 * std::max(1.0, std::fabs(right[i])));
    }
    CHECK(matmul(a, Matrix::identity(k)) == a);
    const Matrix d = random_matrix(n, k, rng);
    CHECK((a + d).transpose() == a.transpose() + d.transpose());
    const Matrix ref = naive_product(a, b);
    const Matrix got = matmul(a, b);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid and tanh stay strictly inside their ranges") {
  SeededRng rng(5);
  Matrix x(1, 200);
  for (double& v : x.data()) v = 30.0 * (2.0 * rng.uniform() - 1.0);
  const Matrix s = sigmoid(x);
  for (double v : s.data()) CHECK((v > 0.0 && v < 1.0));
  // tanh rounds to +-1 in double beyond |x| ~ 19.
  const Matrix moderate = scale(x, 1.0 / 3.0);
  const Matrix t = tanh(moderate);
  for (double v : t.data()) CHECK((v > -1.0 && v < 1.0));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
}

TEST_CASE("gaussian_init statistics") {
  SeededRng rng(2024);
  const Matrix m = gaussian_init(1000, 1000, 0.1, rng);
  double mean = 0.0;
  for (double v : m.data()) mean += v;
  mean /= static_cast<double>(m.size());
  double var = 0.0;
  for (double v : m.data()) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(m.size() - 1));
  CHECK(sd >= 0.099);
  CHECK(sd <= 0.101);
  CHECK(std::fabs(mean) <= 0.0005);
  CHECK(m.all_finite());
}

TEST_CASE("gaussian_init is reproducible and validates arguments") {
  SeededRng a(77), b(77);
  CHECK(gaussian_init(13, 7, 0.1, a) == gaussian_init(13, 7, 0.1, b));
  SeededRng c(78);
  SeededRng d(77);
  CHECK_FALSE(gaussian_init(13, 7, 0.1, c) == gaussian_init(13, 7, 0.1, d));
  CHECK_THROWS_AS(gaussian_init(0, 3, 0.1, a), ShapeError);
  CHECK_THROWS(gaussian_init(3, 3, 0.0, a));
}

TEST_CASE("rng integer draws are uniform enough and in range") {
  SeededRng rng(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

}  // namespace
}  // namespace t2v
