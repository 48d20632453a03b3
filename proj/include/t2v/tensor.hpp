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

#ifndef T2V_TENSOR_HPP_
#define T2V_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace t2v {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Dense row-major matrix of doubles. Column vectors are n x 1 matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix column(std::vector<double> values);
  // Nested initializer for tests and small literals.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  void fill(double value);
  Matrix transpose() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

enum class ElementwiseOp { kAdd, kSub, kHadamard, kSigmoid, kTanh };

// Unary ops ignore `b`; binary ops require `b` with the shape of `a`.
Matrix elementwise(ElementwiseOp op, const Matrix& a, const Matrix* b = nullptr);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix sigmoid(const Matrix& a);
Matrix tanh(const Matrix& a);
Matrix scale(const Matrix& a, double s);

// y += alpha * x, shapes must agree.
void axpy(double alpha, const Matrix& x, Matrix& y);
double sum_of_squares(const Matrix& a);

double sigmoid(double x);

// Vector kernels used on the hot path of the recurrent layers. All spans are
// dense; `m` is interpreted as an (out.size() x in.size()) row-major matrix.
void gemv_accumulate(const Matrix& m, std::span<const double> in, std::span<double> out);
void gemv_transpose_accumulate(const Matrix& m, std::span<const double> in,
                               std::span<double> out);
void outer_accumulate(std::span<const double> left, std::span<const double> right,
                      Matrix& m);

// MT19937-64 (whose output sequence is fixed by the C++ standard) with
// uniform, integer and Box-Muller normal transforms implemented here rather
// than taken from <random>'s distributions, whose algorithms are
// implementation-defined. Identical seeds give identical streams everywhere.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  // Uniform integer in [0, bound), rejection-sampled; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Matrix gaussian_init(std::size_t rows, std::size_t cols, double sigma, SeededRng& rng);

}  // namespace t2v

#endif  // T2V_TENSOR_HPP_
