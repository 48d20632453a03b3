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

#include "t2v/tensor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace t2v {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
}

void require_same_shape(const char* what, const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) {
    throw ShapeError("data length " + std::to_string(data_.size()) + " does not match " +
                     shape_string());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Matrix(n, 1, std::move(values));
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("from_rows: no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("from_rows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << "(" << rows_ << "x" << cols_ << ")";
  return os.str();
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, " + a.shape_string() + " x " +
                     b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix elementwise(ElementwiseOp op, const Matrix& a, const Matrix* b) {
  Matrix out = a;
  auto o = out.data();
  switch (op) {
    case ElementwiseOp::kAdd:
    case ElementwiseOp::kSub:
    case ElementwiseOp::kHadamard: {
      if (b == nullptr) throw ShapeError("elementwise: binary op needs a second operand");
      require_same_shape("elementwise", a, *b);
      auto bd = b->data();
      for (std::size_t i = 0; i < o.size(); ++i) {
        if (op == ElementwiseOp::kAdd) {
          o[i] += bd[i];
        } else if (op == ElementwiseOp::kSub) {
          o[i] -= bd[i];
        } else {
          o[i] *= bd[i];
        }
      }
      break;
    }
    case ElementwiseOp::kSigmoid:
      for (double& v : o) v = sigmoid(v);
      break;
    case ElementwiseOp::kTanh:
      for (double& v : o) v = std::tanh(v);
      break;
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  return elementwise(ElementwiseOp::kAdd, a, &b);
}
Matrix operator-(const Matrix& a, const Matrix& b) {
  return elementwise(ElementwiseOp::kSub, a, &b);
}
Matrix hadamard(const Matrix& a, const Matrix& b) {
  return elementwise(ElementwiseOp::kHadamard, a, &b);
}
Matrix sigmoid(const Matrix& a) { return elementwise(ElementwiseOp::kSigmoid, a); }
Matrix tanh(const Matrix& a) { return elementwise(ElementwiseOp::kTanh, a); }

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

void axpy(double alpha, const Matrix& x, Matrix& y) {
  require_same_shape("axpy", x, y);
  auto xd = x.data();
  auto yd = y.data();
  for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += alpha * xd[i];
}

double sum_of_squares(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

void gemv_accumulate(const Matrix& m, std::span<const double> in, std::span<double> out) {
  if (m.rows() != out.size() || m.cols() != in.size()) {
    throw ShapeError("gemv: matrix " + m.shape_string() + " against input " +
                     std::to_string(in.size()) + " and output " + std::to_string(out.size()));
  }
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto mr = m.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) acc += mr[c] * in[c];
    out[r] += acc;
  }
}

void gemv_transpose_accumulate(const Matrix& m, std::span<const double> in,
                               std::span<double> out) {
  if (m.rows() != in.size() || m.cols() != out.size()) {
    throw ShapeError("gemv_t: matrix " + m.shape_string() + " against input " +
                     std::to_string(in.size()) + " and output " + std::to_string(out.size()));
  }
  for (std::size_t r = 0; r < in.size(); ++r) {
    const double v = in[r];
    auto mr = m.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += mr[c] * v;
  }
}

void outer_accumulate(std::span<const double> left, std::span<const double> right,
                      Matrix& m) {
  if (m.rows() != left.size() || m.cols() != right.size()) {
    throw ShapeError("outer: target " + m.shape_string() + " against " +
                     std::to_string(left.size()) + "x" + std::to_string(right.size()));
  }
  for (std::size_t r = 0; r < left.size(); ++r) {
    const double l = left[r];
    if (l == 0.0) continue;
    auto mr = m.row(r);
    for (std::size_t c = 0; c < right.size(); ++c) mr[c] += l * right[c];
  }
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double SeededRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Matrix gaussian_init(std::size_t rows, std::size_t cols, double sigma, SeededRng& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_init: sigma must be positive");
  Matrix m(rows, cols);
  for (double& v : m.data()) v = sigma * rng.normal();
  return m;
}

}  // namespace t2v
