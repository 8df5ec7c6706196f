// Copyright 2026 The argmine Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "argmine/common.hpp"

namespace argmine::nn {

// Dense row-major matrix of doubles. Vectors are 1 x n matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

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

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(0.0); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  Matrix& operator+=(const Matrix& o) {
    assert(same_shape(o));
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Rows [begin, end) of m.
inline Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t end) {
  Matrix out(end - begin, m.cols());
  std::copy(m.data() + begin * m.cols(), m.data() + end * m.cols(), out.data());
  return out;
}

inline Matrix vstack(const std::vector<Matrix>& parts, std::size_t cols) {
  std::size_t rows = 0;
  for (const auto& p : parts) rows += p.rows();
  Matrix out(rows, cols);
  std::size_t r = 0;
  for (const auto& p : parts) {
    std::copy(p.data(), p.data() + p.size(), out.data() + r * cols);
    r += p.rows();
  }
  return out;
}

// [a | b] column-wise.
inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows());
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + a.cols());
  }
  return out;
}

inline double squared_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s += v * v;
  return s;
}

inline bool all_finite(const Matrix& m) {
  return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

// out(n x k) += a(n x m) * b(m x k)
inline void matmul_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.rows() && out.rows() == a.rows() && out.cols() == b.cols());
  const std::size_t k = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.data() + i * k;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double av = a(i, j);
      if (av == 0.0) continue;
      const double* br = b.data() + j * k;
      for (std::size_t c = 0; c < k; ++c) o[c] += av * br[c];
    }
  }
}

// out(m x k) += a^T * b where a is (n x m), b is (n x k).
inline void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.rows() == b.rows() && out.rows() == a.cols() && out.cols() == b.cols());
  const std::size_t k = b.cols();
  for (std::size_t n = 0; n < a.rows(); ++n) {
    const double* br = b.data() + n * k;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double av = a(n, i);
      if (av == 0.0) continue;
      double* o = out.data() + i * k;
      for (std::size_t c = 0; c < k; ++c) o[c] += av * br[c];
    }
  }
}

// out(n x m) += a(n x k) * b^T where b is (m x k).
inline void matmul_nt_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.cols() && out.rows() == a.rows() && out.cols() == b.rows());
  const std::size_t k = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.data() + i * k;
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* br = b.data() + j * k;
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) s += ar[c] * br[c];
      out(i, j) += s;
    }
  }
}

// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.zero(); }
};

using ParameterList = std::vector<Parameter*>;

inline void init_uniform(Parameter& p, double bound, Rng& rng) {
  for (auto& v : p.value.values()) v = rng.uniform(-bound, bound);
}

inline void init_normal(Parameter& p, double stddev, Rng& rng) {
  for (auto& v : p.value.values()) v = stddev * rng.normal();
}

inline void zero_grads(const ParameterList& params) {
  for (auto* p : params) p->zero_grad();
}

inline std::size_t parameter_count(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto* p : params) n += p->value.size();
  return n;
}

// Deep copy of parameter values, used for best-checkpoint bookkeeping.
inline std::vector<Matrix> snapshot(const ParameterList& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const auto* p : params) out.push_back(p->value);
  return out;
}

inline void restore(const ParameterList& params, const std::vector<Matrix>& values) {
  assert(params.size() == values.size());
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace argmine::nn
