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

// Linear-chain CRF with optional transition constraints. Disallowed
// transitions score -inf in both the partition function and decoding, so
// the model is a distribution over well-formed tag paths only.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/nn/tensor.hpp"
#include "argmine/tagging.hpp"

namespace argmine {

using nn::Matrix;
using nn::Parameter;
using nn::ParameterList;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

class Crf {
 public:
  Crf() = default;
  Crf(const std::string& name, std::size_t labels)
      : transitions_(name + ".transitions", labels, labels),
        start_(name + ".start", 1, labels),
        end_(name + ".end", 1, labels),
        allowed_(labels * labels, 1),
        allowed_start_(labels, 1),
        allowed_end_(labels, 1) {}

  std::size_t labels() const { return start_.value.cols(); }

  // Restricts transitions to those well-formed under the tag scheme.
  void constrain(const TagSet& tags) {
    const auto L = static_cast<int>(labels());
    if (tags.size() != L) throw Error("tag set size does not match CRF label count");
    for (int i = 0; i < L; ++i) {
      allowed_start_[i] = tags.allowed_start(i);
      allowed_end_[i] = tags.allowed_end(i);
      for (int j = 0; j < L; ++j) allowed_[i * L + j] = tags.allowed(i, j);
    }
  }

  bool allowed(std::size_t from, std::size_t to) const { return allowed_[from * labels() + to]; }
  bool allowed_start(std::size_t to) const { return allowed_start_[to]; }
  bool allowed_end(std::size_t from) const { return allowed_end_[from]; }

  double transition(std::size_t from, std::size_t to) const {
    return allowed(from, to) ? transitions_.value(from, to) : kNegInf;
  }
  double start_score(std::size_t to) const { return allowed_start(to) ? start_.value[to] : kNegInf; }
  double end_score(std::size_t from) const { return allowed_end(from) ? end_.value[from] : kNegInf; }

  Parameter& transitions() { return transitions_; }
  Parameter& start() { return start_; }
  Parameter& end() { return end_; }

  // Score of a tag path; -inf when the path violates a constraint.
  double path_score(const Matrix& emissions, const std::vector<int>& path) const {
    const std::size_t n = emissions.rows();
    if (path.size() != n || n == 0) throw Error("path length does not match emissions");
    double s = start_score(path[0]) + emissions(0, path[0]);
    for (std::size_t t = 1; t < n; ++t) s += transition(path[t - 1], path[t]) + emissions(t, path[t]);
    return s + end_score(path[n - 1]);
  }

  // Forward recursion in log space; alpha(t, j) includes emissions up to t.
  Matrix forward_scores(const Matrix& emissions) const {
    const std::size_t n = emissions.rows(), L = labels();
    Matrix alpha(n, L);
    for (std::size_t j = 0; j < L; ++j) alpha(0, j) = start_score(j) + emissions(0, j);
    std::vector<double> buf(L);
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t j = 0; j < L; ++j) {
        for (std::size_t i = 0; i < L; ++i) buf[i] = alpha(t - 1, i) + transition(i, j);
        alpha(t, j) = log_sum_exp(buf) + emissions(t, j);
      }
    }
    return alpha;
  }

  // beta(t, i) = log sum over suffixes after position t given tag i at t.
  Matrix backward_scores(const Matrix& emissions) const {
    const std::size_t n = emissions.rows(), L = labels();
    Matrix beta(n, L);
    for (std::size_t i = 0; i < L; ++i) beta(n - 1, i) = end_score(i);
    std::vector<double> buf(L);
    for (std::size_t t = n - 1; t-- > 0;) {
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) buf[j] = transition(i, j) + emissions(t + 1, j) + beta(t + 1, j);
        beta(t, i) = log_sum_exp(buf);
      }
    }
    return beta;
  }

  double log_partition(const Matrix& emissions) const {
    if (emissions.rows() == 0) throw Error("log_partition needs at least one position");
    const Matrix alpha = forward_scores(emissions);
    const std::size_t n = emissions.rows();
    std::vector<double> last(labels());
    for (std::size_t j = 0; j < labels(); ++j) last[j] = alpha(n - 1, j) + end_score(j);
    return log_sum_exp(last);
  }

  // Negative log-likelihood of `gold`. When `d_emissions` is given it receives
  // d nll / d emissions (scaled by `scale`), and the transition parameters
  // accumulate their scaled gradients.
  double nll(const Matrix& emissions, const std::vector<int>& gold, Matrix* d_emissions = nullptr,
             double scale = 1.0) {
    const std::size_t n = emissions.rows(), L = labels();
    const double gold_score = path_score(emissions, gold);
    if (gold_score == kNegInf) throw Error("gold path violates the transition constraints");
    const Matrix alpha = forward_scores(emissions);
    const Matrix beta = backward_scores(emissions);
    std::vector<double> last(L);
    for (std::size_t j = 0; j < L; ++j) last[j] = alpha(n - 1, j) + end_score(j);
    const double log_z = log_sum_exp(last);
    if (!d_emissions) return log_z - gold_score;

    *d_emissions = Matrix(n, L);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < L; ++j) {
        const double m = alpha(t, j) + beta(t, j) - log_z;
        (*d_emissions)(t, j) = scale * (m == kNegInf ? 0.0 : std::exp(m));
      }
      (*d_emissions)(t, gold[t]) -= scale;
    }
    for (std::size_t j = 0; j < L; ++j) {
      if (allowed_start(j)) start_.grad[j] += scale * std::exp(alpha(0, j) + beta(0, j) - log_z);
      if (allowed_end(j)) end_.grad[j] += scale * std::exp(alpha(n - 1, j) + end_score(j) - log_z);
    }
    start_.grad[gold[0]] -= scale;
    end_.grad[gold[n - 1]] -= scale;
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t i = 0; i < L; ++i) {
        if (alpha(t - 1, i) == kNegInf) continue;
        for (std::size_t j = 0; j < L; ++j) {
          if (!allowed(i, j)) continue;
          const double m = alpha(t - 1, i) + transition(i, j) + emissions(t, j) + beta(t, j) - log_z;
          transitions_.grad(i, j) += scale * std::exp(m);
        }
      }
      transitions_.grad(gold[t - 1], gold[t]) -= scale;
    }
    return log_z - gold_score;
  }

  // Highest-scoring allowed path. Ties resolve to the lowest label index.
  std::vector<int> viterbi(const Matrix& emissions) const {
    const std::size_t n = emissions.rows(), L = labels();
    if (n == 0) return {};
    Matrix delta(n, L);
    std::vector<std::vector<int>> back(n, std::vector<int>(L, 0));
    for (std::size_t j = 0; j < L; ++j) delta(0, j) = start_score(j) + emissions(0, j);
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t j = 0; j < L; ++j) {
        double best = kNegInf;
        int arg = 0;
        for (std::size_t i = 0; i < L; ++i) {
          const double s = delta(t - 1, i) + transition(i, j);
          if (s > best) {
            best = s;
            arg = static_cast<int>(i);
          }
        }
        delta(t, j) = best + emissions(t, j);
        back[t][j] = arg;
      }
    }
    double best = kNegInf;
    int arg = 0;
    for (std::size_t j = 0; j < L; ++j) {
      const double s = delta(n - 1, j) + end_score(j);
      if (s > best) {
        best = s;
        arg = static_cast<int>(j);
      }
    }
    std::vector<int> path(n);
    path[n - 1] = arg;
    for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
    return path;
  }

  ParameterList parameters() { return {&transitions_, &start_, &end_}; }

 private:
  Parameter transitions_;
  Parameter start_;
  Parameter end_;
  std::vector<char> allowed_;
  std::vector<char> allowed_start_;
  std::vector<char> allowed_end_;
};

}  // namespace argmine
