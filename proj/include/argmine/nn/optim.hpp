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

#include <cmath>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/nn/tensor.hpp"

namespace argmine::nn {

// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
inline double clip_grad_norm(const ParameterList& params, double max_norm) {
  if (!(max_norm > 0.0)) throw Error("max_norm must be positive");
  double sq = 0.0;
  for (const auto* p : params) sq += squared_norm(p->grad);
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto* p : params) p->grad *= scale;
  }
  return norm;
}

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

class Adam {
 public:
  Adam(ParameterList params, double lr) : params_(std::move(params)) {
    state_.lr = lr;
    for (const auto* p : params_) {
      state_.m.emplace_back(p->value.rows(), p->value.cols());
      state_.v.emplace_back(p->value.rows(), p->value.cols());
    }
  }

  // Applies one update. Non-finite gradients abort the step before any
  // parameter changes.
  void step() {
    for (const auto* p : params_)
      if (!all_finite(p->grad)) throw NumericError("non-finite gradient in " + p->name);
    ++state_.step;
    const double bc1 = 1.0 - std::pow(state_.beta1, static_cast<double>(state_.step));
    const double bc2 = 1.0 - std::pow(state_.beta2, static_cast<double>(state_.step));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& val = params_[k]->value;
      const auto& g = params_[k]->grad;
      auto& m = state_.m[k];
      auto& v = state_.v[k];
      for (std::size_t i = 0; i < val.size(); ++i) {
        m[i] = state_.beta1 * m[i] + (1.0 - state_.beta1) * g[i];
        v[i] = state_.beta2 * v[i] + (1.0 - state_.beta2) * g[i] * g[i];
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        val[i] -= state_.lr * mh / (std::sqrt(vh) + state_.eps);
      }
    }
  }

  void zero_grad() { zero_grads(params_); }

  const AdamState& state() const { return state_; }
  const ParameterList& parameters() const { return params_; }

 private:
  ParameterList params_;
  AdamState state_;
};

}  // namespace argmine::nn
