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

// Layers with hand-derived gradients. Every layer follows the same pattern:
// `forward` is const and fills a cache; `backward` consumes that cache,
// accumulates parameter gradients and returns the input gradient.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "argmine/common.hpp"
#include "argmine/nn/tensor.hpp"

namespace argmine::nn {

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------

class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out)
      : weight_(name + ".weight", in, out), bias_(name + ".bias", 1, out) {}

  void init(Rng& rng) {
    init_uniform(weight_, std::sqrt(1.0 / static_cast<double>(in_dim())), rng);
    init_uniform(bias_, std::sqrt(1.0 / static_cast<double>(in_dim())), rng);
  }

  std::size_t in_dim() const { return weight_.value.rows(); }
  std::size_t out_dim() const { return weight_.value.cols(); }

  // x: n x in -> n x out
  Matrix forward(const Matrix& x) const {
    Matrix y(x.rows(), out_dim());
    for (std::size_t r = 0; r < y.rows(); ++r)
      std::copy(bias_.value.data(), bias_.value.data() + out_dim(), y.row(r).begin());
    matmul_acc(x, weight_.value, y);
    return y;
  }

  Matrix backward(const Matrix& x, const Matrix& dy) {
    matmul_tn_acc(x, dy, weight_.grad);
    for (std::size_t r = 0; r < dy.rows(); ++r)
      for (std::size_t c = 0; c < dy.cols(); ++c) bias_.grad[c] += dy(r, c);
    Matrix dx(x.rows(), in_dim());
    matmul_nt_acc(dy, weight_.value, dx);
    return dx;
  }

  ParameterList parameters() { return {&weight_, &bias_}; }

 private:
  Parameter weight_;
  Parameter bias_;
};

// ---------------------------------------------------------------------------

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(const std::string& name, std::size_t vocab, std::size_t dim) : table_(name, vocab, dim) {}

  void init(Rng& rng) { init_normal(table_, 1.0, rng); }

  std::size_t vocab() const { return table_.value.rows(); }
  std::size_t dim() const { return table_.value.cols(); }

  Matrix forward(const std::vector<int>& ids) const {
    Matrix y(ids.size(), dim());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto src = table_.value.row(static_cast<std::size_t>(ids[i]));
      std::copy(src.begin(), src.end(), y.row(i).begin());
    }
    return y;
  }

  void backward(const std::vector<int>& ids, const Matrix& dy) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto dst = table_.grad.row(static_cast<std::size_t>(ids[i]));
      const auto src = dy.row(i);
      for (std::size_t c = 0; c < dim(); ++c) dst[c] += src[c];
    }
  }

  ParameterList parameters() { return {&table_}; }

 private:
  Parameter table_;
};

// ---------------------------------------------------------------------------
// Inverted dropout.

struct DropoutMask {
  Matrix scale;  // empty when dropout was the identity
};

inline Matrix dropout(const Matrix& x, double p, bool train, Rng& rng, DropoutMask& mask) {
  if (!train || p <= 0.0) {
    mask.scale = Matrix();
    return x;
  }
  mask.scale = Matrix(x.rows(), x.cols());
  Matrix y = x;
  const double keep = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < y.size(); ++i) {
    mask.scale[i] = rng.uniform() < p ? 0.0 : keep;
    y[i] *= mask.scale[i];
  }
  return y;
}

inline Matrix dropout_backward(const Matrix& dy, const DropoutMask& mask) {
  if (mask.scale.empty()) return dy;
  Matrix dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask.scale[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Single-direction LSTM. Gate order inside the 4H blocks: input, forget,
// cell candidate, output.

struct LstmCache {
  Matrix gates;  // n x 4H, post-activation
  Matrix cell;   // n x H, indexed by time step
  Matrix hidden; // n x H
  Matrix cell_tanh;
};

class Lstm {
 public:
  Lstm() = default;
  Lstm(const std::string& name, std::size_t in, std::size_t hidden, bool reverse)
      : w_input_(name + ".w_input", in, 4 * hidden),
        w_hidden_(name + ".w_hidden", hidden, 4 * hidden),
        bias_(name + ".bias", 1, 4 * hidden),
        reverse_(reverse) {}

  void init(Rng& rng) {
    init_uniform(w_input_, std::sqrt(1.0 / static_cast<double>(in_dim())), rng);
    init_uniform(w_hidden_, std::sqrt(1.0 / static_cast<double>(hidden_dim())), rng);
    bias_.value.zero();
    for (std::size_t j = 0; j < hidden_dim(); ++j) bias_.value[hidden_dim() + j] = 1.0;
  }

  std::size_t in_dim() const { return w_input_.value.rows(); }
  std::size_t hidden_dim() const { return w_hidden_.value.rows(); }
  bool reverse() const { return reverse_; }

  Matrix forward(const Matrix& x, LstmCache& cache) const {
    const std::size_t n = x.rows(), H = hidden_dim();
    Matrix pre(n, 4 * H);
    for (std::size_t t = 0; t < n; ++t)
      std::copy(bias_.value.data(), bias_.value.data() + 4 * H, pre.row(t).begin());
    matmul_acc(x, w_input_.value, pre);

    cache.gates = Matrix(n, 4 * H);
    cache.cell = Matrix(n, H);
    cache.hidden = Matrix(n, H);
    cache.cell_tanh = Matrix(n, H);
    std::vector<double> z(4 * H);
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t t = reverse_ ? n - 1 - step : step;
      std::copy(pre.row(t).begin(), pre.row(t).end(), z.begin());
      if (step > 0) {
        const std::size_t prev = reverse_ ? t + 1 : t - 1;
        const auto h = cache.hidden.row(prev);
        for (std::size_t k = 0; k < H; ++k) {
          const double hv = h[k];
          if (hv == 0.0) continue;
          const double* w = w_hidden_.value.data() + k * 4 * H;
          for (std::size_t j = 0; j < 4 * H; ++j) z[j] += hv * w[j];
        }
      }
      auto g = cache.gates.row(t);
      for (std::size_t j = 0; j < H; ++j) {
        g[j] = sigmoid(z[j]);
        g[H + j] = sigmoid(z[H + j]);
        g[2 * H + j] = std::tanh(z[2 * H + j]);
        g[3 * H + j] = sigmoid(z[3 * H + j]);
      }
      const double* c_prev = step > 0 ? cache.cell.row(reverse_ ? t + 1 : t - 1).data() : nullptr;
      for (std::size_t j = 0; j < H; ++j) {
        const double c = (c_prev ? g[H + j] * c_prev[j] : 0.0) + g[j] * g[2 * H + j];
        cache.cell(t, j) = c;
        cache.cell_tanh(t, j) = std::tanh(c);
        cache.hidden(t, j) = g[3 * H + j] * cache.cell_tanh(t, j);
      }
    }
    return cache.hidden;
  }

  Matrix backward(const Matrix& x, const LstmCache& cache, const Matrix& dh_out) {
    const std::size_t n = x.rows(), H = hidden_dim();
    Matrix dz_all(n, 4 * H);
    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dh(H);
    for (std::size_t step = n; step-- > 0;) {
      const std::size_t t = reverse_ ? n - 1 - step : step;
      const auto g = cache.gates.row(t);
      const double* c_prev = step > 0 ? cache.cell.row(reverse_ ? t + 1 : t - 1).data() : nullptr;
      auto dz = dz_all.row(t);
      for (std::size_t j = 0; j < H; ++j) {
        const double i = g[j], f = g[H + j], cand = g[2 * H + j], o = g[3 * H + j];
        const double tc = cache.cell_tanh(t, j);
        const double dhj = dh_out(t, j) + dh_next[j];
        const double dc = dhj * o * (1.0 - tc * tc) + dc_next[j];
        dz[j] = dc * cand * i * (1.0 - i);
        dz[H + j] = c_prev ? dc * c_prev[j] * f * (1.0 - f) : 0.0;
        dz[2 * H + j] = dc * i * (1.0 - cand * cand);
        dz[3 * H + j] = dhj * tc * o * (1.0 - o);
        dc_next[j] = dc * f;
      }
      // dh_prev = dz * W_hidden^T; dW_hidden += h_prev^T dz
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      if (step > 0) {
        const auto h_prev = cache.hidden.row(reverse_ ? t + 1 : t - 1);
        for (std::size_t k = 0; k < H; ++k) {
          const double* w = w_hidden_.value.data() + k * 4 * H;
          double* gw = w_hidden_.grad.data() + k * 4 * H;
          double s = 0.0;
          const double hv = h_prev[k];
          for (std::size_t j = 0; j < 4 * H; ++j) {
            s += dz[j] * w[j];
            gw[j] += hv * dz[j];
          }
          dh_next[k] = s;
        }
      }
    }
    matmul_tn_acc(x, dz_all, w_input_.grad);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < 4 * H; ++j) bias_.grad[j] += dz_all(t, j);
    Matrix dx(n, in_dim());
    matmul_nt_acc(dz_all, w_input_.value, dx);
    return dx;
  }

  ParameterList parameters() { return {&w_input_, &w_hidden_, &bias_}; }

 private:
  Parameter w_input_;
  Parameter w_hidden_;
  Parameter bias_;
  bool reverse_ = false;
};

// ---------------------------------------------------------------------------
// Stacked bidirectional LSTM; dropout is applied between layers.

struct BiLstmCache {
  std::vector<Matrix> inputs;  // input to each layer (after dropout)
  std::vector<LstmCache> forward;
  std::vector<LstmCache> backward;
  std::vector<DropoutMask> masks;  // masks[l] applied to output of layer l
};

class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(const std::string& name, std::size_t in, std::size_t hidden, std::size_t layers) : hidden_(hidden) {
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t d = l == 0 ? in : 2 * hidden;
      const std::string prefix = name + ".l" + std::to_string(l);
      fwd_.emplace_back(prefix + ".fwd", d, hidden, false);
      bwd_.emplace_back(prefix + ".bwd", d, hidden, true);
    }
  }

  void init(Rng& rng) {
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
      fwd_[l].init(rng);
      bwd_[l].init(rng);
    }
  }

  std::size_t layers() const { return fwd_.size(); }
  std::size_t out_dim() const { return 2 * hidden_; }

  Matrix forward(const Matrix& x, BiLstmCache& cache, double dropout_p = 0.0, bool train = false,
                 Rng* rng = nullptr) const {
    const std::size_t L = layers();
    cache.inputs.assign(L, Matrix());
    cache.forward.assign(L, LstmCache());
    cache.backward.assign(L, LstmCache());
    cache.masks.assign(L, DropoutMask());
    Matrix cur = x;
    for (std::size_t l = 0; l < L; ++l) {
      cache.inputs[l] = cur;
      Matrix out = hconcat(fwd_[l].forward(cur, cache.forward[l]), bwd_[l].forward(cur, cache.backward[l]));
      if (l + 1 < L && train && rng) {
        cur = dropout(out, dropout_p, true, *rng, cache.masks[l]);
      } else {
        cur = std::move(out);
      }
    }
    return cur;
  }

  Matrix backward(const BiLstmCache& cache, const Matrix& dy) {
    Matrix grad = dy;
    for (std::size_t l = layers(); l-- > 0;) {
      if (l + 1 < layers()) grad = dropout_backward(grad, cache.masks[l]);
      const std::size_t n = grad.rows();
      Matrix df(n, hidden_), db(n, hidden_);
      for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < hidden_; ++j) {
          df(t, j) = grad(t, j);
          db(t, j) = grad(t, hidden_ + j);
        }
      }
      Matrix dx = fwd_[l].backward(cache.inputs[l], cache.forward[l], df);
      dx += bwd_[l].backward(cache.inputs[l], cache.backward[l], db);
      grad = std::move(dx);
    }
    return grad;
  }

  ParameterList parameters() {
    ParameterList out;
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
      for (auto* p : fwd_[l].parameters()) out.push_back(p);
      for (auto* p : bwd_[l].parameters()) out.push_back(p);
    }
    return out;
  }

 private:
  std::size_t hidden_ = 0;
  std::vector<Lstm> fwd_;
  std::vector<Lstm> bwd_;
};

// ---------------------------------------------------------------------------
// 1-D convolutions over time, one bank of filters per n-gram size, each
// followed by ReLU and max-pooling over time. Inputs shorter than an n-gram
// are zero-padded at the end so every bank sees at least one window.

struct ConvCache {
  Matrix padded;                                // m x d, m = max(n, largest ngram)
  std::vector<std::vector<std::size_t>> argmax;  // per bank, per filter
  std::vector<std::vector<double>> pooled;       // per bank, per filter (post-ReLU)
  std::size_t rows = 0;                         // unpadded input length
};

class ConvMaxPool {
 public:
  ConvMaxPool() = default;
  ConvMaxPool(const std::string& name, std::size_t in, std::vector<std::size_t> ngram_sizes, std::size_t filters)
      : in_(in), filters_(filters), ngrams_(std::move(ngram_sizes)) {
    for (std::size_t s : ngrams_) {
      weights_.emplace_back(name + ".w" + std::to_string(s), s * in, filters);
      biases_.emplace_back(name + ".b" + std::to_string(s), 1, filters);
    }
  }

  void init(Rng& rng) {
    for (std::size_t k = 0; k < ngrams_.size(); ++k) {
      const double bound = std::sqrt(1.0 / static_cast<double>(ngrams_[k] * in_));
      init_uniform(weights_[k], bound, rng);
      init_uniform(biases_[k], bound, rng);
    }
  }

  std::size_t out_dim() const { return ngrams_.size() * filters_; }
  const std::vector<std::size_t>& ngram_sizes() const { return ngrams_; }

  // x: n x in -> 1 x (|ngrams| * filters)
  Matrix forward(const Matrix& x, ConvCache& cache) const {
    std::size_t longest = 1;
    for (std::size_t s : ngrams_) longest = std::max(longest, s);
    const std::size_t m = std::max(x.rows(), longest);
    cache.rows = x.rows();
    cache.padded = Matrix(m, in_);
    std::copy(x.data(), x.data() + x.size(), cache.padded.data());
    cache.argmax.assign(ngrams_.size(), {});
    cache.pooled.assign(ngrams_.size(), {});

    Matrix out(1, out_dim());
    std::vector<double> conv(filters_);
    for (std::size_t k = 0; k < ngrams_.size(); ++k) {
      const std::size_t s = ngrams_[k];
      const std::size_t windows = std::max(x.rows(), s) - s + 1;
      const std::size_t span = s * in_;
      auto& best_t = cache.argmax[k];
      auto& best = cache.pooled[k];
      best_t.assign(filters_, 0);
      best.assign(filters_, 0.0);
      for (std::size_t t = 0; t < windows; ++t) {
        std::copy(biases_[k].value.data(), biases_[k].value.data() + filters_, conv.begin());
        const double* win = cache.padded.data() + t * in_;
        for (std::size_t q = 0; q < span; ++q) {
          const double v = win[q];
          if (v == 0.0) continue;
          const double* w = weights_[k].value.data() + q * filters_;
          for (std::size_t f = 0; f < filters_; ++f) conv[f] += v * w[f];
        }
        for (std::size_t f = 0; f < filters_; ++f) {
          const double r = conv[f] > 0.0 ? conv[f] : 0.0;
          if (t == 0 || r > best[f]) {
            best[f] = r;
            best_t[f] = t;
          }
        }
      }
      for (std::size_t f = 0; f < filters_; ++f) out(0, k * filters_ + f) = best[f];
    }
    return out;
  }

  Matrix backward(const ConvCache& cache, const Matrix& dy) {
    Matrix dpad(cache.padded.rows(), in_);
    for (std::size_t k = 0; k < ngrams_.size(); ++k) {
      const std::size_t span = ngrams_[k] * in_;
      for (std::size_t f = 0; f < filters_; ++f) {
        if (cache.pooled[k][f] <= 0.0) continue;  // ReLU inactive
        const double g = dy(0, k * filters_ + f);
        const std::size_t t = cache.argmax[k][f];
        biases_[k].grad[f] += g;
        const double* win = cache.padded.data() + t * in_;
        double* dwin = dpad.data() + t * in_;
        for (std::size_t q = 0; q < span; ++q) {
          weights_[k].grad[q * filters_ + f] += win[q] * g;
          dwin[q] += weights_[k].value[q * filters_ + f] * g;
        }
      }
    }
    return slice_rows(dpad, 0, cache.rows);
  }

  ParameterList parameters() {
    ParameterList out;
    for (std::size_t k = 0; k < ngrams_.size(); ++k) {
      out.push_back(&weights_[k]);
      out.push_back(&biases_[k]);
    }
    return out;
  }

 private:
  std::size_t in_ = 0;
  std::size_t filters_ = 0;
  std::vector<std::size_t> ngrams_;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

// ---------------------------------------------------------------------------
// Softmax and cross-entropy.

inline std::vector<double> softmax(std::span<const double> logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits[i] - mx));
  for (auto& v : p) v /= z;
  return p;
}

inline constexpr double kProbFloor = 1e-12;

// -log probs[target]. A zero target probability is clamped to kProbFloor
// and reported through `clamped`.
inline double cross_entropy(std::span<const double> probs, std::size_t target, bool* clamped = nullptr) {
  double p = probs[target];
  const bool low = p < kProbFloor;
  if (clamped) *clamped = low;
  if (low) p = kProbFloor;
  return -std::log(p);
}

// Mean cross-entropy of softmax(logits) rows against targets. Writes
// d loss / d logits into `dlogits`.
inline double softmax_cross_entropy(const Matrix& logits, const std::vector<std::size_t>& targets, Matrix* dlogits) {
  const std::size_t n = logits.rows();
  if (dlogits) *dlogits = Matrix(n, logits.cols());
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto p = softmax(logits.row(r));
    loss += cross_entropy(p, targets[r]);
    if (dlogits) {
      for (std::size_t c = 0; c < p.size(); ++c)
        (*dlogits)(r, c) = (p[c] - (c == targets[r] ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  return loss / static_cast<double>(n);
}

}  // namespace argmine::nn
