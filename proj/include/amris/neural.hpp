// Copyright 2026 The amris Authors.
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

// Small reverse-mode differentiation engine over dense real matrices, plus
// the layers the agents are built from: MLPs and multi-head self-attention.
//
// A Graph is a tape. Every op appends a node whose value is computed eagerly;
// backward() walks the tape in reverse creation order, which is a valid
// topological order, and accumulates into the Parameters that were bound
// with Graph::param(). Graphs are cheap and meant to live for one update.

#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amris/rng.hpp"

namespace amris::nn {

using Mat = Eigen::MatrixXd;

class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

struct Parameter {
  std::string name;
  Mat value;
  Mat grad;

  Parameter() = default;
  Parameter(std::string n, Mat v) : name(std::move(n)), value(std::move(v)) {
    grad = Mat::Zero(value.rows(), value.cols());
  }
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

using ParamRefs = std::vector<Parameter*>;

struct Var {
  int id = -1;
};

class Graph {
 public:
  Var constant(Mat v);
  Var param(Parameter& p);

  const Mat& value(Var v) const { return nodes_.at(v.id).value; }
  const Mat& grad(Var v) const { return nodes_.at(v.id).grad; }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var add_row(Var a, Var row);  // broadcast a 1 x c row over every row of a
  Var mul_row(Var a, Var row);
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var relu(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var square(Var a);
  Var softmax_rows(Var a);
  Var transpose(Var a);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var flatten(Var a);  // row-major, 1 x (rows * cols)
  Var row_sum(Var a);  // rows x 1
  Var sum(Var a);      // 1 x 1
  Var mean(Var a);     // 1 x 1
  Var clip(Var a, double lo, double hi);
  Var minimum(Var a, Var b);

  // Seeds d(root) = 1; root must be 1 x 1.
  void backward(Var root);

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    Parameter* param = nullptr;
    std::function<void(Graph&, const Mat&)> back;
  };

  Var push(Mat value, bool needs_grad, std::function<void(Graph&, const Mat&)> back);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  void accumulate(Var v, const Mat& g);

  std::vector<Node> nodes_;
};

// Dense stack: ReLU on hidden layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::span<const int> dims, Rng& rng, const std::string& name = "mlp");

  Var forward(Graph& g, Var x);
  Mat forward(const Mat& x);
  ParamRefs parameters();
  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int output_dim() const { return dims_.empty() ? 0 : dims_.back(); }

  std::vector<Parameter> weights;
  std::vector<Parameter> biases;

 private:
  std::vector<int> dims_;
};

// W_Q, W_K, W_V per head (input_dim x d_k) and the shared output projection
// W_O (num_heads * d_k x output_dim).
struct AttentionParams {
  std::vector<Parameter> w_q;
  std::vector<Parameter> w_k;
  std::vector<Parameter> w_v;
  Parameter w_o;

  static AttentionParams init(int input_dim, int d_k, int num_heads, int output_dim, Rng& rng);
  int num_heads() const { return static_cast<int>(w_q.size()); }
  int d_k() const { return w_q.empty() ? 0 : static_cast<int>(w_q.front().value.cols()); }
  ParamRefs parameters();
};

// softmax(Q K^T / sqrt(d_k)) V with Q = X W_Q and so on; tokens are rows of X.
Var attention_head(Graph& g, Var w_q, Var w_k, Var w_v, Var tokens);

// Concatenated head outputs times W_O.
Var multi_head(Graph& g, AttentionParams& attn, Var tokens);

// Turns a token matrix into one flat feature row. With attention disabled
// the tokens are flattened directly.
class StateEncoder {
 public:
  StateEncoder() = default;
  StateEncoder(int num_tokens, int token_dim, bool use_attention, int d_k, int num_heads,
               int output_dim, double dropout, Rng& rng);

  Var encode(Graph& g, const Mat& tokens, bool training, Rng* dropout_rng);
  int output_dim() const { return output_dim_; }
  bool uses_attention() const { return use_attention_; }
  ParamRefs parameters();

  AttentionParams attention;

 private:
  bool use_attention_ = false;
  int num_tokens_ = 0;
  int output_dim_ = 0;
  double dropout_ = 0.0;
};

// p <- p - lr * grad for every parameter.
void sgd_step(std::span<Parameter* const> params, double lr);

// Rescales gradients so their joint L2 norm is at most max_norm. Returns the
// norm before scaling.
double clip_grad_norm(std::span<Parameter* const> params, double max_norm);

void zero_grad(std::span<Parameter* const> params);

// target <- tau * current + (1 - tau) * target, elementwise.
void soft_update(std::span<Parameter* const> current, std::span<Parameter* const> target,
                 double tau);

// Checkpoint layout: "<prefix>.bin" holds every parameter's values as
// little-endian float64 in row-major order, back to back; "<prefix>.manifest"
// is text with one line per parameter: "<name> <rows> <cols> <offset>" where
// offset counts doubles from the start of the .bin file.
void save_checkpoint(const std::string& prefix, std::span<Parameter* const> params);
void load_checkpoint(const std::string& prefix, std::span<Parameter* const> params);

}  // namespace amris::nn
