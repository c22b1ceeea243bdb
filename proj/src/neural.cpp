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

#include "amris/neural.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace amris::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

Mat uniform_init(int rows, int cols, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Var Graph::push(Mat value, bool needs_grad, std::function<void(Graph&, const Mat&)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Graph::accumulate(Var v, const Mat& g) {
  Node& n = nodes_[v.id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

Var Graph::constant(Mat v) { return push(std::move(v), false, nullptr); }

Var Graph::param(Parameter& p) {
  Var v = push(p.value, true, nullptr);
  nodes_[v.id].param = &p;
  return v;
}

Var Graph::matmul(Var a, Var b) {
  require(value(a).cols() == value(b).rows(), "matmul: inner dimensions differ");
  return push(value(a) * value(b), needs(a) || needs(b), [a, b](Graph& g, const Mat& d) {
    if (g.needs(a)) g.accumulate(a, d * g.value(b).transpose());
    if (g.needs(b)) g.accumulate(b, g.value(a).transpose() * d);
  });
}

Var Graph::add(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "add: shape mismatch");
  return push(value(a) + value(b), needs(a) || needs(b), [a, b](Graph& g, const Mat& d) {
    g.accumulate(a, d);
    g.accumulate(b, d);
  });
}

Var Graph::sub(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "sub: shape mismatch");
  return push(value(a) - value(b), needs(a) || needs(b), [a, b](Graph& g, const Mat& d) {
    g.accumulate(a, d);
    g.accumulate(b, -d);
  });
}

Var Graph::mul(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "mul: shape mismatch");
  return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b),
              [a, b](Graph& g, const Mat& d) {
                if (g.needs(a)) g.accumulate(a, d.cwiseProduct(g.value(b)));
                if (g.needs(b)) g.accumulate(b, d.cwiseProduct(g.value(a)));
              });
}

Var Graph::add_row(Var a, Var row) {
  require(value(row).rows() == 1 && value(row).cols() == value(a).cols(),
          "add_row: row shape mismatch");
  Mat out = value(a).rowwise() + value(row).row(0);
  return push(std::move(out), needs(a) || needs(row), [a, row](Graph& g, const Mat& d) {
    g.accumulate(a, d);
    if (g.needs(row)) g.accumulate(row, d.colwise().sum());
  });
}

Var Graph::mul_row(Var a, Var row) {
  require(value(row).rows() == 1 && value(row).cols() == value(a).cols(),
          "mul_row: row shape mismatch");
  Mat out = value(a).array().rowwise() * value(row).row(0).array();
  return push(std::move(out), needs(a) || needs(row), [a, row](Graph& g, const Mat& d) {
    if (g.needs(a)) g.accumulate(a, (d.array().rowwise() * g.value(row).row(0).array()).matrix());
    if (g.needs(row)) g.accumulate(row, d.cwiseProduct(g.value(a)).colwise().sum());
  });
}

Var Graph::scale(Var a, double s) {
  return push(value(a) * s, needs(a), [a, s](Graph& g, const Mat& d) { g.accumulate(a, d * s); });
}

Var Graph::add_scalar(Var a, double s) {
  Mat out = value(a).array() + s;
  return push(std::move(out), needs(a), [a](Graph& g, const Mat& d) { g.accumulate(a, d); });
}

Var Graph::relu(Var a) {
  Mat out = value(a).cwiseMax(0.0);
  return push(std::move(out), needs(a), [a](Graph& g, const Mat& d) {
    g.accumulate(a, (g.value(a).array() > 0.0).cast<double>().matrix().cwiseProduct(d));
  });
}

Var Graph::tanh(Var a) {
  Mat out = value(a).array().tanh().matrix();
  Var v = push(std::move(out), needs(a), nullptr);
  if (needs(a))
    nodes_[v.id].back = [a, v](Graph& g, const Mat& d) {
      const Mat& y = g.value(v);
      g.accumulate(a, d.cwiseProduct((1.0 - y.array().square()).matrix()));
    };
  return v;
}

Var Graph::exp(Var a) {
  Mat out = value(a).array().exp().matrix();
  Var v = push(std::move(out), needs(a), nullptr);
  if (needs(a))
    nodes_[v.id].back = [a, v](Graph& g, const Mat& d) {
      g.accumulate(a, d.cwiseProduct(g.value(v)));
    };
  return v;
}

Var Graph::square(Var a) {
  Mat out = value(a).array().square().matrix();
  return push(std::move(out), needs(a), [a](Graph& g, const Mat& d) {
    g.accumulate(a, 2.0 * d.cwiseProduct(g.value(a)));
  });
}

Var Graph::softmax_rows(Var a) {
  const Mat& x = value(a);
  Mat y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mx = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - mx).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  Var v = push(std::move(y), needs(a), nullptr);
  if (needs(a))
    nodes_[v.id].back = [a, v](Graph& g, const Mat& d) {
      const Mat& s = g.value(v);
      const Eigen::VectorXd dot = d.cwiseProduct(s).rowwise().sum();
      Mat dx = s.cwiseProduct(d.colwise() - dot);
      g.accumulate(a, dx);
    };
  return v;
}

Var Graph::transpose(Var a) {
  Mat out = value(a).transpose();
  return push(std::move(out), needs(a),
              [a](Graph& g, const Mat& d) { g.accumulate(a, d.transpose()); });
}

Var Graph::concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool ng = false;
  for (Var p : parts) {
    require(value(p).rows() == rows, "concat_cols: row mismatch");
    cols += value(p).cols();
    ng = ng || needs(p);
  }
  Mat out(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    out.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return push(std::move(out), ng, [ps](Graph& g, const Mat& d) {
    Eigen::Index c0 = 0;
    for (Var p : ps) {
      const Eigen::Index w = g.value(p).cols();
      if (g.needs(p)) g.accumulate(p, d.middleCols(c0, w));
      c0 += w;
    }
  });
}

Var Graph::concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  bool ng = false;
  for (Var p : parts) {
    require(value(p).cols() == cols, "concat_rows: column mismatch");
    rows += value(p).rows();
    ng = ng || needs(p);
  }
  Mat out(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    out.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return push(std::move(out), ng, [ps](Graph& g, const Mat& d) {
    Eigen::Index r0 = 0;
    for (Var p : ps) {
      const Eigen::Index h = g.value(p).rows();
      if (g.needs(p)) g.accumulate(p, d.middleRows(r0, h));
      r0 += h;
    }
  });
}

Var Graph::flatten(Var a) {
  const Mat& x = value(a);
  const Eigen::Index rows = x.rows();
  const Eigen::Index cols = x.cols();
  Mat out(1, rows * cols);
  for (Eigen::Index r = 0; r < rows; ++r) out.block(0, r * cols, 1, cols) = x.row(r);
  return push(std::move(out), needs(a), [a, rows, cols](Graph& g, const Mat& d) {
    Mat dx(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) dx.row(r) = d.block(0, r * cols, 1, cols);
    g.accumulate(a, dx);
  });
}

Var Graph::row_sum(Var a) {
  Mat out = value(a).rowwise().sum();
  const Eigen::Index cols = value(a).cols();
  return push(std::move(out), needs(a), [a, cols](Graph& g, const Mat& d) {
    g.accumulate(a, d.replicate(1, cols));
  });
}

Var Graph::sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = value(a).sum();
  const Eigen::Index rows = value(a).rows();
  const Eigen::Index cols = value(a).cols();
  return push(std::move(out), needs(a), [a, rows, cols](Graph& g, const Mat& d) {
    g.accumulate(a, Mat::Constant(rows, cols, d(0, 0)));
  });
}

Var Graph::mean(Var a) {
  const double n = static_cast<double>(value(a).size());
  require(n > 0, "mean: empty input");
  return scale(sum(a), 1.0 / n);
}

Var Graph::clip(Var a, double lo, double hi) {
  Mat out = value(a).cwiseMax(lo).cwiseMin(hi);
  return push(std::move(out), needs(a), [a, lo, hi](Graph& g, const Mat& d) {
    const Mat& x = g.value(a);
    Mat pass = ((x.array() >= lo) && (x.array() <= hi)).cast<double>().matrix();
    g.accumulate(a, d.cwiseProduct(pass));
  });
}

Var Graph::minimum(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
          "minimum: shape mismatch");
  Mat out = value(a).cwiseMin(value(b));
  return push(std::move(out), needs(a) || needs(b), [a, b](Graph& g, const Mat& d) {
    Mat pick_a = (g.value(a).array() <= g.value(b).array()).cast<double>().matrix();
    if (g.needs(a)) g.accumulate(a, d.cwiseProduct(pick_a));
    if (g.needs(b)) g.accumulate(b, d.cwiseProduct((1.0 - pick_a.array()).matrix()));
  });
}

void Graph::backward(Var root) {
  require(value(root).rows() == 1 && value(root).cols() == 1, "backward: root must be scalar");
  if (!needs(root)) return;
  nodes_[root.id].grad = Mat::Ones(1, 1);
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.back) {
      const Mat d = n.grad;
      n.back(*this, d);
    }
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

// ---------------------------------------------------------------------------
// Layers

Mlp::Mlp(std::span<const int> dims, Rng& rng, const std::string& name)
    : dims_(dims.begin(), dims.end()) {
  require(dims_.size() >= 2, "Mlp needs at least input and output dims");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    weights.emplace_back(name + ".w" + std::to_string(l),
                         uniform_init(dims_[l], dims_[l + 1], bound, rng));
    biases.emplace_back(name + ".b" + std::to_string(l), uniform_init(1, dims_[l + 1], bound, rng));
  }
}

Var Mlp::forward(Graph& g, Var x) {
  require(g.value(x).cols() == input_dim(), "Mlp: input width mismatch");
  Var h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = g.add_row(g.matmul(h, g.param(weights[l])), g.param(biases[l]));
    if (l + 1 < weights.size()) h = g.relu(h);
  }
  return h;
}

Mat Mlp::forward(const Mat& x) {
  require(x.cols() == input_dim(), "Mlp: input width mismatch");
  Mat h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = (h * weights[l].value).rowwise() + biases[l].value.row(0);
    if (l + 1 < weights.size()) h = h.cwiseMax(0.0);
  }
  return h;
}

ParamRefs Mlp::parameters() {
  ParamRefs out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back(&weights[l]);
    out.push_back(&biases[l]);
  }
  return out;
}

AttentionParams AttentionParams::init(int input_dim, int d_k, int num_heads, int output_dim,
                                      Rng& rng) {
  AttentionParams a;
  const double b_in = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int h = 0; h < num_heads; ++h) {
    const std::string s = std::to_string(h);
    a.w_q.emplace_back("attn.wq" + s, uniform_init(input_dim, d_k, b_in, rng));
    a.w_k.emplace_back("attn.wk" + s, uniform_init(input_dim, d_k, b_in, rng));
    a.w_v.emplace_back("attn.wv" + s, uniform_init(input_dim, d_k, b_in, rng));
  }
  const double b_out = 1.0 / std::sqrt(static_cast<double>(num_heads * d_k));
  a.w_o = Parameter("attn.wo", uniform_init(num_heads * d_k, output_dim, b_out, rng));
  return a;
}

ParamRefs AttentionParams::parameters() {
  ParamRefs out;
  for (int h = 0; h < num_heads(); ++h) {
    out.push_back(&w_q[h]);
    out.push_back(&w_k[h]);
    out.push_back(&w_v[h]);
  }
  out.push_back(&w_o);
  return out;
}

Var attention_head(Graph& g, Var w_q, Var w_k, Var w_v, Var tokens) {
  require(g.value(tokens).cols() == g.value(w_q).rows(), "attention: token width mismatch");
  const double d_k = static_cast<double>(g.value(w_k).cols());
  Var q = g.matmul(tokens, w_q);
  Var k = g.matmul(tokens, w_k);
  Var v = g.matmul(tokens, w_v);
  Var scores = g.scale(g.matmul(q, g.transpose(k)), 1.0 / std::sqrt(d_k));
  return g.matmul(g.softmax_rows(scores), v);
}

Var multi_head(Graph& g, AttentionParams& attn, Var tokens) {
  std::vector<Var> heads;
  for (int h = 0; h < attn.num_heads(); ++h)
    heads.push_back(attention_head(g, g.param(attn.w_q[h]), g.param(attn.w_k[h]),
                                   g.param(attn.w_v[h]), tokens));
  return g.matmul(g.concat_cols(heads), g.param(attn.w_o));
}

StateEncoder::StateEncoder(int num_tokens, int token_dim, bool use_attention, int d_k,
                           int num_heads, int output_dim, double dropout, Rng& rng)
    : use_attention_(use_attention), num_tokens_(num_tokens), dropout_(dropout) {
  if (use_attention_) {
    attention = AttentionParams::init(token_dim, d_k, num_heads, output_dim, rng);
    output_dim_ = num_tokens * output_dim;
  } else {
    output_dim_ = num_tokens * token_dim;
  }
}

Var StateEncoder::encode(Graph& g, const Mat& tokens, bool training, Rng* dropout_rng) {
  require(tokens.rows() == num_tokens_, "StateEncoder: token count mismatch");
  Var x = g.constant(tokens);
  if (!use_attention_) return g.flatten(x);
  Var out = g.flatten(multi_head(g, attention, x));
  if (training && dropout_ > 0.0 && dropout_rng != nullptr) {
    Mat mask(1, g.value(out).cols());
    const double keep = 1.0 - dropout_;
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      mask(0, c) = uniform01(*dropout_rng) < keep ? 1.0 / keep : 0.0;
    out = g.mul(out, g.constant(std::move(mask)));
  }
  return out;
}

ParamRefs StateEncoder::parameters() {
  if (!use_attention_) return {};
  return attention.parameters();
}

// ---------------------------------------------------------------------------
// Optimisation helpers

void sgd_step(std::span<Parameter* const> params, double lr) {
  for (Parameter* p : params) p->value -= lr * p->grad;
}

double clip_grad_norm(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (Parameter* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0)
    for (Parameter* p : params) p->grad *= max_norm / norm;
  return norm;
}

void zero_grad(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

void soft_update(std::span<Parameter* const> current, std::span<Parameter* const> target,
                 double tau) {
  require(current.size() == target.size(), "soft_update: parameter count mismatch");
  for (std::size_t i = 0; i < current.size(); ++i) {
    require(current[i]->value.rows() == target[i]->value.rows() &&
                current[i]->value.cols() == target[i]->value.cols(),
            "soft_update: shape mismatch");
    target[i]->value = tau * current[i]->value + (1.0 - tau) * target[i]->value;
  }
}

void save_checkpoint(const std::string& prefix, std::span<Parameter* const> params) {
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  std::ofstream man(prefix + ".manifest");
  if (!bin || !man) throw std::runtime_error("cannot write checkpoint " + prefix);
  long long offset = 0;
  for (const Parameter* p : params) {
    man << p->name << ' ' << p->value.rows() << ' ' << p->value.cols() << ' ' << offset << '\n';
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        const double v = p->value(r, c);
        bin.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    offset += p->value.size();
  }
}

void load_checkpoint(const std::string& prefix, std::span<Parameter* const> params) {
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  std::ifstream man(prefix + ".manifest");
  if (!bin || !man) throw std::runtime_error("cannot read checkpoint " + prefix);
  std::string line;
  for (Parameter* p : params) {
    if (!std::getline(man, line)) throw std::runtime_error("checkpoint manifest too short");
    std::istringstream is(line);
    std::string name;
    long long rows = 0, cols = 0, offset = 0;
    is >> name >> rows >> cols >> offset;
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols())
      throw std::runtime_error("checkpoint entry mismatch for " + p->name);
    bin.seekg(offset * static_cast<long long>(sizeof(double)));
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v = 0.0;
        bin.read(reinterpret_cast<char*>(&v), sizeof(double));
        p->value(r, c) = v;
      }
    if (!bin) throw std::runtime_error("checkpoint data truncated for " + p->name);
  }
}

}  // namespace amris::nn
