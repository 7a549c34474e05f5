// Copyright 2026 The docgraph Authors.
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

#ifndef DOCGRAPH_TENSOR_H_
#define DOCGRAPH_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

// Dense double-precision tensors with a reverse-mode tape. Every op here
// works on rank-2 tensors (vectors are 1 x n or n x 1) and checks its
// output for NaN/Inf.
namespace docgraph::nd {

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, double fill = 0.0);
  Tensor(size_t rows, size_t cols, std::vector<double> data);

  static Tensor zeros(size_t rows, size_t cols) { return Tensor({rows, cols}); }
  static Tensor scalar(double v) { return Tensor(1, 1, {v}); }
  static Tensor column(std::vector<double> values);
  static Tensor row(std::vector<double> values);

  const std::vector<size_t> &shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  double &operator()(size_t r, size_t c) { return data_[r * cols() + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols() + c]; }
  double &operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double> row_vector(size_t r) const;

  void fill(double v);
  bool all_finite() const;
  bool operator==(const Tensor &) const = default;

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
  void zero_grad() { grad.fill(0.0); }
};

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape *tape = nullptr;
  int id = -1;

  const Tensor &value() const;
  const Tensor &grad() const;
  size_t rows() const { return value().rows(); }
  size_t cols() const { return value().cols(); }
  double item() const { return value()[0]; }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape &, int self)>;

  Var constant(Tensor value);
  Var variable(Tensor value);
  // After backward() the parameter's grad accumulates this leaf's gradient.
  Var param(Parameter &p);

  // Seeds d(out)/d(out) = 1 and walks the tape in reverse recording order.
  void backward(Var out);

  const Tensor &value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor &grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
  Tensor &grad_mut(int id) { return nodes_[static_cast<size_t>(id)].grad; }
  bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  size_t size() const { return nodes_.size(); }

  Var record(Tensor value, std::vector<int> parents, BackwardFn backward, const char *op);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    BackwardFn backward;
    bool requires_grad = false;
    Parameter *sink = nullptr;
  };
  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
// a (m x n) + bias (1 x n) broadcast over rows.
Var add_row(Var a, Var bias);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(Var a, std::span<const int> index);
// out[index[i]] += a[i] in increasing i; rows never hit stay zero.
Var scatter_sum_rows(Var a, std::span<const int> index, size_t out_rows);
Var slice_rows(Var a, size_t begin, size_t end);
// Row-wise inner product: (m x n, m x n) -> m x 1.
Var row_dot(Var a, Var b);
// Multiplies row i of a by w[i] (w is m x 1).
Var scale_rows(Var a, Var w);
// Softmax of an m x 1 column within segments [offsets[s], offsets[s+1]).
Var segment_softmax(Var values, std::span<const size_t> offsets);
Var gelu(Var a);
Var sigmoid(Var a);
Var log(Var a);
Var sum(Var a);
Var mean(Var a);
Var logsumexp(Var a);
Var pick(Var a, size_t index);
// Mean binary cross entropy of probabilities against {0,1} labels, with
// probabilities clamped to [clamp, 1 - clamp].
Var binary_cross_entropy(Var probs, std::span<const double> labels, double clamp = 1e-12);

double gelu_value(double x);
double normal_cdf(double x);

// Central-difference check of the tape gradient of a scalar function.
// Returns max |analytic - numeric| / max(1, |numeric|) over the checked
// coordinates. `max_coords` limits the coordinates per parameter (0: all),
// chosen with a generator seeded by `seed`.
struct GradCheckReport {
  double max_relative_error = 0.0;
  size_t coordinates = 0;
  std::string worst;
};

GradCheckReport grad_check(const std::function<Var(Tape &)> &f, std::span<Parameter *const> params,
                           double eps = 1e-5, size_t max_coords = 0, uint64_t seed = 0);

// Checkpoint: magic "DGCK", u32 version, u32 tensor count, then per tensor
// a u32-prefixed name, u32 rank, u32 dims, little-endian f64 data.
void write_checkpoint(std::ostream &out, std::span<const Parameter *const> params);
std::vector<Parameter> read_checkpoint(std::istream &in);

}  // namespace docgraph::nd

#endif  // DOCGRAPH_TENSOR_H_
