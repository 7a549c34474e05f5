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

#include "docgraph/tensor.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "binary_io.h"
#include "docgraph/error.h"

namespace docgraph::nd {
namespace {

[[noreturn]] void shape_error(const char *op, const Tensor &a, const Tensor &b) {
  std::ostringstream msg;
  msg << op << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
  throw Error(ErrorCode::kShapeMismatch, msg.str());
}

void require_same_shape(const char *op, const Tensor &a, const Tensor &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(op, a, b);
}

Tape &tape_of(Var a) {
  if (a.tape == nullptr) throw Error(ErrorCode::kShapeMismatch, "variable without a tape");
  return *a.tape;
}

Tape &tape_of(Var a, Var b) {
  if (a.tape != b.tape) throw Error(ErrorCode::kShapeMismatch, "variables from different tapes");
  return tape_of(a);
}

// Applies f elementwise; backward multiplies by df evaluated at the input.
template <typename F, typename DF>
Var unary(Var a, const char *op, F f, DF df) {
  Tape &tape = tape_of(a);
  const Tensor &x = a.value();
  Tensor out(x.shape());
  for (size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  int ia = a.id;
  return tape.record(std::move(out), {ia}, [ia, df](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &x = t.value(ia);
    const Tensor &y = t.value(self);
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad_mut(ia);
    for (size_t i = 0; i < x.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
  }, op);
}

}  // namespace

Tensor::Tensor(std::vector<size_t> shape, double fill) : shape_(std::move(shape)) {
  size_t n = 1;
  for (size_t d : shape_) n *= d;
  data_.assign(n, fill);
}

Tensor::Tensor(size_t rows, size_t cols, std::vector<double> data) : shape_{rows, cols}, data_(std::move(data)) {
  if (data_.size() != rows * cols) throw Error(ErrorCode::kShapeMismatch, "tensor data length");
}

Tensor Tensor::column(std::vector<double> values) {
  size_t n = values.size();
  return Tensor(n, 1, std::move(values));
}

Tensor Tensor::row(std::vector<double> values) {
  size_t n = values.size();
  return Tensor(1, n, std::move(values));
}

std::vector<double> Tensor::row_vector(size_t r) const {
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>(r * cols());
  return {begin, begin + static_cast<std::ptrdiff_t>(cols())};
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

const Tensor &Var::value() const { return tape->value(id); }
const Tensor &Var::grad() const { return tape->grad(id); }

Var Tape::constant(Tensor value) { return record(std::move(value), {}, nullptr, "constant"); }

Var Tape::variable(Tensor value) {
  Var v = record(std::move(value), {}, nullptr, "variable");
  nodes_.back().requires_grad = true;
  return v;
}

Var Tape::param(Parameter &p) {
  Var v = record(p.value, {}, nullptr, "param");
  nodes_.back().requires_grad = true;
  nodes_.back().sink = &p;
  return v;
}

Var Tape::record(Tensor value, std::vector<int> parents, BackwardFn backward, const char *op) {
  if (!value.all_finite()) {
    throw Error(ErrorCode::kNonFinite, std::string(op) + " produced a non-finite value");
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = std::any_of(parents.begin(), parents.end(),
                                   [&](int p) { return nodes_[static_cast<size_t>(p)].requires_grad; });
  node.parents = std::move(parents);
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var out) {
  if (out.tape != this) throw Error(ErrorCode::kShapeMismatch, "backward on a foreign variable");
  if (out.value().size() != 1) throw Error(ErrorCode::kShapeMismatch, "backward needs a scalar output");
  for (int i = 0; i <= out.id; ++i) {
    Node &n = nodes_[static_cast<size_t>(i)];
    if (n.requires_grad) n.grad = Tensor(n.value.shape());
  }
  if (!nodes_[static_cast<size_t>(out.id)].requires_grad) return;
  nodes_[static_cast<size_t>(out.id)].grad[0] = 1.0;
  for (int i = out.id; i >= 0; --i) {
    Node &n = nodes_[static_cast<size_t>(i)];
    if (!n.requires_grad) continue;
    if (n.backward) n.backward(*this, i);
    if (!n.grad.all_finite()) throw Error(ErrorCode::kNonFinite, "non-finite gradient");
    if (n.sink != nullptr) {
      if (n.sink->grad.size() != n.grad.size()) n.sink->grad = Tensor(n.value.shape());
      for (size_t k = 0; k < n.grad.size(); ++k) n.sink->grad[k] += n.grad[k];
    }
  }
}

// out(n x m) += x(n x k) * y(k x m). Each output element accumulates its
// products in increasing p, whatever tile it falls in, so a row's result
// does not depend on where the row sits and relabeling nodes permutes
// outputs bitwise. Tiles only keep partial sums in registers.
static void axpy_product(const double *x, const double *y, double *out, size_t n, size_t k, size_t m) {
  constexpr size_t kRows = 4, kCols = 4;
  size_t i = 0;
  for (; i + kRows <= n; i += kRows) {
    size_t j = 0;
    for (; j + kCols <= m; j += kCols) {
      double acc[kRows][kCols];
      for (size_t r = 0; r < kRows; ++r) {
        for (size_t c = 0; c < kCols; ++c) acc[r][c] = out[(i + r) * m + j + c];
      }
      for (size_t p = 0; p < k; ++p) {
        const double *yrow = y + p * m + j;
        for (size_t r = 0; r < kRows; ++r) {
          const double xv = x[(i + r) * k + p];
          for (size_t c = 0; c < kCols; ++c) acc[r][c] += xv * yrow[c];
        }
      }
      for (size_t r = 0; r < kRows; ++r) {
        for (size_t c = 0; c < kCols; ++c) out[(i + r) * m + j + c] = acc[r][c];
      }
    }
    for (size_t r = i; r < i + kRows; ++r) {
      for (size_t p = 0; p < k; ++p) {
        const double xv = x[r * k + p];
        for (size_t c = j; c < m; ++c) out[r * m + c] += xv * y[p * m + c];
      }
    }
  }
  for (; i < n; ++i) {
    for (size_t p = 0; p < k; ++p) {
      const double xv = x[i * k + p];
      for (size_t c = 0; c < m; ++c) out[i * m + c] += xv * y[p * m + c];
    }
  }
}

Var matmul(Var a, Var b) {
  Tape &tape = tape_of(a, b);
  const Tensor &x = a.value();
  const Tensor &y = b.value();
  if (x.cols() != y.rows()) shape_error("matmul", x, y);
  const size_t n = x.rows(), k = x.cols(), m = y.cols();
  Tensor out = Tensor::zeros(n, m);
  axpy_product(x.data().data(), y.data().data(), out.data().data(), n, k, m);
  int ia = a.id, ib = b.id;
  return tape.record(std::move(out), {ia, ib}, [ia, ib, n, k, m](Tape &t, int self) {
    const double *g = t.grad(self).data().data();
    if (t.requires_grad(ia)) {
      // ga += g * y^T, with y^T materialized so the kernel stays row-wise.
      const Tensor &y = t.value(ib);
      std::vector<double> yt(m * k);
      for (size_t p = 0; p < k; ++p) {
        for (size_t j = 0; j < m; ++j) yt[j * k + p] = y[p * m + j];
      }
      axpy_product(g, yt.data(), t.grad_mut(ia).data().data(), n, m, k);
    }
    if (t.requires_grad(ib)) {
      const Tensor &x = t.value(ia);
      std::vector<double> xt(k * n);
      for (size_t i = 0; i < n; ++i) {
        for (size_t p = 0; p < k; ++p) xt[p * n + i] = x[i * k + p];
      }
      axpy_product(xt.data(), g, t.grad_mut(ib).data().data(), k, n, m);
    }
  }, "matmul");
}

Var add(Var a, Var b) {
  Tape &tape = tape_of(a, b);
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  int ia = a.id, ib = b.id;
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    for (int p : {ia, ib}) {
      if (!t.requires_grad(p)) continue;
      Tensor &gp = t.grad_mut(p);
      for (size_t i = 0; i < g.size(); ++i) gp[i] += g[i];
    }
  }, "add");
}

Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var mul(Var a, Var b) {
  Tape &tape = tape_of(a, b);
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  int ia = a.id, ib = b.id;
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    if (t.requires_grad(ia)) {
      Tensor &ga = t.grad_mut(ia);
      const Tensor &y = t.value(ib);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (t.requires_grad(ib)) {
      Tensor &gb = t.grad_mut(ib);
      const Tensor &x = t.value(ia);
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
    }
  }, "mul");
}

Var scale(Var a, double s) {
  return unary(a, "scale", [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Var add_row(Var a, Var bias) {
  Tape &tape = tape_of(a, bias);
  const Tensor &x = a.value();
  const Tensor &b = bias.value();
  if (b.rows() != 1 || b.cols() != x.cols()) shape_error("add_row", x, b);
  Tensor out = x;
  for (size_t r = 0; r < x.rows(); ++r) {
    for (size_t c = 0; c < x.cols(); ++c) out(r, c) += b(0, c);
  }
  int ia = a.id, ib = bias.id;
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    if (t.requires_grad(ia)) {
      Tensor &ga = t.grad_mut(ia);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(ib)) {
      Tensor &gb = t.grad_mut(ib);
      for (size_t r = 0; r < g.rows(); ++r) {
        for (size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      }
    }
  }, "add_row");
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat of nothing");
  Tape &tape = tape_of(parts[0]);
  size_t rows = parts[0].rows(), cols = 0;
  std::vector<int> ids;
  std::vector<size_t> widths;
  for (const Var &p : parts) {
    tape_of(parts[0], p);
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    ids.push_back(p.id);
    widths.push_back(p.cols());
    cols += p.cols();
  }
  Tensor out = Tensor::zeros(rows, cols);
  size_t offset = 0;
  for (const Var &p : parts) {
    const Tensor &v = p.value();
    for (size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data().begin() + static_cast<std::ptrdiff_t>(r * v.cols()), v.cols(),
                  out.data().begin() + static_cast<std::ptrdiff_t>(r * cols + offset));
    }
    offset += v.cols();
  }
  return tape.record(std::move(out), ids, [ids, widths](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    size_t offset = 0;
    for (size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) {
        Tensor &gp = t.grad_mut(ids[k]);
        for (size_t r = 0; r < g.rows(); ++r) {
          for (size_t c = 0; c < widths[k]; ++c) gp(r, c) += g(r, offset + c);
        }
      }
      offset += widths[k];
    }
  }, "concat_cols");
}

Var gather_rows(Var a, std::span<const int> index) {
  Tape &tape = tape_of(a);
  const Tensor &x = a.value();
  const size_t cols = x.cols();
  Tensor out = Tensor::zeros(index.size(), cols);
  for (size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || static_cast<size_t>(index[i]) >= x.rows()) {
      throw Error(ErrorCode::kShapeMismatch, "gather_rows index out of range");
    }
    std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(static_cast<size_t>(index[i]) * cols), cols,
                out.data().begin() + static_cast<std::ptrdiff_t>(i * cols));
  }
  int ia = a.id;
  std::vector<int> idx(index.begin(), index.end());
  return tape.record(std::move(out), {ia}, [ia, idx](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad_mut(ia);
    const size_t cols = g.cols();
    for (size_t i = 0; i < idx.size(); ++i) {
      for (size_t c = 0; c < cols; ++c) ga(static_cast<size_t>(idx[i]), c) += g(i, c);
    }
  }, "gather_rows");
}

Var scatter_sum_rows(Var a, std::span<const int> index, size_t out_rows) {
  Tape &tape = tape_of(a);
  const Tensor &x = a.value();
  if (index.size() != x.rows()) throw Error(ErrorCode::kShapeMismatch, "scatter_sum_rows index length");
  const size_t cols = x.cols();
  Tensor out = Tensor::zeros(out_rows, cols);
  for (size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || static_cast<size_t>(index[i]) >= out_rows) {
      throw Error(ErrorCode::kShapeMismatch, "scatter_sum_rows index out of range");
    }
    for (size_t c = 0; c < cols; ++c) out(static_cast<size_t>(index[i]), c) += x(i, c);
  }
  int ia = a.id;
  std::vector<int> idx(index.begin(), index.end());
  return tape.record(std::move(out), {ia}, [ia, idx](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad_mut(ia);
    const size_t cols = g.cols();
    for (size_t i = 0; i < idx.size(); ++i) {
      for (size_t c = 0; c < cols; ++c) ga(i, c) += g(static_cast<size_t>(idx[i]), c);
    }
  }, "scatter_sum_rows");
}

Var slice_rows(Var a, size_t begin, size_t end) {
  Tape &tape = tape_of(a);
  const Tensor &x = a.value();
  if (begin > end || end > x.rows()) throw Error(ErrorCode::kShapeMismatch, "slice_rows range");
  const size_t cols = x.cols();
  Tensor out = Tensor::zeros(end - begin, cols);
  std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(begin * cols), (end - begin) * cols, out.data().begin());
  int ia = a.id;
  return tape.record(std::move(out), {ia}, [ia, begin](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad_mut(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[begin * g.cols() + i] += g[i];
  }, "slice_rows");
}

Var row_dot(Var a, Var b) {
  Tape &tape = tape_of(a, b);
  require_same_shape("row_dot", a.value(), b.value());
  const Tensor &x = a.value();
  const Tensor &y = b.value();
  Tensor out = Tensor::zeros(x.rows(), 1);
  for (size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (size_t c = 0; c < x.cols(); ++c) s += x(r, c) * y(r, c);
    out[r] = s;
  }
  int ia = a.id, ib = b.id;
  return tape.record(std::move(out), {ia, ib}, [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &x = t.value(ia);
    const Tensor &y = t.value(ib);
    if (t.requires_grad(ia)) {
      Tensor &ga = t.grad_mut(ia);
      for (size_t r = 0; r < x.rows(); ++r) {
        for (size_t c = 0; c < x.cols(); ++c) ga(r, c) += g[r] * y(r, c);
      }
    }
    if (t.requires_grad(ib)) {
      Tensor &gb = t.grad_mut(ib);
      for (size_t r = 0; r < x.rows(); ++r) {
        for (size_t c = 0; c < x.cols(); ++c) gb(r, c) += g[r] * x(r, c);
      }
    }
  }, "row_dot");
}

Var scale_rows(Var a, Var w) {
  Tape &tape = tape_of(a, w);
  const Tensor &x = a.value();
  const Tensor &s = w.value();
  if (s.rows() != x.rows() || s.cols() != 1) shape_error("scale_rows", x, s);
  Tensor out = x;
  for (size_t r = 0; r < x.rows(); ++r) {
    for (size_t c = 0; c < x.cols(); ++c) out(r, c) *= s[r];
  }
  int ia = a.id, iw = w.id;
  return tape.record(std::move(out), {ia, iw}, [ia, iw](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &x = t.value(ia);
    const Tensor &s = t.value(iw);
    if (t.requires_grad(ia)) {
      Tensor &ga = t.grad_mut(ia);
      for (size_t r = 0; r < x.rows(); ++r) {
        for (size_t c = 0; c < x.cols(); ++c) ga(r, c) += g(r, c) * s[r];
      }
    }
    if (t.requires_grad(iw)) {
      Tensor &gw = t.grad_mut(iw);
      for (size_t r = 0; r < x.rows(); ++r) {
        double acc = 0.0;
        for (size_t c = 0; c < x.cols(); ++c) acc += g(r, c) * x(r, c);
        gw[r] += acc;
      }
    }
  }, "scale_rows");
}

Var segment_softmax(Var values, std::span<const size_t> offsets) {
  Tape &tape = tape_of(values);
  const Tensor &x = values.value();
  if (x.cols() != 1) throw Error(ErrorCode::kShapeMismatch, "segment_softmax expects a column");
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "segment offsets do not cover the input");
  }
  for (size_t s = 0; s + 1 < offsets.size(); ++s) {
    if (offsets[s + 1] <= offsets[s]) throw Error(ErrorCode::kEmptySegment, "segment " + std::to_string(s));
  }
  Tensor out(x.shape());
  for (size_t s = 0; s + 1 < offsets.size(); ++s) {
    double mx = x[offsets[s]];
    for (size_t i = offsets[s]; i < offsets[s + 1]; ++i) mx = std::max(mx, x[i]);
    double z = 0.0;
    for (size_t i = offsets[s]; i < offsets[s + 1]; ++i) {
      out[i] = std::exp(x[i] - mx);
      z += out[i];
    }
    for (size_t i = offsets[s]; i < offsets[s + 1]; ++i) out[i] /= z;
  }
  int ia = values.id;
  std::vector<size_t> off(offsets.begin(), offsets.end());
  return tape.record(std::move(out), {ia}, [ia, off](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &y = t.value(self);
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad_mut(ia);
    for (size_t s = 0; s + 1 < off.size(); ++s) {
      double dot = 0.0;
      for (size_t i = off[s]; i < off[s + 1]; ++i) dot += y[i] * g[i];
      for (size_t i = off[s]; i < off[s + 1]; ++i) ga[i] += y[i] * (g[i] - dot);
    }
  }, "segment_softmax");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gelu_value(double x) { return x * normal_cdf(x); }

Var gelu(Var a) {
  return unary(a, "gelu", gelu_value, [](double x, double) {
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return normal_cdf(x) + x * pdf;
  });
}

Var sigmoid(Var a) {
  return unary(a, "sigmoid",
               [](double x) {
                 if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
                 double e = std::exp(x);
                 return e / (1.0 + e);
               },
               [](double, double y) { return y * (1.0 - y); });
}

Var log(Var a) {
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var sum(Var a) {
  Tape &tape = tape_of(a);
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  int ia = a.id;
  return tape.record(Tensor::scalar(s), {ia}, [ia](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    double g = t.grad(self)[0];
    Tensor &ga = t.grad_mut(ia);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  }, "sum");
}

Var mean(Var a) {
  size_t n = a.value().size();
  if (n == 0) throw Error(ErrorCode::kShapeMismatch, "mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var logsumexp(Var a) {
  Tape &tape = tape_of(a);
  const Tensor &x = a.value();
  if (x.size() == 0) throw Error(ErrorCode::kShapeMismatch, "logsumexp of empty tensor");
  double mx = *std::max_element(x.data().begin(), x.data().end());
  double z = 0.0;
  for (double v : x.data()) z += std::exp(v - mx);
  int ia = a.id;
  return tape.record(Tensor::scalar(mx + std::log(z)), {ia}, [ia](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &x = t.value(ia);
    double lse = t.value(self)[0];
    double g = t.grad(self)[0];
    Tensor &ga = t.grad_mut(ia);
    for (size_t i = 0; i < x.size(); ++i) ga[i] += g * std::exp(x[i] - lse);
  }, "logsumexp");
}

Var pick(Var a, size_t index) {
  Tape &tape = tape_of(a);
  if (index >= a.value().size()) throw Error(ErrorCode::kShapeMismatch, "pick index out of range");
  int ia = a.id;
  return tape.record(Tensor::scalar(a.value()[index]), {ia}, [ia, index](Tape &t, int self) {
    if (t.requires_grad(ia)) t.grad_mut(ia)[index] += t.grad(self)[0];
  }, "pick");
}

Var binary_cross_entropy(Var probs, std::span<const double> labels, double clamp) {
  Tape &tape = tape_of(probs);
  const Tensor &p = probs.value();
  if (p.size() != labels.size() || p.size() == 0) throw Error(ErrorCode::kShapeMismatch, "bce label count");
  const double n = static_cast<double>(p.size());
  double loss = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double q = std::clamp(p[i], clamp, 1.0 - clamp);
    loss -= labels[i] * std::log(q) + (1.0 - labels[i]) * std::log(1.0 - q);
  }
  int ia = probs.id;
  std::vector<double> r(labels.begin(), labels.end());
  return tape.record(Tensor::scalar(loss / n), {ia}, [ia, r, clamp, n](Tape &t, int self) {
    if (!t.requires_grad(ia)) return;
    const Tensor &p = t.value(ia);
    double g = t.grad(self)[0];
    Tensor &ga = t.grad_mut(ia);
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] < clamp || p[i] > 1.0 - clamp) continue;
      ga[i] += g * (-(r[i] / p[i]) + (1.0 - r[i]) / (1.0 - p[i])) / n;
    }
  }, "binary_cross_entropy");
}

GradCheckReport grad_check(const std::function<Var(Tape &)> &f, std::span<Parameter *const> params, double eps,
                           size_t max_coords, uint64_t seed) {
  for (Parameter *p : params) p->grad = Tensor(p->value.shape());
  {
    Tape tape;
    Var out = f(tape);
    tape.backward(out);
  }
  auto evaluate = [&] {
    Tape tape;
    return f(tape).item();
  };
  std::mt19937_64 rng(seed);
  GradCheckReport report;
  for (Parameter *p : params) {
    std::vector<size_t> coords(p->value.size());
    for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (max_coords > 0 && coords.size() > max_coords) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords);
    }
    for (size_t i : coords) {
      double original = p->value[i];
      p->value[i] = original + eps;
      double up = evaluate();
      p->value[i] = original - eps;
      double down = evaluate();
      p->value[i] = original;
      double numeric = (up - down) / (2.0 * eps);
      double err = std::abs(p->grad[i] - numeric) / std::max(1.0, std::abs(numeric));
      ++report.coordinates;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

void write_checkpoint(std::ostream &out, std::span<const Parameter *const> params) {
  out.write("DGCK", 4);
  binary::put_u32(out, 1);
  binary::put_u32(out, static_cast<uint32_t>(params.size()));
  for (const Parameter *p : params) {
    binary::put_string(out, p->name);
    binary::put_u32(out, static_cast<uint32_t>(p->value.rank()));
    for (size_t d : p->value.shape()) binary::put_u32(out, static_cast<uint32_t>(d));
    for (double x : p->value.data()) binary::put_f64(out, x);
  }
}

std::vector<Parameter> read_checkpoint(std::istream &in) {
  char magic[4];
  binary::read_exact(in, magic, 4);
  if (std::string(magic, 4) != "DGCK") throw Error(ErrorCode::kFormat, "not a checkpoint (bad magic)");
  uint32_t version = binary::get_u32(in);
  if (version != 1) throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
  uint32_t count = binary::get_u32(in);
  std::vector<Parameter> params;
  for (uint32_t k = 0; k < count; ++k) {
    std::string name = binary::get_string(in);
    uint32_t rank = binary::get_u32(in);
    if (rank > 8) throw Error(ErrorCode::kFormat, "checkpoint tensor rank");
    std::vector<size_t> shape;
    for (uint32_t d = 0; d < rank; ++d) shape.push_back(binary::get_u32(in));
    Tensor value(shape);
    for (size_t i = 0; i < value.size(); ++i) value[i] = binary::get_f64(in);
    params.emplace_back(std::move(name), std::move(value));
  }
  return params;
}

}  // namespace docgraph::nd
