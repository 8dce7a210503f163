// Copyright 2026 The trajgraph Authors
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

#include "trajgraph/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace trajgraph
{

namespace
{
std::atomic<std::size_t> g_live_bytes{0};
std::atomic<std::size_t> g_peak_bytes{0};

void note_alloc(std::size_t bytes)
{
  const std::size_t now = g_live_bytes.fetch_add(bytes) + bytes;
  std::size_t peak = g_peak_bytes.load();
  while (now > peak && !g_peak_bytes.compare_exchange_weak(peak, now)) {
  }
}

void note_free(std::size_t bytes) { g_live_bytes.fetch_sub(bytes); }

thread_local Tape * t_active_tape = nullptr;

using NodePtr = std::shared_ptr<detail::TensorNode>;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

Tensor make_result(
  Shape shape, std::vector<double> values, std::vector<NodePtr> inputs,
  Tape::BackwardFn backward)
{
  Tape * tape = Tape::active();
  const bool track =
    tape != nullptr &&
    std::any_of(inputs.begin(), inputs.end(), [](const NodePtr & n) { return n->requires_grad; });
  auto node = std::make_shared<detail::TensorNode>(std::move(shape), std::move(values), track, false);
  if (track) {
    tape->record(std::move(inputs), node, std::move(backward));
  }
  return Tensor(node);
}

void require_same_shape(const Tensor & a, const Tensor & b, const char * op)
{
  if (a.shape() != b.shape()) {
    throw DimensionError(
      std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
      shape_to_string(b.shape()));
  }
}

struct AxisSplit
{
  std::size_t outer{1};
  std::size_t extent{1};
  std::size_t inner{1};
};

AxisSplit split_axis(const Shape & shape, std::size_t axis, const char * op)
{
  if (axis >= shape.size()) {
    throw DimensionError(
      std::string(op) + ": axis " + std::to_string(axis) + " out of range for shape " +
      shape_to_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Shape drop_axis(const Shape & shape, std::size_t axis)
{
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out.push_back(shape[i]);
  }
  return out;
}

template <typename Forward, typename Derivative>
Tensor unary(const Tensor & a, Forward f, Derivative df)
{
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  auto * an = a.node().get();
  return make_result(a.shape(), std::move(out), {a.node()}, [an, df](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t i = 0; i < o.grad.size(); ++i) {
      an->grad[i] += o.grad[i] * df(an->value[i], o.value[i]);
    }
  });
}

enum class BinaryKind { kAdd, kSub, kMul };

Tensor binary(const Tensor & a, const Tensor & b, BinaryKind kind, const char * name)
{
  const bool a_scalar = a.size() == 1 && b.size() != 1;
  const bool b_scalar = b.size() == 1 && a.size() != 1;
  if (!a_scalar && !b_scalar) require_same_shape(a, b, name);
  const Shape shape = a_scalar ? b.shape() : a.shape();
  const std::size_t n = shape_numel(shape);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = av[a_scalar ? 0 : i];
    const double y = bv[b_scalar ? 0 : i];
    switch (kind) {
      case BinaryKind::kAdd: out[i] = x + y; break;
      case BinaryKind::kSub: out[i] = x - y; break;
      case BinaryKind::kMul: out[i] = x * y; break;
    }
  }
  auto * an = a.node().get();
  auto * bn = b.node().get();
  return make_result(
    shape, std::move(out), {a.node(), b.node()},
    [an, bn, a_scalar, b_scalar, kind](detail::TensorNode & o) {
      const std::size_t n = o.grad.size();
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          const double g = kind == BinaryKind::kMul ? o.grad[i] * bn->value[b_scalar ? 0 : i]
                                                    : o.grad[i];
          an->grad[a_scalar ? 0 : i] += g;
        }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          double g = o.grad[i];
          if (kind == BinaryKind::kSub) g = -g;
          if (kind == BinaryKind::kMul) g *= an->value[a_scalar ? 0 : i];
          bn->grad[b_scalar ? 0 : i] += g;
        }
      }
    });
}

double stable_sigmoid(double x)
{
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---- shape helpers -----------------------------------------------------------

std::string shape_to_string(const Shape & shape)
{
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape & shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

// ---- node ----------------------------------------------------------------------

namespace detail
{
TensorNode::TensorNode(Shape s, std::vector<double> v, bool rg, bool param)
: shape(std::move(s)), value(std::move(v)), requires_grad(rg), is_parameter(param)
{
  if (shape_numel(shape) != value.size()) {
    throw DimensionError(
      "tensor: shape " + shape_to_string(shape) + " does not hold " +
      std::to_string(value.size()) + " values");
  }
  note_alloc(value.size() * sizeof(double));
}

TensorNode::~TensorNode() { note_free((value.size() + grad.size()) * sizeof(double)); }

void TensorNode::ensure_grad()
{
  if (grad.size() != value.size()) {
    note_alloc((value.size() - grad.size()) * sizeof(double));
    grad.assign(value.size(), 0.0);
  }
}
}  // namespace detail

// ---- Tensor --------------------------------------------------------------------

Tensor::Tensor() : Tensor(std::make_shared<detail::TensorNode>(Shape{}, std::vector<double>{0.0}, false, false)) {}

Tensor::Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}

Tensor Tensor::constant(Shape shape, std::vector<double> values)
{
  return Tensor(std::make_shared<detail::TensorNode>(std::move(shape), std::move(values), false, false));
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value)
{
  const std::size_t n = shape_numel(shape);
  return constant(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return constant(Shape{}, {value}); }

Tensor Tensor::row(std::span<const double> values)
{
  return constant(Shape{1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::row(std::initializer_list<double> values)
{
  return row(std::span<const double>(values.begin(), values.size()));
}

Tensor Tensor::parameter(Shape shape, std::vector<double> values)
{
  return Tensor(std::make_shared<detail::TensorNode>(std::move(shape), std::move(values), true, true));
}

const Shape & Tensor::shape() const { return node_->shape; }
std::size_t Tensor::rank() const { return node_->shape.size(); }

std::size_t Tensor::dim(std::size_t axis) const
{
  if (axis >= rank()) {
    throw DimensionError("dim: axis " + std::to_string(axis) + " out of range for " + shape_to_string(shape()));
  }
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->value.size(); }
std::span<const double> Tensor::values() const { return node_->value; }
std::span<double> Tensor::mutable_values() { return node_->value; }

std::span<const double> Tensor::grad() const
{
  node_->ensure_grad();
  return node_->grad;
}

std::span<double> Tensor::mutable_grad()
{
  node_->ensure_grad();
  return node_->grad;
}

void Tensor::zero_grad()
{
  node_->ensure_grad();
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

double Tensor::item() const
{
  if (size() != 1) {
    throw DimensionError("item: tensor of shape " + shape_to_string(shape()) + " is not a scalar");
  }
  return node_->value[0];
}

double Tensor::operator[](std::size_t i) const { return node_->value.at(i); }

double Tensor::at(std::size_t r, std::size_t c) const
{
  if (rank() != 2) throw DimensionError("at: expected rank-2 tensor, got " + shape_to_string(shape()));
  return node_->value.at(r * node_->shape[1] + c);
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::is_parameter() const { return node_->is_parameter; }
std::optional<std::size_t> Tensor::tape_id() const { return node_->tape_id; }

Tensor Tensor::detach() const { return constant(shape(), node_->value); }

bool Tensor::same_storage(const Tensor & other) const { return node_ == other.node_; }

// ---- Tape ----------------------------------------------------------------------

Tape * Tape::active() { return t_active_tape; }

std::size_t Tape::record(
  std::vector<NodePtr> inputs, const NodePtr & output, BackwardFn backward)
{
  const std::size_t id = records_.size();
  output->tape_id = id;
  output->tape = this;
  records_.push_back(Record{std::move(inputs), output, std::move(backward)});
  return id;
}

void Tape::backward(const Tensor & loss)
{
  if (loss.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + shape_to_string(loss.shape()));
  }
  const auto & ln = loss.node();
  if (!ln->requires_grad) return;
  if (!ln->is_parameter && ln->tape != this) {
    throw ContractError("backward: loss was not recorded on this tape");
  }
  for (auto & r : records_) {
    r.output->ensure_grad();
    std::fill(r.output->grad.begin(), r.output->grad.end(), 0.0);
  }
  if (ln->is_parameter) {
    ln->ensure_grad();
    ln->grad[0] += 1.0;
    return;
  }
  ln->grad[0] = 1.0;
  for (std::size_t i = records_.size(); i-- > 0;) {
    auto & r = records_[i];
    r.backward(*r.output);
  }
}

void Tape::clear() { records_.clear(); }

TapeScope::TapeScope(Tape & tape) : previous_(t_active_tape) { t_active_tape = &tape; }
TapeScope::~TapeScope() { t_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(t_active_tape) { t_active_tape = nullptr; }
NoGradScope::~NoGradScope() { t_active_tape = previous_; }

void backward(const Tensor & loss)
{
  const auto & ln = loss.node();
  if (ln->tape == nullptr) {
    if (loss.size() != 1) {
      throw ContractError("backward: loss must be a scalar, got shape " + shape_to_string(loss.shape()));
    }
    if (!ln->is_parameter) throw ContractError("backward: loss is not on any tape");
    ln->ensure_grad();
    ln->grad[0] += 1.0;
    return;
  }
  const_cast<Tape *>(ln->tape)->backward(loss);
}

// ---- linear algebra ------------------------------------------------------------

Tensor matmul(const Tensor & a, const Tensor & b)
{
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError(
      "matmul: incompatible shapes " + shape_to_string(a.shape()) + " and " +
      shape_to_string(b.shape()));
  }
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  std::vector<double> out(static_cast<std::size_t>(m * n));
  Map(out.data(), m, n).noalias() = MapC(a.values().data(), m, k) * MapC(b.values().data(), k, n);
  auto * an = a.node().get();
  auto * bn = b.node().get();
  return make_result(
    Shape{a.dim(0), b.dim(1)}, std::move(out), {a.node(), b.node()},
    [an, bn, m, k, n](detail::TensorNode & o) {
      MapC dc(o.grad.data(), m, n);
      if (an->requires_grad) {
        an->ensure_grad();
        Map(an->grad.data(), m, k).noalias() += dc * MapC(bn->value.data(), k, n).transpose();
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        Map(bn->grad.data(), k, n).noalias() += MapC(an->value.data(), m, k).transpose() * dc;
      }
    });
}

// ---- elementwise ---------------------------------------------------------------

Tensor add(const Tensor & a, const Tensor & b) { return binary(a, b, BinaryKind::kAdd, "add"); }
Tensor sub(const Tensor & a, const Tensor & b) { return binary(a, b, BinaryKind::kSub, "sub"); }
Tensor mul(const Tensor & a, const Tensor & b) { return binary(a, b, BinaryKind::kMul, "mul"); }
Tensor operator+(const Tensor & a, const Tensor & b) { return add(a, b); }
Tensor operator-(const Tensor & a, const Tensor & b) { return sub(a, b); }
Tensor operator*(const Tensor & a, const Tensor & b) { return mul(a, b); }

Tensor scale(const Tensor & a, double factor)
{
  return unary(a, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor & a, double offset)
{
  return unary(a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor & a) { return scale(a, -1.0); }

Tensor square(const Tensor & a)
{
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sigmoid(const Tensor & a)
{
  return unary(a, stable_sigmoid, [](double, double s) { return s * (1.0 - s); });
}

Tensor tanh(const Tensor & a)
{
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double t) { return 1.0 - t * t; });
}

Tensor exp(const Tensor & a)
{
  return unary(a, [](double x) { return std::exp(x); }, [](double, double e) { return e; });
}

Tensor log(const Tensor & a)
{
  for (double v : a.values()) {
    if (!(v > 0.0)) {
      throw DomainError("log: non-positive argument " + std::to_string(v));
    }
  }
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp(const Tensor & a, double lo, double hi)
{
  return unary(
    a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
    [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor elementwise(Elementwise op, std::span<const Tensor> args)
{
  const std::size_t arity = (op == Elementwise::kAdd || op == Elementwise::kMul) ? 2 : 1;
  if (args.size() != arity) {
    throw ContractError(
      "elementwise: expected " + std::to_string(arity) + " arguments, got " + std::to_string(args.size()));
  }
  switch (op) {
    case Elementwise::kAdd: return add(args[0], args[1]);
    case Elementwise::kMul: return mul(args[0], args[1]);
    case Elementwise::kSigmoid: return sigmoid(args[0]);
    case Elementwise::kTanh: return tanh(args[0]);
    case Elementwise::kExp: return exp(args[0]);
    case Elementwise::kLog: return log(args[0]);
  }
  throw ContractError("elementwise: unknown op");
}

// ---- reductions ------------------------------------------------------------------

Tensor sum(const Tensor & a)
{
  const auto v = a.values();
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  auto * an = a.node().get();
  return make_result(Shape{}, {total}, {a.node()}, [an](detail::TensorNode & o) {
    an->ensure_grad();
    for (double & g : an->grad) g += o.grad[0];
  });
}

Tensor sum(const Tensor & a, std::size_t axis)
{
  const AxisSplit s = split_axis(a.shape(), axis, "sum");
  std::vector<double> out(s.outer * s.inner, 0.0);
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t k = 0; k < s.extent; ++k)
      for (std::size_t i = 0; i < s.inner; ++i) out[o * s.inner + i] += v[(o * s.extent + k) * s.inner + i];
  auto * an = a.node().get();
  return make_result(drop_axis(a.shape(), axis), std::move(out), {a.node()}, [an, s](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t oo = 0; oo < s.outer; ++oo)
      for (std::size_t k = 0; k < s.extent; ++k)
        for (std::size_t i = 0; i < s.inner; ++i)
          an->grad[(oo * s.extent + k) * s.inner + i] += o.grad[oo * s.inner + i];
  });
}

Tensor max(const Tensor & a, std::size_t axis)
{
  const AxisSplit s = split_axis(a.shape(), axis, "max");
  if (s.extent == 0) throw DimensionError("max: empty reduction axis");
  std::vector<double> out(s.outer * s.inner);
  std::vector<std::size_t> argmax(s.outer * s.inner);
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < s.extent; ++k) {
        if (v[(o * s.extent + k) * s.inner + i] > v[(o * s.extent + best) * s.inner + i]) best = k;
      }
      argmax[o * s.inner + i] = best;
      out[o * s.inner + i] = v[(o * s.extent + best) * s.inner + i];
    }
  }
  auto * an = a.node().get();
  return make_result(
    drop_axis(a.shape(), axis), std::move(out), {a.node()},
    [an, s, argmax = std::move(argmax)](detail::TensorNode & o) {
      an->ensure_grad();
      for (std::size_t oo = 0; oo < s.outer; ++oo)
        for (std::size_t i = 0; i < s.inner; ++i)
          an->grad[(oo * s.extent + argmax[oo * s.inner + i]) * s.inner + i] += o.grad[oo * s.inner + i];
    });
}

Tensor logsumexp(const Tensor & a, std::size_t axis)
{
  const AxisSplit s = split_axis(a.shape(), axis, "logsumexp");
  if (s.extent == 0) throw DimensionError("logsumexp: empty reduction axis");
  std::vector<double> out(s.outer * s.inner);
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.extent; ++k) m = std::max(m, v[(o * s.extent + k) * s.inner + i]);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.extent; ++k) acc += std::exp(v[(o * s.extent + k) * s.inner + i] - m);
      out[o * s.inner + i] = m + std::log(acc);
    }
  }
  auto * an = a.node().get();
  return make_result(drop_axis(a.shape(), axis), std::move(out), {a.node()}, [an, s](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t oo = 0; oo < s.outer; ++oo)
      for (std::size_t k = 0; k < s.extent; ++k)
        for (std::size_t i = 0; i < s.inner; ++i) {
          const std::size_t idx = (oo * s.extent + k) * s.inner + i;
          an->grad[idx] += o.grad[oo * s.inner + i] * std::exp(an->value[idx] - o.value[oo * s.inner + i]);
        }
  });
}

Tensor log_softmax(const Tensor & a, std::size_t axis)
{
  const AxisSplit s = split_axis(a.shape(), axis, "log_softmax");
  std::vector<double> out(a.size());
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.extent; ++k) m = std::max(m, v[(o * s.extent + k) * s.inner + i]);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.extent; ++k) acc += std::exp(v[(o * s.extent + k) * s.inner + i] - m);
      const double lse = m + std::log(acc);
      for (std::size_t k = 0; k < s.extent; ++k) {
        const std::size_t idx = (o * s.extent + k) * s.inner + i;
        out[idx] = v[idx] - lse;
      }
    }
  }
  auto * an = a.node().get();
  return make_result(a.shape(), std::move(out), {a.node()}, [an, s](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t oo = 0; oo < s.outer; ++oo)
      for (std::size_t i = 0; i < s.inner; ++i) {
        double gsum = 0.0;
        for (std::size_t k = 0; k < s.extent; ++k) gsum += o.grad[(oo * s.extent + k) * s.inner + i];
        for (std::size_t k = 0; k < s.extent; ++k) {
          const std::size_t idx = (oo * s.extent + k) * s.inner + i;
          an->grad[idx] += o.grad[idx] - std::exp(o.value[idx]) * gsum;
        }
      }
  });
}

Tensor softmax(const Tensor & a, std::size_t axis)
{
  const AxisSplit s = split_axis(a.shape(), axis, "softmax");
  std::vector<double> out(a.size());
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.extent; ++k) m = std::max(m, v[(o * s.extent + k) * s.inner + i]);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.extent; ++k) {
        const std::size_t idx = (o * s.extent + k) * s.inner + i;
        out[idx] = std::exp(v[idx] - m);
        acc += out[idx];
      }
      for (std::size_t k = 0; k < s.extent; ++k) out[(o * s.extent + k) * s.inner + i] /= acc;
    }
  }
  auto * an = a.node().get();
  return make_result(a.shape(), std::move(out), {a.node()}, [an, s](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t oo = 0; oo < s.outer; ++oo)
      for (std::size_t i = 0; i < s.inner; ++i) {
        double dot = 0.0;
        for (std::size_t k = 0; k < s.extent; ++k) {
          const std::size_t idx = (oo * s.extent + k) * s.inner + i;
          dot += o.grad[idx] * o.value[idx];
        }
        for (std::size_t k = 0; k < s.extent; ++k) {
          const std::size_t idx = (oo * s.extent + k) * s.inner + i;
          an->grad[idx] += o.value[idx] * (o.grad[idx] - dot);
        }
      }
  });
}

// ---- structural ------------------------------------------------------------------

Tensor concat(std::span<const Tensor> tensors, std::size_t axis)
{
  if (tensors.empty()) throw DimensionError("concat: no tensors");
  const Shape & ref = tensors[0].shape();
  if (axis >= ref.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " out of range for " + shape_to_string(ref));
  }
  Shape out_shape = ref;
  out_shape[axis] = 0;
  for (const auto & t : tensors) {
    const Shape & s = t.shape();
    bool ok = s.size() == ref.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == ref[d];
    if (!ok) {
      throw DimensionError(
        "concat: shape " + shape_to_string(s) + " incompatible with " + shape_to_string(ref) +
        " along axis " + std::to_string(axis));
    }
    out_shape[axis] += s[axis];
  }
  const AxisSplit os = split_axis(out_shape, axis, "concat");
  std::vector<double> out(shape_numel(out_shape));
  std::vector<std::size_t> offsets;
  std::vector<NodePtr> inputs;
  std::size_t offset = 0;
  for (const auto & t : tensors) {
    const std::size_t ext = t.shape()[axis];
    const auto v = t.values();
    for (std::size_t o = 0; o < os.outer; ++o)
      std::copy_n(
        v.begin() + static_cast<std::ptrdiff_t>(o * ext * os.inner), ext * os.inner,
        out.begin() + static_cast<std::ptrdiff_t>((o * os.extent + offset) * os.inner));
    offsets.push_back(offset);
    inputs.push_back(t.node());
    offset += ext;
  }
  std::vector<detail::TensorNode *> raw;
  for (const auto & n : inputs) raw.push_back(n.get());
  return make_result(
    out_shape, std::move(out), std::move(inputs),
    [raw = std::move(raw), offsets = std::move(offsets), os, axis](detail::TensorNode & o) {
      for (std::size_t t = 0; t < raw.size(); ++t) {
        auto * in = raw[t];
        if (!in->requires_grad) continue;
        in->ensure_grad();
        const std::size_t ext = in->shape[axis];
        for (std::size_t oo = 0; oo < os.outer; ++oo)
          for (std::size_t j = 0; j < ext * os.inner; ++j)
            in->grad[oo * ext * os.inner + j] += o.grad[(oo * os.extent + offsets[t]) * os.inner + j];
      }
    });
}

Tensor concat(std::initializer_list<Tensor> tensors, std::size_t axis)
{
  return concat(std::span<const Tensor>(tensors.begin(), tensors.size()), axis);
}

Tensor slice(const Tensor & a, std::size_t axis, std::size_t begin, std::size_t end)
{
  const AxisSplit s = split_axis(a.shape(), axis, "slice");
  if (begin > end || end > s.extent) {
    throw DimensionError(
      "slice: range [" + std::to_string(begin) + ", " + std::to_string(end) + ") invalid for " +
      shape_to_string(a.shape()) + " axis " + std::to_string(axis));
  }
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const std::size_t len = end - begin;
  std::vector<double> out(s.outer * len * s.inner);
  const auto v = a.values();
  for (std::size_t o = 0; o < s.outer; ++o)
    std::copy_n(
      v.begin() + static_cast<std::ptrdiff_t>((o * s.extent + begin) * s.inner), len * s.inner,
      out.begin() + static_cast<std::ptrdiff_t>(o * len * s.inner));
  auto * an = a.node().get();
  return make_result(
    out_shape, std::move(out), {a.node()}, [an, s, begin, len](detail::TensorNode & o) {
      an->ensure_grad();
      for (std::size_t oo = 0; oo < s.outer; ++oo)
        for (std::size_t j = 0; j < len * s.inner; ++j)
          an->grad[(oo * s.extent + begin) * s.inner + j] += o.grad[oo * len * s.inner + j];
    });
}

Tensor reshape(const Tensor & a, Shape shape)
{
  if (shape_numel(shape) != a.size()) {
    throw DimensionError(
      "reshape: cannot view " + shape_to_string(a.shape()) + " as " + shape_to_string(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  auto * an = a.node().get();
  return make_result(std::move(shape), std::move(out), {a.node()}, [an](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i];
  });
}

Tensor repeat_rows(const Tensor & row, std::size_t count)
{
  const bool is_row = row.rank() == 1 || (row.rank() == 2 && row.dim(0) == 1);
  if (!is_row) {
    throw DimensionError("repeat_rows: expected a single row, got " + shape_to_string(row.shape()));
  }
  const std::size_t n = row.size();
  std::vector<double> out(count * n);
  const auto v = row.values();
  for (std::size_t r = 0; r < count; ++r) std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(r * n));
  auto * an = row.node().get();
  return make_result(Shape{count, n}, std::move(out), {row.node()}, [an, count, n](detail::TensorNode & o) {
    an->ensure_grad();
    for (std::size_t r = 0; r < count; ++r)
      for (std::size_t j = 0; j < n; ++j) an->grad[j] += o.grad[r * n + j];
  });
}

namespace memory
{
std::size_t live_bytes() { return g_live_bytes.load(); }
std::size_t peak_bytes() { return g_peak_bytes.load(); }
void reset_peak() { g_peak_bytes.store(g_live_bytes.load()); }
}  // namespace memory

}  // namespace trajgraph
