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

#ifndef TRAJGRAPH__TENSOR_HPP_
#define TRAJGRAPH__TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajgraph/errors.hpp"

namespace trajgraph
{

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape & shape);
std::size_t shape_numel(const Shape & shape);

class Tape;

namespace detail
{
struct TensorNode
{
  TensorNode(Shape s, std::vector<double> v, bool requires_grad, bool is_parameter);
  ~TensorNode();
  TensorNode(const TensorNode &) = delete;
  TensorNode & operator=(const TensorNode &) = delete;

  Shape shape;
  std::vector<double> value;
  // Sized lazily on first accumulation.
  std::vector<double> grad;
  bool requires_grad{false};
  bool is_parameter{false};
  std::optional<std::size_t> tape_id;
  const Tape * tape{nullptr};

  void ensure_grad();
};
}  // namespace detail

/// Dense row-major array of doubles. Copies are shallow: two Tensor handles
/// copied from one another refer to the same storage, which is how shared
/// weights alias across graph positions.
class Tensor
{
public:
  Tensor();

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor row(std::span<const double> values);
  static Tensor row(std::initializer_list<double> values);
  /// A trainable leaf. Gradients accumulate across every use in a pass.
  static Tensor parameter(Shape shape, std::vector<double> values);

  const Shape & shape() const;
  std::size_t rank() const;
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  double item() const;
  double operator[](std::size_t flat_index) const;
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const;
  bool is_parameter() const;
  std::optional<std::size_t> tape_id() const;

  /// Value copy detached from any tape.
  Tensor detach() const;
  bool same_storage(const Tensor & other) const;

  const std::shared_ptr<detail::TensorNode> & node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::TensorNode> node);

private:
  std::shared_ptr<detail::TensorNode> node_;
};

/// Records differentiable operations in execution order. One tape belongs to
/// one forward pass; the order of records is a topological order of the
/// computation, so a reverse sweep is a valid backward schedule.
class Tape
{
public:
  using BackwardFn = std::function<void(detail::TensorNode & out)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape & operator=(const Tape &) = delete;

  /// Active tape on this thread, or nullptr when recording is off.
  static Tape * active();

  std::size_t record(
    std::vector<std::shared_ptr<detail::TensorNode>> inputs,
    const std::shared_ptr<detail::TensorNode> & output, BackwardFn backward);

  /// Reverse sweep from a scalar loss. Intermediate gradients are reset before
  /// each sweep; parameter gradients accumulate.
  void backward(const Tensor & loss);

  std::size_t size() const { return records_.size(); }
  void clear();

private:
  struct Record
  {
    std::vector<std::shared_ptr<detail::TensorNode>> inputs;
    std::shared_ptr<detail::TensorNode> output;
    BackwardFn backward;
  };
  std::vector<Record> records_;
};

/// Makes `tape` the active tape for the lifetime of the scope.
class TapeScope
{
public:
  explicit TapeScope(Tape & tape);
  ~TapeScope();
  TapeScope(const TapeScope &) = delete;
  TapeScope & operator=(const TapeScope &) = delete;

private:
  Tape * previous_;
};

/// Suspends recording for the lifetime of the scope.
class NoGradScope
{
public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope &) = delete;
  NoGradScope & operator=(const NoGradScope &) = delete;

private:
  Tape * previous_;
};

void backward(const Tensor & loss);

// ---- operations ------------------------------------------------------------
// Binary elementwise operations require equal shapes, except that either side
// may be a single-element tensor.

Tensor matmul(const Tensor & a, const Tensor & b);

Tensor add(const Tensor & a, const Tensor & b);
Tensor sub(const Tensor & a, const Tensor & b);
Tensor mul(const Tensor & a, const Tensor & b);
Tensor scale(const Tensor & a, double factor);
Tensor add_scalar(const Tensor & a, double offset);
Tensor neg(const Tensor & a);
Tensor square(const Tensor & a);
Tensor sigmoid(const Tensor & a);
Tensor tanh(const Tensor & a);
Tensor exp(const Tensor & a);
/// Throws DomainError for any non-positive entry.
Tensor log(const Tensor & a);
/// Gradient is zero where the input lies outside [lo, hi].
Tensor clamp(const Tensor & a, double lo, double hi);

Tensor operator+(const Tensor & a, const Tensor & b);
Tensor operator-(const Tensor & a, const Tensor & b);
Tensor operator*(const Tensor & a, const Tensor & b);

enum class Elementwise { kAdd, kMul, kSigmoid, kTanh, kExp, kLog };
Tensor elementwise(Elementwise op, std::span<const Tensor> args);

Tensor sum(const Tensor & a);
Tensor sum(const Tensor & a, std::size_t axis);
Tensor max(const Tensor & a, std::size_t axis);
Tensor logsumexp(const Tensor & a, std::size_t axis);
Tensor softmax(const Tensor & a, std::size_t axis);
Tensor log_softmax(const Tensor & a, std::size_t axis);

Tensor concat(std::span<const Tensor> tensors, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> tensors, std::size_t axis);
Tensor slice(const Tensor & a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor & a, Shape shape);
/// Stacks `count` copies of a single-row tensor ([n] or [1 x n]) into
/// [count x n]. The only broadcast the library performs, and it is explicit.
Tensor repeat_rows(const Tensor & row, std::size_t count);

// ---- live-storage accounting -------------------------------------------------
namespace memory
{
std::size_t live_bytes();
std::size_t peak_bytes();
void reset_peak();
}  // namespace memory

}  // namespace trajgraph

#endif  // TRAJGRAPH__TENSOR_HPP_
