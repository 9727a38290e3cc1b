// src/tensor.cpp

// Copyright 2026  ASD authors

// See the LICENSE file for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <sstream>
#include <unordered_set>

#include "asd/errors.hpp"
#include "tensor_impl.hpp"

namespace asd {

namespace {

std::atomic<std::uint64_t> next_id{1};
thread_local bool grad_mode = true;

std::shared_ptr<detail::TensorImpl> new_impl(Shape shape, std::vector<double> data,
                                              bool requires_grad) {
  if (shape_numel(shape) != data.size()) {
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape));
  }
  for (auto d : shape) {
    if (d == 0) throw DimensionError("tensor shape " + shape_str(shape) + " has a zero extent");
  }
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->id = next_id.fetch_add(1, std::memory_order_relaxed);
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  return impl;
}

}  // namespace

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : impl_(new_impl(std::move(shape), std::move(data), requires_grad)) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(Shape{}, {value}, requires_grad);
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows,
                      bool requires_grad) {
  if (rows.size() == 0) throw DomainError("matrix: no rows");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("matrix: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data), requires_grad);
}

Tensor Tensor::vector(std::initializer_list<double> values, bool requires_grad) {
  return Tensor({values.size()}, std::vector<double>(values), requires_grad);
}

std::uint64_t Tensor::id() const { return impl_->id; }
const Shape& Tensor::shape() const { return impl_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= impl_->shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(impl_->shape));
  }
  return impl_->shape[axis];
}

std::size_t Tensor::numel() const { return impl_->data.size(); }
std::span<const double> Tensor::data() const { return impl_->data; }
std::span<double> Tensor::mutable_data() { return impl_->data; }

double Tensor::item() const {
  if (impl_->data.size() != 1) {
    throw ContractError("item() on non-scalar tensor of shape " + shape_str(impl_->shape));
  }
  return impl_->data[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (impl_->shape.size() != 2) throw DimensionError("at(r,c) needs a 2-D tensor");
  return impl_->data[r * impl_->shape[1] + c];
}

bool Tensor::requires_grad() const { return impl_->requires_grad; }

void Tensor::set_requires_grad(bool value) {
  if (!is_leaf()) throw ContractError("set_requires_grad on a non-leaf tensor");
  impl_->requires_grad = value;
}

bool Tensor::is_leaf() const { return impl_->node == nullptr; }
bool Tensor::has_grad() const { return !impl_->grad.empty(); }
std::span<const double> Tensor::grad() const { return impl_->grad; }
std::span<double> Tensor::mutable_grad() { return detail::grad_buffer(*this); }
void Tensor::zero_grad() { impl_->grad.clear(); }

Tensor Tensor::detach() const { return Tensor(impl_->shape, impl_->data, false); }

NoGradGuard::NoGradGuard() : previous_(grad_mode) { grad_mode = false; }
NoGradGuard::~NoGradGuard() { grad_mode = previous_; }
bool NoGradGuard::grad_enabled() { return grad_mode; }

namespace detail {

std::vector<double>& grad_buffer(const Tensor& t) {
  auto& impl = Access::impl(t);
  if (impl.grad.empty()) impl.grad.assign(impl.data.size(), 0.0);
  return impl.grad;
}

Tensor make_result(std::string_view op, Shape shape, std::vector<double> data,
                   std::vector<Tensor> inputs, BackwardFn fn) {
  bool track = false;
  if (grad_mode) {
    for (const auto& in : inputs) track = track || needs_grad(in);
  }
  auto impl = new_impl(std::move(shape), std::move(data), track);
  if (track) {
    impl->node = std::make_unique<Node>(Node{op, std::move(inputs), std::move(fn)});
  }
  return Access::wrap(std::move(impl));
}

void require_rank(const Tensor& t, std::size_t rank, std::string_view op) {
  if (t.ndim() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         " tensor, got shape " + shape_str(t.shape()));
  }
}

}  // namespace detail

ComputationTape ComputationTape::record(const Tensor& root) {
  using detail::Access;
  ComputationTape tape;
  tape.root_ = root;
  if (!root.defined() || root.is_leaf()) return tape;

  // Iterative post-order DFS; post-order of a DAG is a topological order.
  std::unordered_set<const detail::TensorImpl*> visited;
  std::vector<std::pair<Tensor, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(&Access::impl(root));
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    auto& node = *Access::impl(t).node;
    if (next < node.inputs.size()) {
      const Tensor in = node.inputs[next++];
      if (!in.is_leaf() && visited.insert(&Access::impl(in)).second) {
        stack.emplace_back(in, 0);
      }
      continue;
    }
    Entry e{node.op, {}, t.id()};
    for (const auto& in : node.inputs) e.input_ids.push_back(in.id());
    tape.entries_.push_back(std::move(e));
    tape.nodes_.push_back(t);
    stack.pop_back();
  }
  return tape;
}

void ComputationTape::replay_backward() {
  using detail::Access;
  if (!root_.defined()) throw ContractError("backward: undefined tensor");
  if (root_.numel() != 1) {
    throw ContractError("backward: loss must be scalar, got shape " + shape_str(root_.shape()));
  }
  if (!root_.requires_grad()) {
    throw ContractError("backward: loss was not produced through tracked operations");
  }
  detail::grad_buffer(root_)[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    auto& impl = Access::impl(*it);
    if (impl.grad.empty()) continue;  // no path from root carried gradient
    impl.node->backward(impl.grad);
    // Interior nodes are consumed; leaves keep their accumulated gradient.
    impl.node.reset();
    impl.requires_grad = false;
    if (!it->same_storage(root_)) std::vector<double>().swap(impl.grad);
  }
  nodes_.clear();
}

void backward(const Tensor& loss) { ComputationTape::record(loss).replay_backward(); }

}  // namespace asd
