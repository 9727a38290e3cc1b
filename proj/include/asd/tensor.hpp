// include/asd/tensor.hpp

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asd {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {
struct TensorImpl;
struct Access;
}  // namespace detail

/// Dense row-major array of doubles with optional gradient tracking.
///
/// Tensor is a shared handle: copies alias the same storage. Use clone() or
/// detach() for an independent copy. Operations on tensors that require
/// gradients record a backward closure so that backward() can later propagate
/// d loss / d input to every leaf.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  // 2-D convenience constructor, rows must all have the same length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);
  static Tensor vector(std::initializer_list<double> values, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  std::uint64_t id() const;

  const Shape& shape() const;
  std::size_t ndim() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // Writable view. Only meant for leaves (parameters, inputs); mutating a
  // tensor whose values were saved by a pending backward closure is undefined.
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t i) const { return data()[i]; }
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const;
  void set_requires_grad(bool value);
  bool is_leaf() const;

  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  Tensor detach() const;
  Tensor clone() const { return detach(); }

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  friend struct detail::Access;

  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Thread-local switch for graph recording. Evaluation code wraps forward
/// passes in a guard so no backward closures are retained.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool grad_enabled();

 private:
  bool previous_;
};

/// Topologically ordered record of the operations that produced a tensor.
class ComputationTape {
 public:
  struct Entry {
    std::string_view op;
    std::vector<std::uint64_t> input_ids;
    std::uint64_t output_id;
  };

  // Collects every recorded node reachable from root, inputs before outputs.
  static ComputationTape record(const Tensor& root);

  const std::vector<Entry>& entries() const { return entries_; }

  // Runs the backward closures in reverse order, seeding d root / d root = 1.
  // Releases the closures of interior nodes afterwards.
  void replay_backward();

 private:
  std::vector<Entry> entries_;
  std::vector<Tensor> nodes_;
  Tensor root_;
};

/// Accumulates d loss / d leaf into every requires_grad leaf reachable from loss.
void backward(const Tensor& loss);

// ---- linear algebra -------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);
Tensor row_l2_normalize(const Tensor& a, double eps = 1e-12);
Tensor softmax_rows(const Tensor& a);

// ---- elementwise -----------------------------------------------------------
// Binary ops accept equal shapes, a scalar (numel 1) on either side, or a
// row vector ([k] or [1,k]) against an [m,k] matrix.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scalar_mul(const Tensor& a, double c);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a, double eps = 1e-12);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor square(const Tensor& a);

// ---- reductions ------------------------------------------------------------

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
// [m,k] -> [k]: per-column mean over the m rows.
Tensor mean_rows(const Tensor& a);
// [m,k] -> [m]: per-row sum over the k columns.
Tensor sum_cols(const Tensor& a);
// [k] -> [m,k] by copying the vector into every row.
Tensor repeat_rows(const Tensor& v, std::size_t m);

// ---- image ops (HWC layout) --------------------------------------------------

// x: [h,w,cin], kernel: [k,k,cin,cout] with odd k, bias: [cout].
// Zero "same" padding, stride 1.
Tensor conv2d_same(const Tensor& x, const Tensor& kernel, const Tensor& bias);
// x: [h,w,c] -> [h/f,w/f,c]; h and w must be divisible by f.
Tensor avg_pool(const Tensor& x, std::size_t factor);

}  // namespace asd
