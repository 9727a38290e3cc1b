// src/tensor_impl.hpp

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

// Internal representation shared by the tensor translation units.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "asd/tensor.hpp"

namespace asd::detail {

using BackwardFn = std::function<void(std::span<const double> grad_out)>;

struct Node {
  std::string_view op;
  std::vector<Tensor> inputs;
  BackwardFn backward;
};

struct TensorImpl {
  std::uint64_t id = 0;
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::unique_ptr<Node> node;  // null for leaves
};

struct Access {
  static TensorImpl& impl(const Tensor& t) { return *t.impl_; }
  static const std::shared_ptr<TensorImpl>& ptr(const Tensor& t) { return t.impl_; }
  static Tensor wrap(std::shared_ptr<TensorImpl> p) { return Tensor(std::move(p)); }
};

// Gradient buffer of t, zero-allocated on first use.
std::vector<double>& grad_buffer(const Tensor& t);

// Builds an op result. When grad mode is on and any input requires grad, the
// result records `fn` and the inputs; otherwise fn is discarded.
Tensor make_result(std::string_view op, Shape shape, std::vector<double> data,
                   std::vector<Tensor> inputs, BackwardFn fn);

inline bool needs_grad(const Tensor& t) { return Access::impl(t).requires_grad; }

void require_rank(const Tensor& t, std::size_t rank, std::string_view op);

}  // namespace asd::detail
