// src/gradcheck.cpp

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

#include "asd/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asd/errors.hpp"

namespace asd {

namespace {

double relative_error(double fd, double ad) {
  const double scale = std::max({std::abs(fd), std::abs(ad), 1e-8});
  return std::abs(fd - ad) / scale;
}

}  // namespace

double finite_diff_check(const std::function<Tensor(const Tensor&)>& fn, const Tensor& x,
                         double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_check: h must be positive");
  Tensor tracked(x.shape(), std::vector<double>(x.data().begin(), x.data().end()), true);
  const Tensor loss = fn(tracked);
  std::vector<double> analytic(x.numel(), 0.0);
  if (loss.requires_grad()) {
    backward(loss);
    if (tracked.has_grad()) analytic.assign(tracked.grad().begin(), tracked.grad().end());
  }

  NoGradGuard no_grad;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    Tensor probe = x.detach();
    const double orig = probe.data()[i];
    probe.mutable_data()[i] = orig + h;
    const double up = fn(probe).item();
    probe.mutable_data()[i] = orig - h;
    const double down = fn(probe).item();
    worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic[i]));
  }
  return worst;
}

double finite_diff_check_param(const std::function<Tensor()>& fn, Tensor param, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_check_param: h must be positive");
  if (!param.is_leaf() || !param.requires_grad()) {
    throw ContractError("finite_diff_check_param: param must be a requires_grad leaf");
  }
  param.zero_grad();
  const Tensor loss = fn();
  std::vector<double> analytic(param.numel(), 0.0);
  if (loss.requires_grad()) {
    backward(loss);
    if (param.has_grad()) analytic.assign(param.grad().begin(), param.grad().end());
  }
  param.zero_grad();

  NoGradGuard no_grad;
  double worst = 0.0;
  auto values = param.mutable_data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double orig = values[i];
    values[i] = orig + h;
    const double up = fn().item();
    values[i] = orig - h;
    const double down = fn().item();
    values[i] = orig;
    worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic[i]));
  }
  return worst;
}

}  // namespace asd
