// include/asd/gradcheck.hpp

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

#include <functional>

#include "asd/tensor.hpp"

namespace asd {

/// Compares reverse-mode gradients with central differences
/// (f(x+h e_i) - f(x-h e_i)) / 2h and returns
/// max_i |fd_i - ad_i| / max(|fd_i|, |ad_i|, 1e-8).
///
/// fn is called once on a tracked copy of x (for the analytic gradient) and
/// twice per coordinate on untracked perturbed copies.
double finite_diff_check(const std::function<Tensor(const Tensor&)>& fn, const Tensor& x,
                         double h = 1e-5);

/// Variant for a parameter that lives inside a closure: perturbs `param` in
/// place, re-evaluates fn, and restores the original value. `param` must be a
/// leaf with requires_grad; its gradient buffer is reset before the check.
double finite_diff_check_param(const std::function<Tensor()>& fn, Tensor param,
                               double h = 1e-5);

}  // namespace asd
