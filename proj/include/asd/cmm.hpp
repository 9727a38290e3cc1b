// include/asd/cmm.hpp

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

#include "asd/aem.hpp"
#include "asd/tensor.hpp"

namespace asd {

// H[i][j] = cosine(z_i, z_j), computed as N N^T with N the row-normalized z.
Tensor correlation_matrix(const LatentFactors& z, double eps = 1e-12);

// Sum of squared off-diagonal correlations. Unnormalized; the diagonal term
// (1 - s(z_i, z_i))^2 is identically zero and is not computed.
Tensor cmm_loss(const LatentFactors& z, double eps = 1e-12);

// Mean |H_ij| over i != j, for monitoring. Returns 0 for a single factor.
double offdiag_abs_mean(const Tensor& correlation);

}  // namespace asd
