// src/cmm.cpp

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

#include "asd/cmm.hpp"

#include <cmath>

namespace asd {

Tensor correlation_matrix(const LatentFactors& z, double eps) {
  const Tensor n = row_l2_normalize(z.z, eps);
  return matmul(n, transpose(n));
}

Tensor cmm_loss(const LatentFactors& z, double eps) {
  const Tensor h = correlation_matrix(z, eps);
  const auto k = h.dim(0);
  std::vector<double> mask(k * k, 1.0);
  for (std::size_t i = 0; i < k; ++i) mask[i * k + i] = 0.0;
  return sum_all(mul(square(h), Tensor({k, k}, std::move(mask))));
}

double offdiag_abs_mean(const Tensor& correlation) {
  const auto k = correlation.dim(0);
  if (k < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) total += std::abs(correlation.at(i, j));
  return total / static_cast<double>(k * (k - 1));
}

}  // namespace asd
