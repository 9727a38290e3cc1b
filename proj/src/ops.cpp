// src/ops.cpp

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

#include <algorithm>
#include <cmath>

#include "asd/errors.hpp"
#include "tensor_impl.hpp"

namespace asd {

using detail::make_result;
using detail::needs_grad;
using detail::grad_buffer;
using detail::require_rank;

namespace {

enum class Bcast { kSame, kScalar, kRow };

struct BinaryLayout {
  Shape out;
  Bcast a = Bcast::kSame;
  Bcast b = Bcast::kSame;
  std::size_t row_len = 1;
};

bool is_row_of(const Tensor& v, const Tensor& m) {
  if (m.ndim() != 2) return false;
  const auto k = m.dim(1);
  if (v.ndim() == 1) return v.dim(0) == k;
  if (v.ndim() == 2) return v.dim(0) == 1 && v.dim(1) == k;
  return false;
}

BinaryLayout binary_layout(const Tensor& a, const Tensor& b, std::string_view op) {
  if (a.shape() == b.shape()) return {a.shape(), Bcast::kSame, Bcast::kSame, 1};
  if (b.numel() == 1) return {a.shape(), Bcast::kSame, Bcast::kScalar, 1};
  if (a.numel() == 1) return {b.shape(), Bcast::kScalar, Bcast::kSame, 1};
  if (is_row_of(b, a)) return {a.shape(), Bcast::kSame, Bcast::kRow, a.dim(1)};
  if (is_row_of(a, b)) return {b.shape(), Bcast::kRow, Bcast::kSame, b.dim(1)};
  throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(a.shape()) +
                       " with " + shape_str(b.shape()));
}

inline std::size_t map_index(Bcast kind, std::size_t i, std::size_t row_len) {
  switch (kind) {
    case Bcast::kSame: return i;
    case Bcast::kScalar: return 0;
    case Bcast::kRow: return i % row_len;
  }
  return i;
}

template <typename Fwd, typename DA, typename DB>
Tensor binary_op(std::string_view op, const Tensor& a, const Tensor& b, Fwd fwd, DA da, DB db) {
  const auto layout = binary_layout(a, b, op);
  const auto n = shape_numel(layout.out);
  std::vector<double> out(n);
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = fwd(ad[map_index(layout.a, i, layout.row_len)],
                 bd[map_index(layout.b, i, layout.row_len)]);
  }
  return make_result(op, layout.out, std::move(out), {a, b},
                     [a, b, layout, da, db](std::span<const double> g) {
                       const auto av = a.data();
                       const auto bv = b.data();
                       const bool ga = needs_grad(a);
                       const bool gb = needs_grad(b);
                       auto* gad = ga ? grad_buffer(a).data() : nullptr;
                       auto* gbd = gb ? grad_buffer(b).data() : nullptr;
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         const auto ia = map_index(layout.a, i, layout.row_len);
                         const auto ib = map_index(layout.b, i, layout.row_len);
                         if (ga) gad[ia] += g[i] * da(av[ia], bv[ib]);
                         if (gb) gbd[ib] += g[i] * db(av[ia], bv[ib]);
                       }
                     });
}

template <typename Fwd, typename Deriv>
Tensor unary_op(std::string_view op, const Tensor& a, Fwd fwd, Deriv deriv) {
  const auto ad = a.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < ad.size(); ++i) out[i] = fwd(ad[i]);
  // deriv(x, y) receives the input and the forward output.
  auto saved = needs_grad(a) && NoGradGuard::grad_enabled() ? out : std::vector<double>{};
  return make_result(op, a.shape(), std::move(out), {a},
                     [a, saved = std::move(saved), deriv](std::span<const double> g) {
                       const auto x = a.data();
                       auto& ga = grad_buffer(a);
                       for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * deriv(x[i], saved[i]);
                     });
}

}  // namespace

// ---- linear algebra -------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: shape mismatch " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  const auto ad = a.data();
  const auto bd = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ad[i * k + p];
      const double* brow = &bd[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result("matmul", {m, n}, std::move(out), {a, b},
                     [a, b, m, k, n](std::span<const double> g) {
                       const auto av = a.data();
                       const auto bv = b.data();
                       if (needs_grad(a)) {
                         auto& ga = grad_buffer(a);
                         for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t p = 0; p < k; ++p) {
                             double s = 0.0;
                             for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bv[p * n + j];
                             ga[i * k + p] += s;
                           }
                         }
                       }
                       if (needs_grad(b)) {
                         auto& gb = grad_buffer(b);
                         for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t p = 0; p < k; ++p) {
                             const double aip = av[i * k + p];
                             for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
                           }
                         }
                       }
                     });
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose");
  const auto m = a.dim(0), n = a.dim(1);
  const auto ad = a.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = ad[i * n + j];
  return make_result("transpose", {n, m}, std::move(out), {a},
                     [a, m, n](std::span<const double> g) {
                       auto& ga = grad_buffer(a);
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
                     });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                         shape_str(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result("reshape", std::move(shape), std::move(out), {a},
                     [a](std::span<const double> g) {
                       auto& ga = grad_buffer(a);
                       for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                     });
}

Tensor row_l2_normalize(const Tensor& a, double eps) {
  require_rank(a, 2, "row_l2_normalize");
  if (!(eps > 0.0)) throw ContractError("row_l2_normalize: eps must be positive");
  const auto m = a.dim(0), k = a.dim(1);
  const auto ad = a.data();
  std::vector<double> out(m * k);
  std::vector<double> denom(m);
  std::vector<char> clamped(m);
  for (std::size_t i = 0; i < m; ++i) {
    double ss = 0.0;
    for (std::size_t j = 0; j < k; ++j) ss += ad[i * k + j] * ad[i * k + j];
    const double norm = std::sqrt(ss);
    clamped[i] = norm < eps;
    denom[i] = clamped[i] ? eps : norm;
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] = ad[i * k + j] / denom[i];
  }
  auto saved = out;
  return make_result(
      "row_l2_normalize", {m, k}, std::move(out), {a},
      [a, m, k, denom, clamped, y = std::move(saved)](std::span<const double> g) {
        auto& ga = grad_buffer(a);
        for (std::size_t i = 0; i < m; ++i) {
          if (clamped[i]) {
            for (std::size_t j = 0; j < k; ++j) ga[i * k + j] += g[i * k + j] / denom[i];
            continue;
          }
          double dot = 0.0;
          for (std::size_t j = 0; j < k; ++j) dot += g[i * k + j] * y[i * k + j];
          for (std::size_t j = 0; j < k; ++j) {
            ga[i * k + j] += (g[i * k + j] - y[i * k + j] * dot) / denom[i];
          }
        }
      });
}

Tensor softmax_rows(const Tensor& a) {
  require_rank(a, 2, "softmax_rows");
  const auto m = a.dim(0), k = a.dim(1);
  const auto ad = a.data();
  std::vector<double> out(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = &ad[i * k];
    const double mx = *std::max_element(row, row + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      out[i * k + j] = std::exp(row[j] - mx);
      total += out[i * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] /= total;
  }
  auto saved = out;
  return make_result("softmax_rows", {m, k}, std::move(out), {a},
                     [a, m, k, y = std::move(saved)](std::span<const double> g) {
                       auto& ga = grad_buffer(a);
                       for (std::size_t i = 0; i < m; ++i) {
                         double dot = 0.0;
                         for (std::size_t j = 0; j < k; ++j) dot += g[i * k + j] * y[i * k + j];
                         for (std::size_t j = 0; j < k; ++j) {
                           ga[i * k + j] += y[i * k + j] * (g[i * k + j] - dot);
                         }
                       }
                     });
}

// ---- elementwise -----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor scalar_mul(const Tensor& a, double c) {
  return unary_op(
      "scalar_mul", a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor exp(const Tensor& a) {
  return unary_op(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a, double eps) {
  return unary_op(
      "log", a, [eps](double x) { return std::log(std::max(x, eps)); },
      [eps](double x, double) { return x > eps ? 1.0 / x : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
  return unary_op(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor square(const Tensor& a) {
  return unary_op(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

// ---- reductions ------------------------------------------------------------

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_result("sum_all", {}, {s}, {a}, [a](std::span<const double> g) {
    auto& ga = grad_buffer(a);
    for (auto& v : ga) v += g[0];
  });
}

Tensor mean_all(const Tensor& a) {
  const auto n = static_cast<double>(a.numel());
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_result("mean_all", {}, {s / n}, {a}, [a, n](std::span<const double> g) {
    auto& ga = grad_buffer(a);
    for (auto& v : ga) v += g[0] / n;
  });
}

Tensor mean_rows(const Tensor& a) {
  require_rank(a, 2, "mean_rows");
  const auto m = a.dim(0), k = a.dim(1);
  const auto ad = a.data();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) out[j] += ad[i * k + j];
  for (auto& v : out) v /= static_cast<double>(m);
  return make_result("mean_rows", {k}, std::move(out), {a},
                     [a, m, k](std::span<const double> g) {
                       auto& ga = grad_buffer(a);
                       const double inv = 1.0 / static_cast<double>(m);
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < k; ++j) ga[i * k + j] += g[j] * inv;
                     });
}

Tensor sum_cols(const Tensor& a) {
  require_rank(a, 2, "sum_cols");
  const auto m = a.dim(0), k = a.dim(1);
  const auto ad = a.data();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) out[i] += ad[i * k + j];
  return make_result("sum_cols", {m}, std::move(out), {a},
                     [a, m, k](std::span<const double> g) {
                       auto& ga = grad_buffer(a);
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < k; ++j) ga[i * k + j] += g[i];
                     });
}

Tensor repeat_rows(const Tensor& v, std::size_t m) {
  require_rank(v, 1, "repeat_rows");
  if (m == 0) throw DomainError("repeat_rows: zero rows requested");
  const auto k = v.dim(0);
  std::vector<double> out;
  out.reserve(m * k);
  for (std::size_t i = 0; i < m; ++i) out.insert(out.end(), v.data().begin(), v.data().end());
  return make_result("repeat_rows", {m, k}, std::move(out), {v},
                     [v, m, k](std::span<const double> g) {
                       auto& gv = grad_buffer(v);
                       for (std::size_t i = 0; i < m; ++i)
                         for (std::size_t j = 0; j < k; ++j) gv[j] += g[i * k + j];
                     });
}

// ---- image ops ---------------------------------------------------------------

Tensor conv2d_same(const Tensor& x, const Tensor& kernel, const Tensor& bias) {
  require_rank(x, 3, "conv2d_same");
  require_rank(kernel, 4, "conv2d_same");
  require_rank(bias, 1, "conv2d_same");
  const auto h = x.dim(0), w = x.dim(1), ci = x.dim(2);
  const auto k = kernel.dim(0), co = kernel.dim(3);
  if (kernel.dim(1) != k || k % 2 == 0 || kernel.dim(2) != ci || bias.dim(0) != co) {
    throw DimensionError("conv2d_same: input " + shape_str(x.shape()) + ", kernel " +
                         shape_str(kernel.shape()) + ", bias " + shape_str(bias.shape()) +
                         " are incompatible (kernel must be [k,k,cin,cout] with odd k)");
  }
  const auto r = static_cast<std::ptrdiff_t>(k / 2);
  const auto H = static_cast<std::ptrdiff_t>(h), W = static_cast<std::ptrdiff_t>(w);
  const double* xd = x.data().data();
  const double* kd = kernel.data().data();
  const double* bd = bias.data().data();
  std::vector<double> out(h * w * co);
  for (std::ptrdiff_t y = 0; y < H; ++y) {
    for (std::ptrdiff_t xx = 0; xx < W; ++xx) {
      double* o = &out[(y * W + xx) * co];
      for (std::size_t c = 0; c < co; ++c) o[c] = bd[c];
      for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(k); ++ky) {
        const auto iy = y + ky - r;
        if (iy < 0 || iy >= H) continue;
        for (std::ptrdiff_t kx = 0; kx < static_cast<std::ptrdiff_t>(k); ++kx) {
          const auto ix = xx + kx - r;
          if (ix < 0 || ix >= W) continue;
          const double* in = xd + (iy * W + ix) * ci;
          const double* kp = kd + ((ky * static_cast<std::ptrdiff_t>(k) + kx) * ci) * co;
          for (std::size_t c = 0; c < ci; ++c) {
            const double v = in[c];
            const double* krow = kp + c * co;
            for (std::size_t oc = 0; oc < co; ++oc) o[oc] += v * krow[oc];
          }
        }
      }
    }
  }
  return make_result(
      "conv2d_same", {h, w, co}, std::move(out), {x, kernel, bias},
      [x, kernel, bias, H, W, ci, co, k, r](std::span<const double> g) {
        const double* xv = x.data().data();
        const double* kv = kernel.data().data();
        double* gx = needs_grad(x) ? grad_buffer(x).data() : nullptr;
        double* gk = needs_grad(kernel) ? grad_buffer(kernel).data() : nullptr;
        double* gb = needs_grad(bias) ? grad_buffer(bias).data() : nullptr;
        const auto K = static_cast<std::ptrdiff_t>(k);
        for (std::ptrdiff_t y = 0; y < H; ++y) {
          for (std::ptrdiff_t xx = 0; xx < W; ++xx) {
            const double* go = &g[(y * W + xx) * co];
            if (gb) {
              for (std::size_t c = 0; c < co; ++c) gb[c] += go[c];
            }
            for (std::ptrdiff_t ky = 0; ky < K; ++ky) {
              const auto iy = y + ky - r;
              if (iy < 0 || iy >= H) continue;
              for (std::ptrdiff_t kx = 0; kx < K; ++kx) {
                const auto ix = xx + kx - r;
                if (ix < 0 || ix >= W) continue;
                const auto in_off = (iy * W + ix) * ci;
                const auto k_off = ((ky * K + kx) * ci) * co;
                for (std::size_t c = 0; c < ci; ++c) {
                  const double* krow = kv + k_off + c * co;
                  if (gx) {
                    double s = 0.0;
                    for (std::size_t oc = 0; oc < co; ++oc) s += krow[oc] * go[oc];
                    gx[in_off + c] += s;
                  }
                  if (gk) {
                    const double v = xv[in_off + c];
                    double* gkrow = gk + k_off + c * co;
                    for (std::size_t oc = 0; oc < co; ++oc) gkrow[oc] += v * go[oc];
                  }
                }
              }
            }
          }
        }
      });
}

Tensor avg_pool(const Tensor& x, std::size_t factor) {
  require_rank(x, 3, "avg_pool");
  if (factor == 0) throw ContractError("avg_pool: factor must be positive");
  const auto h = x.dim(0), w = x.dim(1), c = x.dim(2);
  if (h % factor != 0 || w % factor != 0) {
    throw DimensionError("avg_pool: spatial size " + std::to_string(h) + "x" + std::to_string(w) +
                         " is not divisible by " + std::to_string(factor));
  }
  const auto oh = h / factor, ow = w / factor;
  const double inv = 1.0 / static_cast<double>(factor * factor);
  const auto xd = x.data();
  std::vector<double> out(oh * ow * c, 0.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t xx = 0; xx < w; ++xx)
      for (std::size_t ch = 0; ch < c; ++ch)
        out[((y / factor) * ow + xx / factor) * c + ch] += xd[(y * w + xx) * c + ch] * inv;
  return make_result("avg_pool", {oh, ow, c}, std::move(out), {x},
                     [x, factor, h, w, c, ow, inv](std::span<const double> g) {
                       auto& gx = grad_buffer(x);
                       for (std::size_t y = 0; y < h; ++y)
                         for (std::size_t xx = 0; xx < w; ++xx)
                           for (std::size_t ch = 0; ch < c; ++ch)
                             gx[(y * w + xx) * c + ch] +=
                                 g[((y / factor) * ow + xx / factor) * c + ch] * inv;
                     });
}

}  // namespace asd
