// tests/test_classifier.cpp

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

#include <doctest.h>

#include <cmath>

#include "asd/aem.hpp"
#include "asd/classifier.hpp"
#include "asd/cmm.hpp"
#include "asd/errors.hpp"
#include "asd/gradcheck.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace asd;

TEST_CASE("predict: zero parameters give one half") {
  ClassifierParams params{Tensor::zeros({3, 4}), Tensor::zeros({3})};
  Rng rng(31);
  const auto p = predict(testing::random_tensor(rng, {3, 4}), params);
  for (double v : p.data()) CHECK(v == 0.5);
}

TEST_CASE("predict: w_j = g_j / |g_j|^2 gives sigmoid(1)") {
  Rng rng(32);
  const auto g = testing::random_tensor(rng, {3, 5});
  std::vector<double> w(15);
  for (std::size_t j = 0; j < 3; ++j) {
    double n2 = 0.0;
    for (std::size_t c = 0; c < 5; ++c) n2 += g.at(j, c) * g.at(j, c);
    for (std::size_t c = 0; c < 5; ++c) w[j * 5 + c] = g.at(j, c) / n2;
  }
  const auto p = predict(g, {Tensor({3, 5}, w), Tensor::zeros({3})});
  for (double v : p.data()) CHECK(v == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("predict and classification_loss match loop oracles") {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t heads = 2 + rng.below(5), c = 1 + rng.below(6);
    const auto g = testing::random_tensor(rng, {heads, c}, -2, 2);
    const ClassifierParams params{testing::random_tensor(rng, {heads, c}, -2, 2),
                                  testing::random_tensor(rng, {heads})};
    const auto p = predict(g, params);
    const auto expected = oracle::predict(testing::to_matrix(g), testing::to_matrix(params.w),
                                          testing::to_vec(params.b));
    CHECK(testing::max_abs_diff(p.data(), expected) <= 1e-12);

    std::vector<double> y(heads, 0.0);
    for (std::size_t j = 0; j + 1 < heads; ++j) y[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double loss = classification_loss(p, Tensor({heads}, y)).item();
    CHECK(loss >= 0.0);
    CHECK(std::abs(loss - oracle::bce(testing::to_vec(p), y)) <= 1e-12);
  }
}

TEST_CASE("predict rejects mismatched shapes") {
  ClassifierParams params{Tensor::zeros({3, 4}), Tensor::zeros({3})};
  CHECK_THROWS_AS(predict(Tensor::zeros({2, 4}), params), DimensionError);
  CHECK_THROWS_AS(predict(Tensor::zeros({3, 4}), {Tensor::zeros({3, 4}), Tensor::zeros({2})}),
                  DimensionError);
}

TEST_CASE("each head only sees its own embedding") {
  Rng rng(34);
  const ClassifierParams params{testing::random_tensor(rng, {4, 3}), testing::random_tensor(rng, {4})};
  auto g = testing::random_tensor(rng, {4, 3}, -1, 1, true);
  for (std::size_t k = 0; k < 4; ++k) {
    g.zero_grad();
    backward(sum_all(mul(predict(g, params), Tensor({4}, {k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0,
                                                            k == 2 ? 1.0 : 0.0, k == 3 ? 1.0 : 0.0}))));
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t c = 0; c < 3; ++c) {
        if (j != k) CHECK(g.grad()[j * 3 + c] == 0.0);
      }
  }
}

TEST_CASE("classification loss examples") {
  CHECK(classification_loss(Tensor::vector({1 - 1e-15, 1e-15, 1e-15}), Tensor::vector({1, 0, 0}))
            .item() < 1e-12);
  Rng rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> y{rng.bernoulli(0.5) ? 1.0 : 0.0, rng.bernoulli(0.5) ? 1.0 : 0.0, 0.0};
    CHECK(classification_loss(Tensor::full({3}, 0.5), Tensor({3}, y)).item() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(classification_loss(Tensor::full({3}, 0.5), Tensor::vector({1, 0, 1})),
                  ContractError);
  CHECK_NOTHROW(classification_loss(Tensor::full({2}, 0.5), Tensor::vector({1, 1}), false));
  CHECK_THROWS_AS(classification_loss(Tensor::full({3}, 0.5), Tensor::vector({1, 0})),
                  DimensionError);
}

TEST_CASE("total loss") {
  CHECK(total_loss(Tensor::scalar(0.5), Tensor::scalar(6), 0.0).item() == 0.5);
  CHECK(total_loss(Tensor::scalar(0.5), Tensor::scalar(6), 0.02).item() ==
        doctest::Approx(0.62).epsilon(1e-15));
  CHECK(total_loss(Tensor::scalar(0.5), Tensor::scalar(7), 0.02).item() >
        total_loss(Tensor::scalar(0.5), Tensor::scalar(6), 0.02).item());
  CHECK_THROWS_AS(total_loss(Tensor::scalar(0.5), Tensor::scalar(6), -1.0), ContractError);
}

TEST_CASE("total loss gradient w.r.t. z flows through both paths") {
  Rng rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    LatentFactors z{testing::random_tensor(rng, {3, 3}, -1, 1, true), true};
    const FeatureMap f{testing::random_tensor(rng, {2, 2, 3}), 2, 2, 3};
    const ClassifierParams params{testing::random_tensor(rng, {3, 3}), testing::random_tensor(rng, {3})};
    const auto y = Tensor::vector({1, 0, 0});
    const auto fn = [&]() {
      const auto p = predict(aem_forward(f, z).embeddings, params);
      return total_loss(classification_loss(p, y), cmm_loss(z), 0.5);
    };
    CHECK(finite_diff_check_param(fn, z.z) <= 1e-4);

    // The classification path alone must differ from the total gradient.
    z.z.zero_grad();
    backward(classification_loss(predict(aem_forward(f, z).embeddings, params), y));
    const auto cls_only = testing::to_vec(Tensor({3, 3}, {z.z.grad().begin(), z.z.grad().end()}));
    z.z.zero_grad();
    backward(fn());
    CHECK(testing::max_abs_diff(z.z.grad(), cls_only) > 1e-6);
  }
}

TEST_CASE("evaluate_accuracy") {
  const std::vector<Tensor> labels{Tensor::vector({1, 0, 1}), Tensor::vector({0, 0, 1}),
                                   Tensor::vector({1, 1, 0}), Tensor::vector({0, 1, 0})};
  // Extra trailing entry plays the noise head and is ignored.
  const std::vector<Tensor> preds{Tensor::vector({0.9, 0.2, 0.5, 0.9}), Tensor::vector({0.6, 0.1, 0.7, 0.9}),
                                  Tensor::vector({0.8, 0.4, 0.3, 0.9}), Tensor::vector({0.1, 0.9, 0.6, 0.9})};
  const auto r = evaluate_accuracy(preds, labels);
  REQUIRE(r.per_attribute.size() == 3);
  CHECK(r.per_attribute[0] == doctest::Approx(75.0));
  CHECK(r.per_attribute[1] == doctest::Approx(75.0));
  CHECK(r.per_attribute[2] == doctest::Approx(75.0));
  CHECK(r.mean == doctest::Approx(75.0));

  const std::vector<Tensor> rev_preds(preds.rbegin(), preds.rend());
  const std::vector<Tensor> rev_labels(labels.rbegin(), labels.rend());
  CHECK(evaluate_accuracy(rev_preds, rev_labels).mean == r.mean);

  CHECK(evaluate_accuracy({Tensor::vector({0.5})}, {Tensor::vector({1})}).mean == 100.0);
  CHECK(evaluate_accuracy(labels, labels).mean == 100.0);
  CHECK_THROWS_AS(evaluate_accuracy({}, {}), DomainError);
  CHECK_THROWS_AS(evaluate_accuracy(preds, {labels[0]}), DimensionError);
}

TEST_CASE("init_classifier bounds") {
  const auto p = init_classifier(5, 11, 3);
  CHECK(p.w.shape() == Shape{5, 11});
  CHECK(p.b.shape() == Shape{5});
  const double bound = std::sqrt(6.0 / 12.0);
  for (double v : p.w.data()) CHECK(std::abs(v) < bound);
  for (double v : p.b.data()) CHECK(v == 0.0);
}
