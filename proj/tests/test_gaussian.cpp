#include <doctest.h>

#include <cmath>
#include <vector>

#include "dum/errors.hpp"
#include "dum/gaussian.hpp"
#include "dum/rng.hpp"
#include "testutil.hpp"

using dum::DiagGaussian;
using dum::PoEGaussian;
using dum::Vec;

namespace {

std::vector<DiagGaussian> random_experts(std::size_t m, std::size_t d,
                                         std::uint64_t seed) {
  dum::Rng rng(seed);
  std::vector<DiagGaussian> experts;
  for (std::size_t i = 0; i < m; ++i) {
    Vec mean(d), var(d);
    for (auto& v : mean) v = rng.normal();
    for (auto& v : var) v = 0.1 + rng.uniform();
    experts.push_back({std::move(mean), std::move(var)});
  }
  return experts;
}

}  // namespace

TEST_CASE("single-expert fusion is the identity, bit for bit") {
  const auto experts = random_experts(1, 6, 5);
  const PoEGaussian out = dum::poe_combine(experts);
  CHECK(out.mean == experts[0].mean);
  CHECK(out.variance == experts[0].variance);
  CHECK(out.expert_count == 1);
}

TEST_CASE("two-expert fusion matches the precision-weighted formula") {
  const DiagGaussian a{{1.0, -2.0}, {0.5, 2.0}};
  const DiagGaussian b{{3.0, 0.0}, {1.5, 4.0}};
  const std::vector<DiagGaussian> experts{a, b};
  const PoEGaussian out = dum::poe_combine(experts);

  for (std::size_t j = 0; j < 2; ++j) {
    const double p = 1.0 / a.variance[j] + 1.0 / b.variance[j];
    const double var = 1.0 / p;
    const double mean =
        (a.mean[j] / a.variance[j] + b.mean[j] / b.variance[j]) * var;
    CHECK(out.variance[j] == doctest::Approx(var).epsilon(1e-15));
    CHECK(out.mean[j] == doctest::Approx(mean).epsilon(1e-15));
  }
}

TEST_CASE("fusion tightens variance and stays inside the expert means") {
  const auto experts = random_experts(4, 8, 17);
  const PoEGaussian out = dum::poe_combine(experts);
  for (std::size_t j = 0; j < 8; ++j) {
    double min_var = experts[0].variance[j];
    double lo = experts[0].mean[j], hi = lo;
    for (const auto& e : experts) {
      min_var = std::min(min_var, e.variance[j]);
      lo = std::min(lo, e.mean[j]);
      hi = std::max(hi, e.mean[j]);
    }
    CHECK(out.variance[j] <= min_var);
    CHECK(out.mean[j] >= lo - 1e-12);
    CHECK(out.mean[j] <= hi + 1e-12);
  }
}

TEST_CASE("fusion is invariant to expert order") {
  auto experts = random_experts(5, 4, 23);
  const PoEGaussian base = dum::poe_combine(experts);
  std::reverse(experts.begin(), experts.end());
  std::swap(experts[1], experts[3]);
  const PoEGaussian permuted = dum::poe_combine(experts);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(permuted.mean[j] == doctest::Approx(base.mean[j]).epsilon(1e-12));
    CHECK(permuted.variance[j] ==
          doctest::Approx(base.variance[j]).epsilon(1e-12));
  }
}

TEST_CASE("pairwise folding agrees with flat fusion") {
  const auto experts = random_experts(6, 5, 31);
  const PoEGaussian flat = dum::poe_combine(experts);

  std::vector<DiagGaussian> fold{experts[0]};
  for (std::size_t i = 1; i < experts.size(); ++i) {
    std::vector<DiagGaussian> pair{fold[0], experts[i]};
    const PoEGaussian step = dum::poe_combine(pair);
    fold[0] = DiagGaussian{step.mean, step.variance};
  }
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(fold[0].mean[j] == doctest::Approx(flat.mean[j]).epsilon(1e-10));
    CHECK(fold[0].variance[j] ==
          doctest::Approx(flat.variance[j]).epsilon(1e-10));
  }
}

TEST_CASE("fusion input validation") {
  CHECK_THROWS_AS(dum::poe_combine({}), std::invalid_argument);
  std::vector<DiagGaussian> bad{{{1.0, 2.0}, {1.0, 1.0}}, {{1.0}, {1.0}}};
  CHECK_THROWS_AS(dum::poe_combine(bad), dum::DimensionError);
}

TEST_CASE("make_diag_gaussian clamps variance into range") {
  const DiagGaussian g =
      dum::make_diag_gaussian({0.0, 0.0, 0.0}, {1e-12, 1.0, 1e12});
  CHECK(g.variance[0] == dum::kVarianceMin);
  CHECK(g.variance[1] == 1.0);
  CHECK(g.variance[2] == dum::kVarianceMax);
  CHECK_THROWS_AS(dum::make_diag_gaussian({0.0}, {1.0, 2.0}),
                  dum::DimensionError);
}

TEST_CASE("fusion backward matches finite differences") {
  auto experts = random_experts(3, 4, 47);
  dum::Rng rng(48);
  Vec w_mean(4), w_var(4);
  for (auto& w : w_mean) w = rng.normal();
  for (auto& w : w_var) w = rng.normal();

  // L = w_mean . mean_out + w_var . var_out
  auto loss = [&]() {
    const PoEGaussian out = dum::poe_combine(experts);
    double total = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      total += w_mean[j] * out.mean[j] + w_var[j] * out.variance[j];
    }
    return total;
  };

  const PoEGaussian combined = dum::poe_combine(experts);
  const dum::PoEGrads grads =
      dum::poe_backward(experts, combined, w_mean, w_var);

  for (std::size_t i = 0; i < experts.size(); ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double num_mean =
          testutil::numeric_grad(loss, &experts[i].mean[j]);
      CHECK(testutil::grad_close(grads.mean[i][j], num_mean));
      const double num_var =
          testutil::numeric_grad(loss, &experts[i].variance[j], 1e-6);
      CHECK(testutil::grad_close(grads.variance[i][j], num_var));
    }
  }
}

TEST_CASE("single-expert backward passes gradients straight through") {
  const auto experts = random_experts(1, 3, 53);
  const PoEGaussian combined = dum::poe_combine(experts);
  const Vec gm{0.25, -1.5, 3.0};
  const Vec gv{2.0, 0.0, -0.75};
  const dum::PoEGrads grads = dum::poe_backward(experts, combined, gm, gv);
  CHECK(grads.mean[0] == gm);
  CHECK(grads.variance[0] == gv);
}
