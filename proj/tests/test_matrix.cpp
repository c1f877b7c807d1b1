#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "dum/errors.hpp"
#include "dum/matrix.hpp"
#include "dum/rng.hpp"
#include "testutil.hpp"

using dum::Matrix;
using dum::Vec;

TEST_CASE("matmul matches a hand-worked product") {
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Matrix b = Matrix::from_rows({{7, 8}, {9, 10}, {11, 12}});
  const Matrix c = dum::matmul(a, b);
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 2);
  CHECK(c.at(0, 0) == 58.0);
  CHECK(c.at(0, 1) == 64.0);
  CHECK(c.at(1, 0) == 139.0);
  CHECK(c.at(1, 1) == 154.0);
}

TEST_CASE("matmul with identity is exact") {
  const Matrix a = testutil::random_matrix(4, 4, 7);
  CHECK(dum::matmul(a, Matrix::identity(4)) == a);
  CHECK(dum::matmul(Matrix::identity(4), a) == a);
}

TEST_CASE("matmul rejects mismatched shapes") {
  const Matrix a(2, 3);
  const Matrix b(2, 3);
  CHECK_THROWS_AS(dum::matmul(a, b), dum::DimensionError);
}

TEST_CASE("matmul_backward matches finite differences") {
  Matrix a = testutil::random_matrix(3, 4, 11, -1.0, 1.0);
  Matrix b = testutil::random_matrix(4, 2, 12, -1.0, 1.0);
  // L = sum of w .* (a b) for fixed random weights w.
  const Matrix w = testutil::random_matrix(3, 2, 13, -1.0, 1.0);
  auto loss = [&]() { return dum::sum(dum::mul(w, dum::matmul(a, b))); };

  const auto [ga, gb] = dum::matmul_backward(a, b, w);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double num = testutil::numeric_grad(loss, &a.at(r, c));
      CHECK(testutil::grad_close(ga.at(r, c), num));
    }
  }
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      const double num = testutil::numeric_grad(loss, &b.at(r, c));
      CHECK(testutil::grad_close(gb.at(r, c), num));
    }
  }
}

TEST_CASE("elementwise ops and their backwards") {
  const Matrix x = Matrix::from_rows({{-2.0, -0.5, 0.25, 3.0}});
  const Matrix g = Matrix::from_rows({{1.0, 2.0, 3.0, 4.0}});

  SUBCASE("relu clips negatives and gates gradient") {
    const Matrix y = dum::relu(x);
    CHECK(y.at(0, 0) == 0.0);
    CHECK(y.at(0, 2) == 0.25);
    const Matrix gx = dum::relu_backward(x, g);
    CHECK(gx.at(0, 0) == 0.0);
    CHECK(gx.at(0, 1) == 0.0);
    CHECK(gx.at(0, 2) == 3.0);
    CHECK(gx.at(0, 3) == 4.0);
  }

  SUBCASE("exp and its backward") {
    const Matrix y = dum::exp(x);
    CHECK(y.at(0, 3) == doctest::Approx(std::exp(3.0)));
    const Matrix gx = dum::exp_backward(x, g);
    CHECK(gx.at(0, 1) == doctest::Approx(2.0 * std::exp(-0.5)));
  }

  SUBCASE("log rejects non-positive input") {
    CHECK_THROWS_AS(dum::log(x), dum::DomainError);
    const Matrix pos = Matrix::from_rows({{0.5, 1.0, 2.0, 4.0}});
    CHECK(dum::log(pos).at(0, 3) == doctest::Approx(std::log(4.0)));
  }

  SUBCASE("softplus approaches relu for large inputs") {
    const Matrix big = Matrix::from_rows({{40.0, -40.0}});
    const Matrix y = dum::softplus(big);
    CHECK(y.at(0, 0) == doctest::Approx(40.0));
    CHECK(y.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    Matrix probe = Matrix::from_rows({{0.3}});
    const Matrix ones = Matrix::from_rows({{1.0}});
    auto f = [&]() { return dum::sum(dum::softplus(probe)); };
    const double num = testutil::numeric_grad(f, &probe.at(0, 0));
    CHECK(testutil::grad_close(
        dum::softplus_backward(probe, ones).at(0, 0), num));
  }

  SUBCASE("clamp pins values and zeroes gradient outside the range") {
    const Matrix y = dum::clamp(x, -1.0, 1.0);
    CHECK(y.at(0, 0) == -1.0);
    CHECK(y.at(0, 3) == 1.0);
    CHECK(y.at(0, 2) == 0.25);
    const Matrix gx = dum::clamp_backward(x, -1.0, 1.0, g);
    CHECK(gx.at(0, 0) == 0.0);
    CHECK(gx.at(0, 3) == 0.0);
    CHECK(gx.at(0, 1) == 2.0);
  }
}

TEST_CASE("reductions") {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(dum::sum(m) == 10.0);
  const Vec cs = dum::col_sum(m);
  CHECK(cs[0] == 4.0);
  CHECK(cs[1] == 6.0);
  const Vec a{1, 2, 3}, b{4, 5, 6};
  CHECK(dum::dot(a, b) == 32.0);
}

TEST_CASE("add_row_broadcast adds the row to every row") {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix out = dum::add_row_broadcast(m, {10, 20});
  CHECK(out.at(0, 0) == 11.0);
  CHECK(out.at(1, 1) == 24.0);
}

TEST_CASE("adam matches a scalar reference implementation") {
  // Independent single-parameter Adam, written from the update equations.
  double ref_p = 1.0, ref_m = 0.0, ref_v = 0.0;
  const double lr = 1e-2, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  dum::ParamTensor param(Matrix::from_rows({{1.0}}));
  dum::AdamState state(param.value);
  dum::AdamConfig cfg;
  cfg.learning_rate = lr;

  const double grads[] = {0.3, -1.2, 0.05, 0.7, 0.7};
  for (int t = 1; t <= 5; ++t) {
    const double g = grads[t - 1];
    ref_m = b1 * ref_m + (1 - b1) * g;
    ref_v = b2 * ref_v + (1 - b2) * g * g;
    const double mh = ref_m / (1 - std::pow(b1, t));
    const double vh = ref_v / (1 - std::pow(b2, t));
    ref_p -= lr * mh / (std::sqrt(vh) + eps);

    param.grad.at(0, 0) = g;
    dum::adam_step(param, state, cfg);
    CHECK(param.value.at(0, 0) == doctest::Approx(ref_p).epsilon(1e-15));
  }
}

TEST_CASE("adam first step moves by roughly the learning rate") {
  dum::ParamTensor param(Matrix::from_rows({{0.0}}));
  dum::AdamState state(param.value);
  dum::AdamConfig cfg;
  param.grad.at(0, 0) = 123.0;
  dum::adam_step(param, state, cfg);
  // Bias correction makes m_hat = g and v_hat = g^2 on step one.
  CHECK(param.value.at(0, 0) ==
        doctest::Approx(-cfg.learning_rate).epsilon(1e-6));
}

TEST_CASE("adam rejects non-finite gradients") {
  dum::ParamTensor param(Matrix::from_rows({{0.0}}));
  dum::AdamState state(param.value);
  param.grad.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(dum::adam_step(param, state, dum::AdamConfig{}),
                  dum::DivergenceError);
}

TEST_CASE("rng streams are deterministic and well ranged") {
  dum::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
  }
  dum::Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const std::size_t idx = r.uniform_index(13);
    CHECK(idx < 13);
  }
}

TEST_CASE("rng normal has the right first two moments") {
  dum::Rng r(99);
  const int n = 200000;
  double total = 0.0, ssq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    total += x;
    ssq += x * x;
  }
  const double mean = total / n;
  const double var = ssq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("shuffle produces a permutation and differs across seeds") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  dum::Rng r1(1);
  r1.shuffle(w);
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);

  auto w2 = v;
  dum::Rng r2(2);
  r2.shuffle(w2);
  CHECK(w != w2);
}

TEST_CASE("split_seed separates streams") {
  const auto s1 = dum::split_seed(123, 0);
  const auto s2 = dum::split_seed(123, 1);
  const auto s3 = dum::split_seed(124, 0);
  CHECK(s1 != s2);
  CHECK(s1 != s3);
  CHECK(dum::split_seed(123, 0) == s1);
}
