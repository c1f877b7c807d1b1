#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <vector>

#include "dum/errors.hpp"
#include "dum/rng.hpp"
#include "dum/stats.hpp"

namespace {

// O(n^2) AUROC: count (positive, negative) pairs ordered correctly, ties
// worth one half. Every partial sum is a multiple of 0.5, so this is exact.
double auroc_by_pairs(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  double won = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++n_pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) {
        won += 1.0;
      } else if (scores[i] == scores[j]) {
        won += 0.5;
      }
    }
  }
  for (int l : labels) n_neg += (l == 0);
  return won / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// I_x(a, b) through the hypergeometric series
// x^a (1-x)^b / (a B(a,b)) * sum_n ((a+b)_n / (a+1)_n) x^n, in long double.
long double ibeta_series(long double a, long double b, long double x) {
  if (x == 0.0L) return 0.0L;
  if (x == 1.0L) return 1.0L;
  if (x > (a + 1.0L) / (a + b + 2.0L)) {
    return 1.0L - ibeta_series(b, a, 1.0L - x);
  }
  const long double ln_front = std::lgamma(static_cast<double>(a + b)) -
                               std::lgamma(static_cast<double>(a)) -
                               std::lgamma(static_cast<double>(b)) +
                               a * std::log(static_cast<double>(x)) +
                               b * std::log1p(static_cast<double>(-x));
  long double term = 1.0L, total = 1.0L;
  for (int n = 0; n < 200000; ++n) {
    term *= (a + b + n) / (a + 1.0L + n) * x;
    total += term;
    if (std::fabs(static_cast<double>(term)) <
        1e-21 * std::fabs(static_cast<double>(total))) {
      break;
    }
  }
  return std::exp(static_cast<double>(ln_front)) * total / a;
}

}  // namespace

TEST_CASE("auroc on small hand-checked inputs") {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> l{0, 0, 1, 1};
  CHECK(dum::auroc(s, l) == 0.75);

  // Perfect and inverted ranking.
  const std::vector<double> up{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> down{4.0, 3.0, 2.0, 1.0};
  const std::vector<int> half{0, 0, 1, 1};
  CHECK(dum::auroc(up, half) == 1.0);
  CHECK(dum::auroc(down, half) == 0.0);
  // Everything tied: chance.
  const std::vector<double> flat{5.0, 5.0, 5.0};
  const std::vector<int> mixed{1, 0, 1};
  CHECK(dum::auroc(flat, mixed) == 0.5);
}

TEST_CASE("auroc equals pairwise counting bit for bit, ties included") {
  dum::Rng rng(1234);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 20 + rng.uniform_index(100);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized scores so ties actually happen.
      scores[i] = std::floor(rng.uniform() * 12.0) / 12.0;
      labels[i] = rng.uniform() < 0.3 ? 1 : 0;
      has_pos |= labels[i] == 1;
      has_neg |= labels[i] == 0;
    }
    if (!has_pos) labels[0] = 1;
    if (!has_neg) labels[1] = 0;
    CHECK(dum::auroc(scores, labels) == auroc_by_pairs(scores, labels));
  }
}

TEST_CASE("auroc input validation") {
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> one{1.0};
  const std::vector<double> holed{std::nan(""), 2.0};
  const std::vector<int> ones{1, 1};
  const std::vector<int> bad{0, 2};
  const std::vector<int> ok{0, 1};
  CHECK_THROWS_AS(dum::auroc(two, ones), std::invalid_argument);
  CHECK_THROWS_AS(dum::auroc(two, bad), std::invalid_argument);
  CHECK_THROWS_AS(dum::auroc(one, ok), dum::DimensionError);
  CHECK_THROWS_AS(dum::auroc(holed, ok), dum::DomainError);
}

TEST_CASE("incomplete beta agrees with a series oracle and boost") {
  const double as[] = {0.5, 1.0, 2.5, 7.0, 30.0, 120.0};
  const double bs[] = {0.5, 1.0, 3.0, 12.0, 55.0};
  const double xs[] = {0.001, 0.05, 0.3, 0.5, 0.72, 0.95, 0.999};
  for (double a : as) {
    for (double b : bs) {
      for (double x : xs) {
        const double mine = dum::regularized_incomplete_beta(a, b, x);
        const double series = static_cast<double>(ibeta_series(a, b, x));
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(mine == doctest::Approx(series).epsilon(1e-10));
        CHECK(mine == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
  CHECK(dum::regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(dum::regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK_THROWS_AS(dum::regularized_incomplete_beta(0.0, 1.0, 0.5),
                  dum::DomainError);
  CHECK_THROWS_AS(dum::regularized_incomplete_beta(1.0, 1.0, 1.5),
                  dum::DomainError);
}

TEST_CASE("welch p-value matches the t distribution") {
  dum::Rng rng(777);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> a(40 + rng.uniform_index(40));
    std::vector<double> b(40 + rng.uniform_index(40));
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = 0.2 * rep / 10.0 + 1.3 * rng.normal();
    const dum::WelchResult w = dum::welch_ttest(a, b);

    const boost::math::students_t dist(w.dof);
    const double ref = 2.0 * boost::math::cdf(dist, -std::fabs(w.t));
    CHECK(w.p == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("welch dof reduces to 2(n-1) for balanced equal-variance samples") {
  // Identical sample variances and sizes collapse Welch-Satterthwaite
  // exactly: nu = (2s)^2 / (2 s^2 / (n-1)) = 2(n-1).
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> b{11.0, 12.0, 13.0, 14.0, 15.0};
  const dum::WelchResult w = dum::welch_ttest(a, b);
  CHECK(w.dof == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("welch agrees with a permutation test within monte-carlo error") {
  const std::size_t n = 250;
  const std::size_t permutations = 20000;
  const double shifts[] = {0.0,  0.02, 0.05, 0.08, 0.1,
                           0.13, 0.16, 0.2,  0.12, 0.06};

  for (int rep = 0; rep < 10; ++rep) {
    dum::Rng rng(9000 + rep);
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = shifts[rep] + rng.normal();

    const dum::WelchResult w = dum::welch_ttest(a, b);

    // Local t statistic, written independently of the library.
    auto t_stat = [](const double* x, std::size_t nx, const double* y,
                     std::size_t ny) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < nx; ++i) mx += x[i];
      for (std::size_t i = 0; i < ny; ++i) my += y[i];
      mx /= nx;
      my /= ny;
      double vx = 0.0, vy = 0.0;
      for (std::size_t i = 0; i < nx; ++i) vx += (x[i] - mx) * (x[i] - mx);
      for (std::size_t i = 0; i < ny; ++i) vy += (y[i] - my) * (y[i] - my);
      vx /= (nx - 1);
      vy /= (ny - 1);
      return (mx - my) / std::sqrt(vx / nx + vy / ny);
    };

    std::vector<double> pool(a);
    pool.insert(pool.end(), b.begin(), b.end());
    const double observed = std::fabs(t_stat(a.data(), n, b.data(), n));

    std::size_t at_least = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      const double t =
          std::fabs(t_stat(pool.data(), n, pool.data() + n, pool.size() - n));
      at_least += (t >= observed);
    }
    const double p_perm =
        static_cast<double>(at_least) / static_cast<double>(permutations);
    const double se =
        std::sqrt(std::max(w.p * (1.0 - w.p), 1e-8) /
                  static_cast<double>(permutations));
    CHECK(std::fabs(p_perm - w.p) <= 3.0 * se + 0.004);
  }
}

TEST_CASE("extreme separation underflows to a flagged zero p-value") {
  std::vector<double> a(50), b(50);
  dum::Rng rng(31337);
  for (auto& v : a) v = rng.normal() * 1e-6;
  for (auto& v : b) v = 1000.0 + rng.normal() * 1e-6;
  const dum::WelchResult w = dum::welch_ttest(a, b);
  CHECK(w.p == 0.0);
  CHECK(w.underflow);
  CHECK(w.t < 0.0);
}

TEST_CASE("degenerate inputs are rejected") {
  const std::vector<double> single{1.0};
  const std::vector<double> pair{1.0, 2.0};
  const std::vector<double> twos{2.0, 2.0, 2.0};
  const std::vector<double> fives{5.0, 5.0, 5.0};
  const std::vector<double> varied{1.0, 5.0, 6.0};
  CHECK_THROWS_AS(dum::welch_ttest(single, pair), std::invalid_argument);
  // Two exactly constant samples: no sampling variation to test against.
  CHECK_THROWS_AS(dum::welch_ttest(twos, fives), dum::DomainError);
  // One constant sample is fine.
  const dum::WelchResult w = dum::welch_ttest(twos, varied);
  CHECK(std::isfinite(w.p));
}
