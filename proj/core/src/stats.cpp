#include "dum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dum/errors.hpp"

namespace dum {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError(std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("auroc: scores and labels differ in length");
  }
  require_finite(scores, "auroc: scores");
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) {
      ++n_pos;
    } else if (l == 0) {
      ++n_neg;
    } else {
      throw std::invalid_argument("auroc: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auroc needs at least one example of each class");
  }

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Mid-rank tie handling: every value in a tie block gets the average of the
  // ranks the block spans. All intermediate sums are exact multiples of 0.5,
  // so the result matches pairwise counting bit for bit.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = static_cast<double>(i + j + 1) * 0.5;
    std::size_t pos_in_block = 0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) ++pos_in_block;
    }
    rank_sum_pos += static_cast<double>(pos_in_block) * mid_rank;
    i = j;
  }

  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_pos - np * (np + 1.0) * 0.5;
  return u / (np * static_cast<double>(n_neg));
}

namespace {

// Continued-fraction core of the incomplete beta function, evaluated with
// the modified Lentz algorithm.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DomainError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("incomplete beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("incomplete beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // The continued fraction converges fast only on one side of the mean;
  // reach the other side through I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

WelchResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("welch_ttest needs at least two values per sample");
  }
  require_finite(a, "welch_ttest: first sample");
  require_finite(b, "welch_ttest: second sample");

  auto sample_stats = [](std::span<const double> s, double& mean, double& var) {
    const double n = static_cast<double>(s.size());
    double total = 0.0;
    for (double v : s) total += v;
    mean = total / n;
    double ssq = 0.0;
    for (double v : s) ssq += (v - mean) * (v - mean);
    var = ssq / (n - 1.0);
  };
  double mean_a = 0.0, var_a = 0.0, mean_b = 0.0, var_b = 0.0;
  sample_stats(a, mean_a, var_a);
  sample_stats(b, mean_b, var_b);

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = var_a / na;
  const double sb = var_b / nb;
  if (sa + sb == 0.0) {
    throw DomainError(
        "welch_ttest: both samples are constant, so there is no sampling "
        "variation to test against; compare the values for exact equality "
        "instead");
  }

  WelchResult res;
  res.t = (mean_a - mean_b) / std::sqrt(sa + sb);
  res.dof = (sa + sb) * (sa + sb) /
            (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  const double x = res.dof / (res.t * res.t + res.dof);
  res.p = regularized_incomplete_beta(res.dof * 0.5, 0.5, x);
  res.p = std::clamp(res.p, 0.0, 1.0);
  // Extreme t underflows the beta prefactor; flag it rather than pretend the
  // p-value is exactly zero.
  res.underflow = (res.p == 0.0);
  return res;
}

}  // namespace dum
