#pragma once

#include <cstddef>
#include <span>

namespace dum {

// Area under the ROC curve for scores where higher means more anomalous.
// Computed as the Mann-Whitney U statistic over (positive, negative) pairs,
// with ties counted as half via mid-ranks, divided by n_pos * n_neg.
// Throws std::invalid_argument unless both classes are non-empty, and
// DomainError on non-finite scores.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
// x in [0, 1], via the continued-fraction expansion (Lentz's method).
double regularized_incomplete_beta(double a, double b, double x);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;      // Welch-Satterthwaite approximation
  double p = 0.0;        // two-sided
  bool underflow = false;  // p fell below representable range; p reported as 0
};

// Welch's unequal-variance t-test on two samples. Each sample needs at least
// two values, and at least one sample variance must be positive; two exactly
// constant samples have no sampling variation to test against, so that case
// throws DomainError (compare the values directly instead).
WelchResult welch_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace dum
