#pragma once

#include <span>
#include <vector>

#include "dum/matrix.hpp"

namespace dum {

// Variance clamp range. Precisions stay finite and gradients bounded; the
// log-variance clamp in the network (+-13.8) keeps its output strictly
// inside this range.
inline constexpr double kVarianceMin = 1e-6;
inline constexpr double kVarianceMax = 1e6;

// Diagonal-covariance Gaussian stored as a mean vector and a per-dimension
// variance vector.
struct DiagGaussian {
  Vec mean;
  Vec variance;

  std::size_t dim() const { return mean.size(); }
};

// Constructs a DiagGaussian, clamping each variance entry into
// [kVarianceMin, kVarianceMax]. Throws DimensionError on length mismatch.
DiagGaussian make_diag_gaussian(Vec mean, Vec variance);

// Product-of-experts fusion of m diagonal Gaussians.
struct PoEGaussian {
  Vec mean;
  Vec variance;
  std::size_t expert_count = 0;
};

// Per dimension: precision p = sum_i 1/var_i, variance = 1/p,
// mean = (sum_i mean_i/var_i) / p. Accumulation runs in expert-index order.
// m = 1 returns the expert unchanged (exact identity). Throws on an empty
// expert list or on dimension mismatch.
PoEGaussian poe_combine(std::span<const DiagGaussian> experts);

struct PoEGrads {
  // One entry per expert; each the same dimension as the inputs.
  std::vector<Vec> mean;
  std::vector<Vec> variance;
};

// Exact analytic partials of the PoE mean and variance w.r.t. every expert
// mean and variance, contracted with the upstream gradients. Requires the
// PoEGaussian previously produced by poe_combine on the same experts.
PoEGrads poe_backward(std::span<const DiagGaussian> experts,
                      const PoEGaussian& combined,
                      std::span<const double> mean_grad,
                      std::span<const double> variance_grad);

}  // namespace dum
