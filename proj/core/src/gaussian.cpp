#include "dum/gaussian.hpp"

#include <algorithm>
#include <string>

#include "dum/errors.hpp"

namespace dum {

DiagGaussian make_diag_gaussian(Vec mean, Vec variance) {
  if (mean.size() != variance.size()) {
    throw DimensionError("make_diag_gaussian: mean dim " +
                         std::to_string(mean.size()) + " vs variance dim " +
                         std::to_string(variance.size()));
  }
  for (double& v : variance) v = std::clamp(v, kVarianceMin, kVarianceMax);
  return {std::move(mean), std::move(variance)};
}

PoEGaussian poe_combine(std::span<const DiagGaussian> experts) {
  if (experts.empty()) {
    throw std::invalid_argument("poe_combine: empty expert list");
  }
  const std::size_t d = experts[0].dim();
  for (const auto& e : experts) {
    if (e.dim() != d || e.variance.size() != d) {
      throw DimensionError("poe_combine: expert dimension mismatch");
    }
  }
  if (experts.size() == 1) {
    // Exact identity, bit for bit.
    return {experts[0].mean, experts[0].variance, 1};
  }

  PoEGaussian out;
  out.expert_count = experts.size();
  out.mean.assign(d, 0.0);
  out.variance.assign(d, 0.0);
  Vec precision(d, 0.0);
  for (const auto& e : experts) {
    for (std::size_t j = 0; j < d; ++j) {
      const double w = 1.0 / e.variance[j];
      precision[j] += w;
      out.mean[j] += e.mean[j] * w;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    out.variance[j] = 1.0 / precision[j];
    out.mean[j] /= precision[j];
  }
  return out;
}

PoEGrads poe_backward(std::span<const DiagGaussian> experts,
                      const PoEGaussian& combined,
                      std::span<const double> mean_grad,
                      std::span<const double> variance_grad) {
  const std::size_t m = experts.size();
  const std::size_t d = combined.mean.size();
  if (m == 0) throw std::invalid_argument("poe_backward: empty expert list");
  if (mean_grad.size() != d || variance_grad.size() != d) {
    throw DimensionError("poe_backward: upstream gradient dimension mismatch");
  }

  PoEGrads grads;
  grads.mean.assign(m, Vec(d, 0.0));
  grads.variance.assign(m, Vec(d, 0.0));

  if (m == 1) {
    // Mirrors the forward identity: d mu_out / d mu_in = 1,
    // d var_out / d var_in = 1, and the cross terms are exactly zero.
    grads.mean[0].assign(mean_grad.begin(), mean_grad.end());
    grads.variance[0].assign(variance_grad.begin(), variance_grad.end());
    return grads;
  }

  // Per dimension, with w_i = 1/v_i and P = sum w_i:
  //   mu_out = (sum mu_i w_i) / P         var_out = 1 / P
  //   d mu_out / d mu_i = w_i / P = var_out / v_i
  //   d mu_out / d v_i  = (mu_out - mu_i) * var_out / v_i^2
  //   d var_out / d v_i = var_out^2 / v_i^2
  for (std::size_t i = 0; i < m; ++i) {
    if (experts[i].dim() != d) {
      throw DimensionError("poe_backward: expert dimension mismatch");
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = experts[i].variance[j];
      const double vo = combined.variance[j];
      const double ratio = vo / v;
      grads.mean[i][j] = mean_grad[j] * ratio;
      grads.variance[i][j] =
          mean_grad[j] * (combined.mean[j] - experts[i].mean[j]) * ratio / v +
          variance_grad[j] * ratio * ratio;
    }
  }
  return grads;
}

}  // namespace dum
