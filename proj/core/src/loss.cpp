#include "dum/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dum/errors.hpp"
#include "dum/gaussian.hpp"

namespace dum {

void GroupBatch::validate() const {
  if (m == 0) throw std::invalid_argument("GroupBatch: m must be at least 1");
  if (group_count == 0) {
    throw std::invalid_argument("GroupBatch: batch holds no groups");
  }
  if (data.cols() == 0) throw std::invalid_argument("GroupBatch: zero-dim data");
  if (data.rows() != group_count * group_rows()) {
    throw DimensionError("GroupBatch: data has " + std::to_string(data.rows()) +
                         " rows, expected group_count * 2m = " +
                         std::to_string(group_count * group_rows()));
  }
}

void LossConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("LossConfig: temperature must be positive");
  }
}

namespace {

// Fused per-group halves plus everything backward needs to retrace them.
struct FusedBatch {
  VarianceNet::Forward fwd;
  std::vector<PoEGaussian> half_a, half_b;  // one per group
  std::vector<Vec> z_a, z_b;                // fused means, normalized if asked
  std::vector<double> norm_a, norm_b;       // pre-normalization L2 norms
};

std::vector<DiagGaussian> experts_at(const GroupBatch& batch,
                                     const Matrix& variance,
                                     std::size_t first_row, std::size_t count) {
  std::vector<DiagGaussian> experts;
  experts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = first_row + i;
    experts.push_back({batch.data.row_vec(r), variance.row_vec(r)});
  }
  return experts;
}

Vec normalized(const Vec& v, double& norm_out) {
  norm_out = std::sqrt(dot(v, v));
  if (norm_out == 0.0) {
    throw DomainError("cannot normalize a zero fused mean");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm_out;
  return out;
}

// Backward of y = x / ||x||: dx = (g - (g . y) y) / ||x||.
Vec normalize_backward(const Vec& y, double norm, const Vec& grad) {
  const double gy = dot(grad, y);
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = (grad[i] - gy * y[i]) / norm;
  }
  return out;
}

FusedBatch fuse_halves(const GroupBatch& batch, const VarianceNet& net,
                       bool normalize) {
  FusedBatch out;
  out.fwd = net.forward(batch.data);
  out.half_a.reserve(batch.group_count);
  out.half_b.reserve(batch.group_count);
  for (std::size_t g = 0; g < batch.group_count; ++g) {
    const std::size_t base = g * batch.group_rows();
    auto ea = experts_at(batch, out.fwd.variance, base, batch.m);
    auto eb = experts_at(batch, out.fwd.variance, base + batch.m, batch.m);
    out.half_a.push_back(poe_combine(ea));
    out.half_b.push_back(poe_combine(eb));
    if (normalize) {
      double na = 0.0, nb = 0.0;
      out.z_a.push_back(normalized(out.half_a.back().mean, na));
      out.z_b.push_back(normalized(out.half_b.back().mean, nb));
      out.norm_a.push_back(na);
      out.norm_b.push_back(nb);
    } else {
      out.z_a.push_back(out.half_a.back().mean);
      out.z_b.push_back(out.half_b.back().mean);
      out.norm_a.push_back(1.0);
      out.norm_b.push_back(1.0);
    }
  }
  return out;
}

// Routes dL/dz_A, dL/dz_B back through the fusion into the network. Expert
// means are the fixed input embeddings, so their gradients are dropped; only
// the variance path reaches parameters. The fused variances never enter the
// loss directly, hence the zero upstream variance gradient.
void backprop_through_fusion(const GroupBatch& batch, const FusedBatch& fused,
                             const std::vector<Vec>& grad_z_a,
                             const std::vector<Vec>& grad_z_b,
                             VarianceNet& net, bool normalize) {
  const std::size_t d = batch.data.cols();
  Matrix variance_grad(batch.data.rows(), d);
  const Vec zero(d, 0.0);
  auto route_half = [&](std::size_t first_row, const PoEGaussian& combined,
                        const Vec& z, double norm, const Vec& grad_z) {
    Vec grad_mean = normalize ? normalize_backward(z, norm, grad_z) : grad_z;
    auto experts = experts_at(batch, fused.fwd.variance, first_row, batch.m);
    PoEGrads grads = poe_backward(experts, combined, grad_mean, zero);
    for (std::size_t i = 0; i < batch.m; ++i) {
      auto row = variance_grad.row(first_row + i);
      for (std::size_t j = 0; j < d; ++j) row[j] += grads.variance[i][j];
    }
  };
  for (std::size_t g = 0; g < batch.group_count; ++g) {
    const std::size_t base = g * batch.group_rows();
    route_half(base, fused.half_a[g], fused.z_a[g], fused.norm_a[g],
               grad_z_a[g]);
    route_half(base + batch.m, fused.half_b[g], fused.z_b[g], fused.norm_b[g],
               grad_z_b[g]);
  }
  net.backward(fused.fwd, variance_grad);
}

void require_finite_loss(double loss, const char* variant) {
  if (!std::isfinite(loss)) {
    throw DivergenceError(std::string(variant) + " loss is non-finite", 0, 0);
  }
}

}  // namespace

double dum_loss_plain(const GroupBatch& batch, VarianceNet& net,
                      bool normalize_means) {
  batch.validate();
  FusedBatch fused = fuse_halves(batch, net, normalize_means);
  const double inv_b = 1.0 / static_cast<double>(batch.group_count);

  double loss = 0.0;
  for (std::size_t g = 0; g < batch.group_count; ++g) {
    loss += dot(fused.z_a[g], fused.z_b[g]);
  }
  loss *= -inv_b;
  require_finite_loss(loss, "plain-dot");

  std::vector<Vec> grad_z_a(batch.group_count), grad_z_b(batch.group_count);
  for (std::size_t g = 0; g < batch.group_count; ++g) {
    const std::size_t d = fused.z_a[g].size();
    grad_z_a[g].resize(d);
    grad_z_b[g].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      grad_z_a[g][j] = -inv_b * fused.z_b[g][j];
      grad_z_b[g][j] = -inv_b * fused.z_a[g][j];
    }
  }
  backprop_through_fusion(batch, fused, grad_z_a, grad_z_b, net,
                          normalize_means);
  return loss;
}

double dum_loss_infonce(const GroupBatch& batch, VarianceNet& net,
                        const LossConfig& cfg) {
  batch.validate();
  cfg.validate();
  if (batch.group_count < 2) {
    throw std::invalid_argument(
        "infonce needs at least two groups per batch so every positive has a "
        "negative; use the plain variant for single-group batches");
  }
  FusedBatch fused = fuse_halves(batch, net, cfg.normalize_means);
  const std::size_t b = batch.group_count;
  const double inv_tau = 1.0 / cfg.temperature;
  const double weight = 1.0 / (2.0 * static_cast<double>(b));

  Matrix logits(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      logits.at(i, j) = dot(fused.z_a[i], fused.z_b[j]) * inv_tau;
    }
  }

  // Cross-entropy along rows (A classifies B) and columns (B classifies A),
  // each stabilized with a max shift; grad of each direction is
  // softmax - onehot on the diagonal.
  double total = 0.0;
  Matrix grad_logits(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    double mx = logits.at(i, 0);
    for (std::size_t j = 1; j < b; ++j) mx = std::max(mx, logits.at(i, j));
    double sum_exp = 0.0;
    for (std::size_t j = 0; j < b; ++j) sum_exp += std::exp(logits.at(i, j) - mx);
    const double lse = mx + std::log(sum_exp);
    total += lse - logits.at(i, i);
    for (std::size_t j = 0; j < b; ++j) {
      grad_logits.at(i, j) += weight * std::exp(logits.at(i, j) - lse);
    }
    grad_logits.at(i, i) -= weight;
  }
  for (std::size_t j = 0; j < b; ++j) {
    double mx = logits.at(0, j);
    for (std::size_t i = 1; i < b; ++i) mx = std::max(mx, logits.at(i, j));
    double sum_exp = 0.0;
    for (std::size_t i = 0; i < b; ++i) sum_exp += std::exp(logits.at(i, j) - mx);
    const double lse = mx + std::log(sum_exp);
    total += lse - logits.at(j, j);
    for (std::size_t i = 0; i < b; ++i) {
      grad_logits.at(i, j) += weight * std::exp(logits.at(i, j) - lse);
    }
    grad_logits.at(j, j) -= weight;
  }
  const double loss = total * weight;
  require_finite_loss(loss, "infonce");

  const std::size_t d = batch.data.cols();
  std::vector<Vec> grad_z_a(b, Vec(d, 0.0)), grad_z_b(b, Vec(d, 0.0));
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double w = grad_logits.at(i, j) * inv_tau;
      for (std::size_t k = 0; k < d; ++k) {
        grad_z_a[i][k] += w * fused.z_b[j][k];
        grad_z_b[j][k] += w * fused.z_a[i][k];
      }
    }
  }
  backprop_through_fusion(batch, fused, grad_z_a, grad_z_b, net,
                          cfg.normalize_means);
  return loss;
}

double dum_loss(const GroupBatch& batch, VarianceNet& net,
                const LossConfig& cfg) {
  if (cfg.variant == LossConfig::Variant::plain_dot) {
    return dum_loss_plain(batch, net, cfg.normalize_means);
  }
  return dum_loss_infonce(batch, net, cfg);
}

}  // namespace dum
