#pragma once

#include <cstddef>

#include "dum/matrix.hpp"
#include "dum/variance_net.hpp"

namespace dum {

// A minibatch of groups. Each group is 2m embeddings stored as consecutive
// rows; the first m rows form one half, the last m the other.
struct GroupBatch {
  Matrix data;  // (group_count * 2m) x d
  std::size_t m = 1;
  std::size_t group_count = 0;

  std::size_t group_rows() const { return 2 * m; }
  void validate() const;  // throws on malformed batches
};

struct LossConfig {
  enum class Variant { plain_dot, infonce };
  Variant variant = Variant::plain_dot;
  double temperature = 0.07;     // only used by infonce
  bool normalize_means = true;   // L2-normalize fused means before the loss

  void validate() const;
};

// Both losses fuse each half of a group into a single Gaussian via the
// product of experts and compare the fused means z_A, z_B. Parameter
// gradients are accumulated into the network (callers zero them between
// steps); the returned value is the scalar loss. Throws DivergenceError if
// the loss is non-finite.

// loss = -(1/B) * sum_g z_A(g) . z_B(g)
// Negated so that minimizing raises the alignment of the fused means.
double dum_loss_plain(const GroupBatch& batch, VarianceNet& net,
                      bool normalize_means = false);

// Symmetric InfoNCE over cross-group negatives: logits
// L[a][b] = z_A(a) . z_B(b) / tau, cross-entropy with positives on the
// diagonal, averaged over both directions. Requires at least two groups;
// with one group use the plain variant.
double dum_loss_infonce(const GroupBatch& batch, VarianceNet& net,
                        const LossConfig& cfg);

// Dispatch on cfg.variant.
double dum_loss(const GroupBatch& batch, VarianceNet& net, const LossConfig& cfg);

}  // namespace dum
