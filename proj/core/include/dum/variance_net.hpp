#pragma once

#include <cstdint>
#include <span>

#include "dum/gaussian.hpp"
#include "dum/matrix.hpp"

namespace dum {

// Log-variance clamp. exp of this range stays strictly inside the variance
// clamp [1e-6, 1e6].
inline constexpr double kLogVarianceClamp = 13.8;

// Three-layer MLP, input d -> hidden h -> hidden h -> output d, ReLU between
// layers. The output row is read as per-dimension log-variance; the mean of
// the predicted Gaussian is always the input embedding itself, so the
// network can only shape uncertainty.
class VarianceNet {
 public:
  VarianceNet(std::size_t input_dim, std::size_t hidden_dim);

  // He-style uniform fan-in init for the hidden layers; the final layer is
  // zero-initialized so an untrained net predicts unit variance everywhere.
  void init(std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

  // Activations cached for the backward pass.
  struct Forward {
    Matrix input;       // N x d
    Matrix pre1, act1;  // N x h
    Matrix pre2, act2;  // N x h
    Matrix pre3;        // N x d, unclamped log-variance
    Matrix log_var;     // N x d, clamped
    Matrix variance;    // N x d, exp(log_var)
  };

  Forward forward(const Matrix& embeddings) const;

  // Accumulates parameter gradients from dL/d(variance) and returns
  // dL/d(input); the clamp gates gradients to zero where it was active.
  Matrix backward(const Forward& fwd, const Matrix& variance_grad);

  // Parameters in declared layer order: w1, b1, w2, b2, w3, b3.
  std::span<ParamTensor> params() { return params_; }
  std::span<const ParamTensor> params() const { return params_; }

  void zero_grads();

  bool operator==(const VarianceNet& other) const;

 private:
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  // w1 (d x h), b1 (1 x h), w2 (h x h), b2 (1 x h), w3 (h x d), b3 (1 x d)
  std::vector<ParamTensor> params_;
};

// Maps an embedding to its uncertainty Gaussian. The returned mean is the
// input embedding, bit-identical; the variance is exp of the clamped
// network output. Throws DimensionError when the embedding width does not
// match the network input.
DiagGaussian encode_expert(const VarianceNet& net, std::span<const double> embedding);

}  // namespace dum
