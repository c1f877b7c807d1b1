#include "dum/variance_net.hpp"

#include <cmath>
#include <string>

#include "dum/errors.hpp"
#include "dum/rng.hpp"

namespace dum {

VarianceNet::VarianceNet(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  params_.emplace_back(Matrix(input_dim, hidden_dim));   // w1
  params_.emplace_back(Matrix(1, hidden_dim));           // b1
  params_.emplace_back(Matrix(hidden_dim, hidden_dim));  // w2
  params_.emplace_back(Matrix(1, hidden_dim));           // b2
  params_.emplace_back(Matrix(hidden_dim, input_dim));   // w3
  params_.emplace_back(Matrix(1, input_dim));            // b3
}

void VarianceNet::init(std::uint64_t seed) {
  Rng rng(seed);
  auto he_uniform = [&rng](Matrix& w, std::size_t fan_in) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < w.size(); ++i)
      w.data()[i] = rng.uniform(-bound, bound);
  };
  he_uniform(params_[0].value, input_dim_);
  params_[1].value.fill(0.0);
  he_uniform(params_[2].value, hidden_dim_);
  params_[3].value.fill(0.0);
  params_[4].value.fill(0.0);  // zero final layer: variance starts at exp(0)=1
  params_[5].value.fill(0.0);
  zero_grads();
}

VarianceNet::Forward VarianceNet::forward(const Matrix& embeddings) const {
  if (embeddings.cols() != input_dim_) {
    throw DimensionError("VarianceNet::forward: input dim " +
                         std::to_string(embeddings.cols()) + " vs network dim " +
                         std::to_string(input_dim_));
  }
  Forward f;
  f.input = embeddings;
  f.pre1 = add_row_broadcast(matmul(embeddings, params_[0].value),
                             params_[1].value.row_vec(0));
  f.act1 = relu(f.pre1);
  f.pre2 = add_row_broadcast(matmul(f.act1, params_[2].value),
                             params_[3].value.row_vec(0));
  f.act2 = relu(f.pre2);
  f.pre3 = add_row_broadcast(matmul(f.act2, params_[4].value),
                             params_[5].value.row_vec(0));
  f.log_var = clamp(f.pre3, -kLogVarianceClamp, kLogVarianceClamp);
  f.variance = exp(f.log_var);
  return f;
}

Matrix VarianceNet::backward(const Forward& fwd, const Matrix& variance_grad) {
  // d variance / d log_var = variance; the clamp zeroes saturated entries.
  Matrix g = mul(variance_grad, fwd.variance);
  g = clamp_backward(fwd.pre3, -kLogVarianceClamp, kLogVarianceClamp, g);

  auto [g_act2, g_w3] = matmul_backward(fwd.act2, params_[4].value, g);
  accumulate(params_[4].grad, g_w3);
  accumulate_row(params_[5].grad, col_sum(g));

  Matrix g_pre2 = relu_backward(fwd.pre2, g_act2);
  auto [g_act1, g_w2] = matmul_backward(fwd.act1, params_[2].value, g_pre2);
  accumulate(params_[2].grad, g_w2);
  accumulate_row(params_[3].grad, col_sum(g_pre2));

  Matrix g_pre1 = relu_backward(fwd.pre1, g_act1);
  auto [g_input, g_w1] = matmul_backward(fwd.input, params_[0].value, g_pre1);
  accumulate(params_[0].grad, g_w1);
  accumulate_row(params_[1].grad, col_sum(g_pre1));

  return g_input;
}

void VarianceNet::zero_grads() {
  for (auto& p : params_) p.zero_grad();
}

bool VarianceNet::operator==(const VarianceNet& other) const {
  if (input_dim_ != other.input_dim_ || hidden_dim_ != other.hidden_dim_)
    return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].value != other.params_[i].value) return false;
  }
  return true;
}

DiagGaussian encode_expert(const VarianceNet& net,
                           std::span<const double> embedding) {
  Matrix input(1, embedding.size(), Vec(embedding.begin(), embedding.end()));
  auto fwd = net.forward(input);
  return {Vec(embedding.begin(), embedding.end()), fwd.variance.row_vec(0)};
}

}  // namespace dum
