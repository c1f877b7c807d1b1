#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dum/loss.hpp"
#include "dum/matrix.hpp"
#include "dum/variance_net.hpp"

namespace dum {

// How the 2m views of a data point are produced.
struct AugmentConfig {
  enum class Kind { identity, gaussian_jitter, feature_dropout };
  Kind kind = Kind::gaussian_jitter;
  double sigma = 0.2;     // gaussian_jitter noise sd
  double dropout = 0.1;   // feature_dropout zeroing probability

  void validate() const;
};

struct TrainConfig {
  std::size_t hidden_dim = 64;
  std::size_t m = 2;              // experts fused per group half
  std::size_t batch_groups = 128; // data points (groups) per optimizer step
  std::size_t epochs = 40;
  std::uint64_t seed = 0;
  AdamConfig adam;
  LossConfig loss;
  AugmentConfig augment;

  void validate() const;
};

struct TrainResult {
  VarianceNet net;
  std::vector<double> epoch_mean_loss;  // one entry per epoch
};

// Trains a fresh network on the given embeddings. Each epoch reshuffles the
// points, cuts them into batches of batch_groups (remainder dropped), builds
// 2m augmented views per point and takes one Adam step per batch. Fully
// deterministic for a fixed config: reruns produce bit-identical parameters.
// Throws DivergenceError, tagged with epoch and step, if a loss or gradient
// goes non-finite.
TrainResult train(const Matrix& data, const TrainConfig& cfg);

// One epoch's grouping of point indices: shuffled, chopped into batches of
// batch_groups points, remainder dropped. Exposed for tests.
std::vector<std::vector<std::size_t>> make_epoch_batches(std::size_t n,
                                                         std::size_t batch_groups,
                                                         std::uint64_t seed,
                                                         std::size_t epoch);

}  // namespace dum
