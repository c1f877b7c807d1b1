#include "dum/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dum/errors.hpp"
#include "dum/rng.hpp"

namespace dum {

namespace {

// Seed streams, kept distinct so e.g. changing the epoch count never
// perturbs the initializer.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kAugmentStream = 3;

}  // namespace

void AugmentConfig::validate() const {
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw std::invalid_argument("augment: sigma must be non-negative");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("augment: dropout must lie in [0, 1)");
  }
}

void TrainConfig::validate() const {
  if (hidden_dim < 1) {
    throw std::invalid_argument("train: hidden_dim must be at least 1");
  }
  if (m < 1) throw std::invalid_argument("train: m must be at least 1");
  if (batch_groups < 1) {
    throw std::invalid_argument("train: batch_groups must be at least 1");
  }
  if (loss.variant == LossConfig::Variant::infonce && batch_groups < 2) {
    throw std::invalid_argument(
        "train: infonce needs at least two groups per batch");
  }
  if (epochs < 1) throw std::invalid_argument("train: epochs must be at least 1");
  if (!(adam.learning_rate > 0.0)) {
    throw std::invalid_argument("train: learning rate must be positive");
  }
  loss.validate();
  augment.validate();
}

std::vector<std::vector<std::size_t>> make_epoch_batches(
    std::size_t n, std::size_t batch_groups, std::uint64_t seed,
    std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(split_seed(split_seed(seed, kShuffleStream), epoch));
  rng.shuffle(order);

  std::vector<std::vector<std::size_t>> batches;
  batches.reserve(n / batch_groups);
  for (std::size_t start = 0; start + batch_groups <= n; start += batch_groups) {
    batches.emplace_back(order.begin() + start,
                         order.begin() + start + batch_groups);
  }
  return batches;
}

namespace {

void augment_row(const Matrix& data, std::size_t row, const AugmentConfig& cfg,
                 Rng& rng, std::span<double> out) {
  const auto src = data.row(row);
  switch (cfg.kind) {
    case AugmentConfig::Kind::identity:
      for (std::size_t j = 0; j < src.size(); ++j) out[j] = src[j];
      break;
    case AugmentConfig::Kind::gaussian_jitter:
      for (std::size_t j = 0; j < src.size(); ++j) {
        out[j] = src[j] + rng.normal() * cfg.sigma;
      }
      break;
    case AugmentConfig::Kind::feature_dropout:
      for (std::size_t j = 0; j < src.size(); ++j) {
        out[j] = rng.uniform() < cfg.dropout ? 0.0 : src[j];
      }
      break;
  }
}

GroupBatch build_group_batch(const Matrix& data,
                             const std::vector<std::size_t>& points,
                             std::size_t m, const AugmentConfig& aug,
                             Rng& rng) {
  GroupBatch batch;
  batch.m = m;
  batch.group_count = points.size();
  batch.data = Matrix(points.size() * 2 * m, data.cols());
  std::size_t r = 0;
  for (std::size_t p : points) {
    for (std::size_t view = 0; view < 2 * m; ++view) {
      augment_row(data, p, aug, rng, batch.data.row(r++));
    }
  }
  return batch;
}

}  // namespace

TrainResult train(const Matrix& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.rows() < cfg.batch_groups) {
    throw std::invalid_argument(
        "train: fewer data points than batch_groups; no full batch to step on");
  }
  if (!data.all_finite()) {
    throw DomainError("train: data contains non-finite values");
  }

  VarianceNet net(data.cols(), cfg.hidden_dim);
  net.init(split_seed(cfg.seed, kInitStream));
  std::vector<AdamState> opt;
  opt.reserve(net.params().size());
  for (const auto& p : net.params()) opt.emplace_back(p.value);

  std::vector<double> epoch_losses;
  epoch_losses.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches =
        make_epoch_batches(data.rows(), cfg.batch_groups, cfg.seed, epoch);
    Rng aug_rng(split_seed(split_seed(cfg.seed, kAugmentStream), epoch));
    double total = 0.0;
    for (std::size_t step = 0; step < batches.size(); ++step) {
      GroupBatch batch =
          build_group_batch(data, batches[step], cfg.m, cfg.augment, aug_rng);
      net.zero_grads();
      double loss = 0.0;
      try {
        loss = dum_loss(batch, net, cfg.loss);
        auto params = net.params();
        for (std::size_t i = 0; i < params.size(); ++i) {
          adam_step(params[i], opt[i], cfg.adam);
        }
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at epoch " +
                                  std::to_string(epoch) + ", step " +
                                  std::to_string(step) + ": " + e.what(),
                              static_cast<int>(epoch),
                              static_cast<long>(step));
      }
      total += loss;
    }
    epoch_losses.push_back(total / static_cast<double>(batches.size()));
  }
  return TrainResult{std::move(net), std::move(epoch_losses)};
}

}  // namespace dum
