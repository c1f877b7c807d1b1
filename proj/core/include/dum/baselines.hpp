#pragma once

#include <cstddef>
#include <cstdint>

#include "dum/matrix.hpp"

namespace dum {

// Unsupervised reference scorers. All score every row of the given data
// against the rest of it (higher = more anomalous) and are deterministic for
// a fixed seed regardless of evaluation order.

// Euclidean distance to the k-th nearest neighbour, the point itself
// excluded. k must lie in [1, n-1].
Vec knn_score(const Matrix& data, std::size_t k);

struct LesinnConfig {
  std::size_t subsample_size = 8;   // s: points per subsample
  std::size_t ensemble_size = 50;   // e: subsamples per point
  std::uint64_t seed = 0;
};

// Least-similar nearest neighbours: for each point, average over e random
// subsamples (drawn without replacement from the other points) of the
// distance to the nearest subsample member. With e = 1 and s = n - 1 this is
// exactly the 1-NN distance.
Vec lesinn_score(const Matrix& data, const LesinnConfig& cfg = {});

struct IForestConfig {
  std::size_t tree_count = 100;
  std::size_t subsample_size = 256;  // capped at n
  std::uint64_t seed = 0;
};

// Isolation forest anomaly score 2^(-E[h(x)] / c(psi)). Constant data scores
// exactly 0.5 everywhere.
Vec iforest_score(const Matrix& data, const IForestConfig& cfg = {});

// Expected path length of an unsuccessful binary search over n values,
// c(n) = 2 H(n-1) - 2 (n-1)/n; the normalizer in the isolation forest score.
double average_path_length(double n);

}  // namespace dum
