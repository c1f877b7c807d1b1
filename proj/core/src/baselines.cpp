#include "dum/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dum/rng.hpp"

namespace dum {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double ssq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    ssq += diff * diff;
  }
  return std::sqrt(ssq);
}

void require_rows(const Matrix& data, std::size_t minimum, const char* who) {
  if (data.rows() < minimum) {
    throw std::invalid_argument(std::string(who) + " needs at least " +
                                std::to_string(minimum) + " points");
  }
}

}  // namespace

Vec knn_score(const Matrix& data, std::size_t k) {
  require_rows(data, 2, "knn_score");
  const std::size_t n = data.rows();
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("knn_score: k must lie in [1, n-1]");
  }
  Vec out(n);
  std::vector<double> dists(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dists[w++] = euclidean(data.row(i), data.row(j));
    }
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    out[i] = dists[k - 1];
  }
  return out;
}

Vec lesinn_score(const Matrix& data, const LesinnConfig& cfg) {
  require_rows(data, 2, "lesinn_score");
  const std::size_t n = data.rows();
  if (cfg.subsample_size < 1 || cfg.subsample_size > n - 1) {
    throw std::invalid_argument("lesinn_score: subsample_size must lie in [1, n-1]");
  }
  if (cfg.ensemble_size < 1) {
    throw std::invalid_argument("lesinn_score: ensemble_size must be at least 1");
  }

  Vec out(n);
  std::vector<std::size_t> candidates(n - 1);
  std::vector<std::size_t> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) candidates[w++] = j;
    }
    double total = 0.0;
    for (std::size_t e = 0; e < cfg.ensemble_size; ++e) {
      // One stream per (point, member): scores do not depend on the order
      // points are visited in.
      Rng rng(split_seed(cfg.seed, i * cfg.ensemble_size + e));
      scratch = candidates;
      double nearest = std::numeric_limits<double>::infinity();
      // Partial Fisher-Yates; the first s entries become the subsample.
      for (std::size_t t = 0; t < cfg.subsample_size; ++t) {
        const std::size_t pick = t + rng.uniform_index(scratch.size() - t);
        std::swap(scratch[t], scratch[pick]);
        nearest = std::min(nearest, euclidean(data.row(i), data.row(scratch[t])));
      }
      total += nearest;
    }
    out[i] = total / static_cast<double>(cfg.ensemble_size);
  }
  return out;
}

double average_path_length(double n) {
  if (n <= 1.0) return 0.0;
  if (n == 2.0) return 1.0;
  constexpr double kEulerGamma = 0.5772156649015329;
  const double harmonic = std::log(n - 1.0) + kEulerGamma;
  return 2.0 * harmonic - 2.0 * (n - 1.0) / n;
}

namespace {

struct IsolationNode {
  std::size_t size = 0;           // leaf population
  int feature = -1;               // -1 marks a leaf
  double split = 0.0;
  std::unique_ptr<IsolationNode> left, right;
};

std::unique_ptr<IsolationNode> build_isolation_tree(
    const Matrix& data, std::vector<std::size_t>& rows, std::size_t begin,
    std::size_t end, std::size_t depth, std::size_t height_limit, Rng& rng) {
  auto node = std::make_unique<IsolationNode>();
  node->size = end - begin;
  if (node->size <= 1 || depth >= height_limit) return node;

  // Candidate features are those not constant across the node, scanned in
  // index order so the choice is reproducible.
  const std::size_t d = data.cols();
  std::vector<std::size_t> usable;
  std::vector<double> lo(d), hi(d);
  for (std::size_t f = 0; f < d; ++f) {
    double mn = data.at(rows[begin], f);
    double mx = mn;
    for (std::size_t r = begin + 1; r < end; ++r) {
      const double v = data.at(rows[r], f);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    lo[f] = mn;
    hi[f] = mx;
    if (mx > mn) usable.push_back(f);
  }
  if (usable.empty()) return node;  // all points identical

  const std::size_t f = usable[rng.uniform_index(usable.size())];
  const double split = rng.uniform(lo[f], hi[f]);
  auto mid_it = std::partition(
      rows.begin() + begin, rows.begin() + end,
      [&](std::size_t r) { return data.at(r, f) < split; });
  const std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

  node->feature = static_cast<int>(f);
  node->split = split;
  node->left = build_isolation_tree(data, rows, begin, mid, depth + 1,
                                    height_limit, rng);
  node->right = build_isolation_tree(data, rows, mid, end, depth + 1,
                                     height_limit, rng);
  return node;
}

double isolation_path_length(const IsolationNode& root, const Matrix& data,
                             std::size_t row) {
  const IsolationNode* node = &root;
  double depth = 0.0;
  while (node->feature >= 0) {
    node = data.at(row, static_cast<std::size_t>(node->feature)) < node->split
               ? node->left.get()
               : node->right.get();
    depth += 1.0;
  }
  return depth + average_path_length(static_cast<double>(node->size));
}

}  // namespace

Vec iforest_score(const Matrix& data, const IForestConfig& cfg) {
  require_rows(data, 2, "iforest_score");
  if (cfg.tree_count < 1) {
    throw std::invalid_argument("iforest_score: tree_count must be at least 1");
  }
  if (cfg.subsample_size < 2) {
    throw std::invalid_argument("iforest_score: subsample_size must be at least 2");
  }
  const std::size_t n = data.rows();
  const std::size_t psi = std::min(cfg.subsample_size, n);
  const std::size_t height_limit =
      static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));

  std::vector<std::unique_ptr<IsolationNode>> forest;
  forest.reserve(cfg.tree_count);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < cfg.tree_count; ++t) {
    Rng rng(split_seed(cfg.seed, t));
    rows = all;
    for (std::size_t i = 0; i < psi; ++i) {
      const std::size_t pick = i + rng.uniform_index(rows.size() - i);
      std::swap(rows[i], rows[pick]);
    }
    rows.resize(psi);
    forest.push_back(
        build_isolation_tree(data, rows, 0, psi, 0, height_limit, rng));
  }

  // Each path length is normalized before averaging so that a forest of
  // unsplittable trees lands on 2^-1 = 0.5 without rounding residue.
  const double normalizer = average_path_length(static_cast<double>(psi));
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (const auto& tree : forest) {
      total += isolation_path_length(*tree, data, i) / normalizer;
    }
    out[i] = std::pow(2.0, -total / static_cast<double>(cfg.tree_count));
  }
  return out;
}

}  // namespace dum
