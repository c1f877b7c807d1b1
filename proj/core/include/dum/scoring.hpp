#pragma once

#include <filesystem>
#include <vector>

#include "dum/matrix.hpp"
#include "dum/variance_net.hpp"

namespace dum {

// How a point's per-dimension variances collapse into one scalar.
enum class NormKind { l2, l1, max };

// The anomaly score: the norm of the predicted variance vector. Points the
// model is uncertain about score high.
Vec score(const VarianceNet& net, const Matrix& data,
          NormKind norm = NormKind::l2);

double variance_norm(std::span<const double> variance, NormKind norm);

struct ScoredDataset {
  Vec scores;
  std::vector<int> labels;  // empty when the file had no label column
};

// Score files are CSV with a header: index,score or index,score,label.
// Scores round-trip bit for bit.
void save_scores(const std::filesystem::path& file, const Vec& scores,
                 const std::vector<int>& labels = {});
ScoredDataset load_scores(const std::filesystem::path& file);

}  // namespace dum
