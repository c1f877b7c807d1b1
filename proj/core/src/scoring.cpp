#include "dum/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dum/dataset.hpp"
#include "dum/errors.hpp"

namespace dum {

double variance_norm(std::span<const double> variance, NormKind norm) {
  switch (norm) {
    case NormKind::l2: {
      double ssq = 0.0;
      for (double v : variance) ssq += v * v;
      return std::sqrt(ssq);
    }
    case NormKind::l1: {
      double total = 0.0;
      for (double v : variance) total += std::fabs(v);
      return total;
    }
    case NormKind::max: {
      double best = 0.0;
      for (double v : variance) best = std::max(best, std::fabs(v));
      return best;
    }
  }
  throw std::invalid_argument("unknown norm kind");
}

Vec score(const VarianceNet& net, const Matrix& data, NormKind norm) {
  if (data.cols() != net.input_dim()) {
    throw DimensionError("score: data width " + std::to_string(data.cols()) +
                         " does not match model input " +
                         std::to_string(net.input_dim()));
  }
  const auto fwd = net.forward(data);
  Vec out(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out[r] = variance_norm(fwd.variance.row(r), norm);
  }
  return out;
}

void save_scores(const std::filesystem::path& file, const Vec& scores,
                 const std::vector<int>& labels) {
  if (!labels.empty() && labels.size() != scores.size()) {
    throw DimensionError("save_scores: labels do not match score count");
  }
  std::ofstream out(file);
  if (!out) {
    throw ParseError("cannot write " + file.string());
  }
  out << (labels.empty() ? "index,score" : "index,score,label") << '\n';
  char buf[32];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
    out << i << ',' << buf;
    if (!labels.empty()) out << ',' << labels[i];
    out << '\n';
  }
  if (!out) {
    throw ParseError("write to " + file.string() + " failed");
  }
}

ScoredDataset load_scores(const std::filesystem::path& file) {
  LoadOptions opts;
  opts.header = HeaderMode::present;
  EmbeddingBatch batch = load_csv(file, opts);
  const auto& names = batch.column_names;
  const auto it = std::find(names.begin(), names.end(), "score");
  if (it == names.end()) {
    throw ParseError(file.string() + " has no \"score\" column");
  }
  const std::size_t col = static_cast<std::size_t>(it - names.begin());

  ScoredDataset out;
  out.scores.resize(batch.features.rows());
  for (std::size_t r = 0; r < batch.features.rows(); ++r) {
    out.scores[r] = batch.features.at(r, col);
  }
  out.labels = std::move(batch.labels);
  return out;
}

}  // namespace dum
