#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dum/matrix.hpp"
#include "dum/rng.hpp"

namespace dum {

// A loaded table of embeddings plus optional binary anomaly labels
// (1 = anomalous) and the column names from the header, if any.
struct EmbeddingBatch {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> column_names;

  bool has_labels() const { return !labels.empty(); }
};

enum class HeaderMode { detect, present, absent };

// How raw label tokens map onto {0, 1}.
struct LabelRule {
  enum class Kind { none, tokens, least_frequent };
  Kind kind = Kind::none;
  std::vector<std::string> positives;  // for Kind::tokens
};

struct LoadOptions {
  char delimiter = ',';
  HeaderMode header = HeaderMode::detect;
  std::string missing_token = "?";  // this token (or an empty cell) reads as 0
  std::optional<std::size_t> label_column;  // 0-based, on the file as stored
  LabelRule label_rule;
  // When no label column is given, a header column named exactly "label" is
  // used as one. This keeps files written by save_csv round-trippable.
  bool auto_label = true;
};

// Reads a delimited text file. Numeric parsing failures, ragged rows and
// out-of-range label columns raise ParseError carrying the 1-based row and
// column. With HeaderMode::detect the first line becomes a header iff at
// least one of its fields is non-numeric. Without a LabelRule, label cells
// must literally read 0 or 1.
EmbeddingBatch load_csv(const std::filesystem::path& file,
                        const LoadOptions& opts = {});

// Writes features (and labels, when present, as a trailing "label" column)
// with enough digits that loading reproduces every double bit for bit.
void save_csv(const std::filesystem::path& file, const EmbeddingBatch& batch,
              char delimiter = ',');

// Per-column affine map onto [0, 1] fitted on one matrix and applicable to
// another (columns that were constant at fit time map to 0).
struct MinMaxScaler {
  Vec min, max;

  void fit(const Matrix& data);
  Matrix apply(const Matrix& data) const;
  bool fitted() const { return !min.empty(); }
};

// Fit-and-apply on the same data.
Matrix minmax_scale(const Matrix& data);

enum class CorruptKind {
  gaussian,         // add N(0, sigma^2) noise to every entry
  uniform,          // add U(-amplitude, amplitude) noise to every entry
  impulse,          // replace entries with +-magnitude at the given rate
  feature_dropout,  // zero entries independently with probability `dropout`
  scale,            // multiply everything by `factor` (deterministic)
  smooth            // moving average along the feature axis (deterministic)
};

struct CorruptConfig {
  CorruptKind kind = CorruptKind::gaussian;
  double sigma = 0.2;
  double amplitude = 0.2;
  double rate = 0.05;
  double magnitude = 1.0;
  double dropout = 0.2;
  double factor = 2.0;
  std::size_t window = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

Matrix corrupt(const Matrix& data, const CorruptConfig& cfg);
// Same, drawing randomness from a caller-owned stream (used by training
// augmentation so draws stay attributable to one split seed).
Matrix corrupt_with(const Matrix& data, const CorruptConfig& cfg, Rng& rng);

struct SynthConfig {
  enum class Preset { clusters, clusters_plus_outliers };
  Preset preset = Preset::clusters_plus_outliers;
  std::size_t n_inliers = 2000;
  std::size_t n_outliers = 100;  // only clusters_plus_outliers
  std::size_t dim = 10;
  std::size_t cluster_count = 3;
  double spread = 0.035;  // within-cluster standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

// Gaussian clusters with centers inside the unit box; the outlier preset
// additionally scatters points uniformly over the whole box, labeled 1.
// Rows come out shuffled but reproducibly so for a fixed config.
EmbeddingBatch synthesize(const SynthConfig& cfg);

// A dataset preparation recipe: which files to read and how to turn them
// into features plus binary labels. Parsed from a small key: value text
// format (see load_recipe).
struct Recipe {
  std::string name;
  std::vector<std::string> files;  // resolved against a data directory
  enum class Concat { rows, columns } concat = Concat::rows;
  char delimiter = ',';
  HeaderMode header = HeaderMode::detect;
  std::string missing_token = "?";
  bool drop_rows_with_missing = false;
  std::vector<std::size_t> drop_columns;  // 0-based, on the file as stored
  std::optional<std::size_t> label_column;
  std::optional<std::size_t> rowblock;  // derive labels from row position:
                                        // label token = row / rowblock
  std::vector<std::string> keep_labels;  // drop rows with any other token
  LabelRule label_rule;
  bool flip_labels = false;
};

// Text format: one "key: value" per line, '#' comments, lists separated by
// commas. Keys: name, files, concat, delimiter, header, missing,
// drop_rows_with_missing, drop_columns, label_column, rowblock_labels,
// keep_labels, positive_label, positive_least_frequent, flip_labels.
// Unknown keys raise ParseError.
Recipe load_recipe(const std::filesystem::path& file);

EmbeddingBatch load_with_recipe(const Recipe& recipe,
                                const std::filesystem::path& data_dir);

}  // namespace dum
