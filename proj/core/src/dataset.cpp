#include "dum/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "dum/errors.hpp"

namespace dum {

namespace {

std::string trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

ParseError parse_error(const std::string& msg, long row, long column = -1) {
  std::string full = msg;
  if (row > 0) {
    full += " (row " + std::to_string(row);
    if (column > 0) full += ", column " + std::to_string(column);
    full += ")";
  }
  return ParseError(full, row, column);
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct RawTable {
  std::vector<std::string> header;  // empty when the file had none
  std::vector<std::vector<std::string>> rows;

  std::size_t cols() const {
    return rows.empty() ? header.size() : rows.front().size();
  }
};

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(trimmed(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trimmed(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  // Space-delimited files routinely pad with runs of spaces; a run is one
  // separator there, so the empty tokens between are dropped.
  if (delimiter == ' ') {
    std::erase_if(fields, [](const std::string& f) { return f.empty(); });
  }
  return fields;
}

bool looks_numeric(const std::vector<std::string>& fields,
                   const std::string& missing_token) {
  for (const auto& f : fields) {
    if (f.empty() || f == missing_token) continue;
    double v = 0.0;
    if (!parse_double(f, v)) return false;
  }
  return true;
}

RawTable read_raw(const std::filesystem::path& file, char delimiter,
                  HeaderMode header, const std::string& missing_token) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open " + file.string());
  }
  RawTable table;
  std::string line;
  long line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    auto fields = split_fields(line, delimiter);
    if (first) {
      first = false;
      const bool take_header =
          header == HeaderMode::present ||
          (header == HeaderMode::detect && !looks_numeric(fields, missing_token));
      if (take_header) {
        table.header = std::move(fields);
        continue;
      }
    }
    if (!table.rows.empty() && fields.size() != table.rows.front().size()) {
      throw parse_error("ragged row: expected " +
                            std::to_string(table.rows.front().size()) +
                            " fields, found " + std::to_string(fields.size()),
                        line_no);
    }
    if (!table.header.empty() && fields.size() != table.header.size()) {
      throw parse_error("row does not match header width", line_no);
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.rows.empty()) {
    throw ParseError(file.string() + " holds no data rows");
  }
  return table;
}

bool is_missing(const std::string& cell, const std::string& missing_token) {
  return cell.empty() || cell == missing_token;
}

// Turns a raw table into features + labels following a recipe. Order:
// positional labels, explicit label column, row filters (keep list, missing
// drop), token -> {0,1} resolution, then numeric parsing of the kept columns.
EmbeddingBatch finalize(RawTable table, const Recipe& r) {
  const std::size_t ncols = table.cols();
  const long header_offset = table.header.empty() ? 0 : 1;
  auto file_row = [&](std::size_t i) {
    return static_cast<long>(i) + 1 + header_offset;
  };

  std::optional<std::size_t> label_column = r.label_column;
  if (label_column && *label_column >= ncols) {
    throw ParseError("label column " + std::to_string(*label_column) +
                     " out of range for " + std::to_string(ncols) + " columns");
  }
  if (label_column && r.rowblock) {
    throw std::invalid_argument(
        "recipe gives both a label column and positional labels");
  }

  // Columns that survive into the feature matrix.
  std::vector<bool> keep_col(ncols, true);
  for (std::size_t c : r.drop_columns) {
    if (c >= ncols) {
      throw ParseError("drop column " + std::to_string(c) +
                       " out of range for " + std::to_string(ncols) +
                       " columns");
    }
    keep_col[c] = false;
  }
  if (label_column) keep_col[*label_column] = false;

  // Raw label tokens, either positional or from the label column.
  std::vector<std::string> tokens;
  if (r.rowblock) {
    if (*r.rowblock == 0) {
      throw std::invalid_argument("rowblock size must be positive");
    }
    tokens.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      tokens.push_back(std::to_string(i / *r.rowblock));
    }
  } else if (label_column) {
    tokens.reserve(table.rows.size());
    for (const auto& row : table.rows) tokens.push_back(row[*label_column]);
  }

  if (!r.keep_labels.empty() && tokens.empty()) {
    throw std::invalid_argument("keep_labels requires a label source");
  }
  if (r.label_rule.kind != LabelRule::Kind::none && tokens.empty()) {
    throw std::invalid_argument("a label rule requires a label source");
  }

  // Row filtering.
  std::vector<std::size_t> keep_rows;
  keep_rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!r.keep_labels.empty() &&
        std::find(r.keep_labels.begin(), r.keep_labels.end(), tokens[i]) ==
            r.keep_labels.end()) {
      continue;
    }
    if (r.drop_rows_with_missing) {
      bool missing = false;
      for (std::size_t c = 0; c < ncols && !missing; ++c) {
        if (keep_col[c] && is_missing(table.rows[i][c], r.missing_token)) {
          missing = true;
        }
      }
      if (missing) continue;
    }
    keep_rows.push_back(i);
  }
  if (keep_rows.empty()) {
    throw ParseError("no rows left after filtering");
  }

  // Token -> {0,1}.
  std::vector<int> labels;
  if (!tokens.empty()) {
    std::vector<std::string> positives = r.label_rule.positives;
    if (r.label_rule.kind == LabelRule::Kind::least_frequent) {
      std::map<std::string, std::size_t> counts;
      for (std::size_t i : keep_rows) ++counts[tokens[i]];
      if (counts.size() < 2) {
        throw ParseError("least_frequent labeling needs at least two classes");
      }
      // std::map iterates in token order, so ties resolve to the
      // lexicographically smallest token.
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second < best->second) best = it;
      }
      positives = {best->first};
    }
    labels.reserve(keep_rows.size());
    for (std::size_t i : keep_rows) {
      int value = 0;
      if (r.label_rule.kind == LabelRule::Kind::none) {
        const std::string& t = tokens[i];
        if (t == "1") {
          value = 1;
        } else if (t == "0") {
          value = 0;
        } else {
          throw parse_error("label \"" + t +
                                "\" is not 0/1; give positive_label or "
                                "positive_least_frequent",
                            file_row(i));
        }
      } else {
        value = std::find(positives.begin(), positives.end(), tokens[i]) !=
                        positives.end()
                    ? 1
                    : 0;
      }
      if (r.flip_labels) value = 1 - value;
      labels.push_back(value);
    }
  }

  // Numeric parsing of the kept cells.
  std::size_t out_cols = 0;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (keep_col[c]) ++out_cols;
  }
  if (out_cols == 0) {
    throw ParseError("no feature columns left after drops");
  }
  Matrix features(keep_rows.size(), out_cols);
  for (std::size_t out_r = 0; out_r < keep_rows.size(); ++out_r) {
    const auto& row = table.rows[keep_rows[out_r]];
    std::size_t out_c = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!keep_col[c]) continue;
      const std::string& cell = row[c];
      double v = 0.0;
      if (!is_missing(cell, r.missing_token)) {
        if (!parse_double(cell, v)) {
          throw parse_error("cannot parse \"" + cell + "\" as a number",
                            file_row(keep_rows[out_r]),
                            static_cast<long>(c) + 1);
        }
        if (!std::isfinite(v)) {
          throw parse_error("non-finite value", file_row(keep_rows[out_r]),
                            static_cast<long>(c) + 1);
        }
      }
      features.at(out_r, out_c++) = v;
    }
  }

  EmbeddingBatch batch;
  batch.features = std::move(features);
  batch.labels = std::move(labels);
  if (table.header.size() == ncols) {
    for (std::size_t c = 0; c < ncols; ++c) {
      if (keep_col[c]) batch.column_names.push_back(table.header[c]);
    }
  }
  return batch;
}

}  // namespace

EmbeddingBatch load_csv(const std::filesystem::path& file,
                        const LoadOptions& opts) {
  RawTable table = read_raw(file, opts.delimiter, opts.header, opts.missing_token);

  Recipe r;
  r.delimiter = opts.delimiter;
  r.header = opts.header;
  r.missing_token = opts.missing_token;
  r.label_column = opts.label_column;
  r.label_rule = opts.label_rule;
  if (!r.label_column && opts.auto_label) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c] == "label") {
        r.label_column = c;
        break;
      }
    }
  }
  return finalize(std::move(table), r);
}

void save_csv(const std::filesystem::path& file, const EmbeddingBatch& batch,
              char delimiter) {
  if (!batch.column_names.empty() &&
      batch.column_names.size() != batch.features.cols()) {
    throw DimensionError("save_csv: column_names do not match feature width");
  }
  if (batch.has_labels() && batch.labels.size() != batch.features.rows()) {
    throw DimensionError("save_csv: labels do not match row count");
  }
  std::ofstream out(file);
  if (!out) {
    throw ParseError("cannot write " + file.string());
  }
  if (!batch.column_names.empty()) {
    for (std::size_t c = 0; c < batch.column_names.size(); ++c) {
      if (c) out << delimiter;
      out << batch.column_names[c];
    }
    if (batch.has_labels()) out << delimiter << "label";
    out << '\n';
  }
  char buf[32];
  for (std::size_t r = 0; r < batch.features.rows(); ++r) {
    for (std::size_t c = 0; c < batch.features.cols(); ++c) {
      if (c) out << delimiter;
      // 17 significant digits: loading reproduces the double exactly.
      std::snprintf(buf, sizeof buf, "%.17g", batch.features.at(r, c));
      out << buf;
    }
    if (batch.has_labels()) out << delimiter << batch.labels[r];
    out << '\n';
  }
  if (!out) {
    throw ParseError("write to " + file.string() + " failed");
  }
}

void MinMaxScaler::fit(const Matrix& data) {
  if (data.rows() == 0 || data.cols() == 0) {
    throw std::invalid_argument("MinMaxScaler: nothing to fit on");
  }
  min.assign(data.cols(), 0.0);
  max.assign(data.cols(), 0.0);
  for (std::size_t c = 0; c < data.cols(); ++c) {
    double lo = data.at(0, c), hi = data.at(0, c);
    for (std::size_t r = 1; r < data.rows(); ++r) {
      lo = std::min(lo, data.at(r, c));
      hi = std::max(hi, data.at(r, c));
    }
    min[c] = lo;
    max[c] = hi;
  }
}

Matrix MinMaxScaler::apply(const Matrix& data) const {
  if (!fitted()) {
    throw std::invalid_argument("MinMaxScaler: apply before fit");
  }
  if (data.cols() != min.size()) {
    throw DimensionError("MinMaxScaler: data width does not match fit");
  }
  Matrix out(data.rows(), data.cols());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    const double range = max[c] - min[c];
    for (std::size_t r = 0; r < data.rows(); ++r) {
      out.at(r, c) = range == 0.0 ? 0.0 : (data.at(r, c) - min[c]) / range;
    }
  }
  return out;
}

Matrix minmax_scale(const Matrix& data) {
  MinMaxScaler scaler;
  scaler.fit(data);
  return scaler.apply(data);
}

void CorruptConfig::validate() const {
  if (sigma < 0.0 || amplitude < 0.0 || magnitude < 0.0) {
    throw std::invalid_argument("corrupt: noise parameters must be non-negative");
  }
  if (rate < 0.0 || rate > 1.0 || dropout < 0.0 || dropout > 1.0) {
    throw std::invalid_argument("corrupt: rate and dropout must lie in [0, 1]");
  }
  if (!std::isfinite(factor)) {
    throw std::invalid_argument("corrupt: scale factor must be finite");
  }
  if (window < 1) {
    throw std::invalid_argument("corrupt: window must be at least 1");
  }
}

Matrix corrupt_with(const Matrix& data, const CorruptConfig& cfg, Rng& rng) {
  cfg.validate();
  Matrix out = data;
  switch (cfg.kind) {
    case CorruptKind::gaussian:
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
          out.at(r, c) += rng.normal() * cfg.sigma;
        }
      }
      break;
    case CorruptKind::uniform:
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
          out.at(r, c) += rng.uniform(-cfg.amplitude, cfg.amplitude);
        }
      }
      break;
    case CorruptKind::impulse:
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
          if (rng.uniform() < cfg.rate) {
            out.at(r, c) = rng.uniform() < 0.5 ? cfg.magnitude : -cfg.magnitude;
          }
        }
      }
      break;
    case CorruptKind::feature_dropout:
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
          if (rng.uniform() < cfg.dropout) out.at(r, c) = 0.0;
        }
      }
      break;
    case CorruptKind::scale:
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
          out.at(r, c) *= cfg.factor;
        }
      }
      break;
    case CorruptKind::smooth: {
      const std::size_t d = data.cols();
      const std::size_t back = (cfg.window - 1) / 2;
      const std::size_t fwd = cfg.window / 2;
      for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          const std::size_t lo = c >= back ? c - back : 0;
          const std::size_t hi = std::min(d - 1, c + fwd);
          double total = 0.0;
          for (std::size_t j = lo; j <= hi; ++j) total += data.at(r, j);
          out.at(r, c) = total / static_cast<double>(hi - lo + 1);
        }
      }
      break;
    }
  }
  return out;
}

Matrix corrupt(const Matrix& data, const CorruptConfig& cfg) {
  Rng rng(cfg.seed);
  return corrupt_with(data, cfg, rng);
}

void SynthConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("synthesize: dim must be at least 1");
  if (cluster_count < 1) {
    throw std::invalid_argument("synthesize: need at least one cluster");
  }
  if (n_inliers < 1) {
    throw std::invalid_argument("synthesize: need at least one inlier");
  }
  if (spread < 0.0 || !std::isfinite(spread)) {
    throw std::invalid_argument("synthesize: spread must be non-negative");
  }
}

EmbeddingBatch synthesize(const SynthConfig& cfg) {
  cfg.validate();
  const bool with_outliers =
      cfg.preset == SynthConfig::Preset::clusters_plus_outliers;
  const std::size_t n_out = with_outliers ? cfg.n_outliers : 0;
  const std::size_t n = cfg.n_inliers + n_out;

  // Separate streams per purpose: changing one count leaves the other
  // draws untouched.
  Rng center_rng(split_seed(cfg.seed, 0));
  Rng inlier_rng(split_seed(cfg.seed, 1));
  Rng outlier_rng(split_seed(cfg.seed, 2));
  Rng shuffle_rng(split_seed(cfg.seed, 3));

  // Centers stay clear of the box edge so the clusters fit inside it while
  // uniform outliers cover the whole box.
  std::vector<Vec> centers(cfg.cluster_count, Vec(cfg.dim));
  for (auto& center : centers) {
    for (double& v : center) v = center_rng.uniform(0.15, 0.85);
  }

  Matrix features(n, cfg.dim);
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < cfg.n_inliers; ++i) {
    const Vec& center = centers[inlier_rng.uniform_index(cfg.cluster_count)];
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      features.at(i, j) = center[j] + inlier_rng.normal() * cfg.spread;
    }
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      features.at(cfg.n_inliers + i, j) = outlier_rng.uniform();
    }
    labels[cfg.n_inliers + i] = 1;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle_rng.shuffle(order);

  EmbeddingBatch batch;
  batch.features = Matrix(n, cfg.dim);
  batch.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      batch.features.at(i, j) = features.at(order[i], j);
    }
    batch.labels[i] = labels[order[i]];
  }
  for (std::size_t j = 0; j < cfg.dim; ++j) {
    batch.column_names.push_back("f" + std::to_string(j));
  }
  return batch;
}

namespace {

char parse_delimiter(const std::string& value, long line) {
  if (value == "comma") return ',';
  if (value == "semicolon") return ';';
  if (value == "tab") return '\t';
  if (value == "space") return ' ';
  if (value == "pipe") return '|';
  if (value.size() == 1) return value[0];
  throw parse_error("unknown delimiter \"" + value + "\"", line);
}

bool parse_bool(const std::string& value, long line) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw parse_error("expected a boolean, got \"" + value + "\"", line);
}

std::size_t parse_index(const std::string& value, long line) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw parse_error("expected a non-negative integer, got \"" + value + "\"",
                      line);
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> items;
  for (const auto& item : split_fields(value, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

Recipe load_recipe(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open " + file.string());
  }
  Recipe r;
  r.name = file.stem().string();

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trimmed(line);
    if (stripped.empty()) continue;
    const std::size_t colon = stripped.find(':');
    if (colon == std::string::npos) {
      throw parse_error("expected \"key: value\"", line_no);
    }
    const std::string key = trimmed(std::string_view(stripped).substr(0, colon));
    const std::string value =
        trimmed(std::string_view(stripped).substr(colon + 1));
    if (value.empty()) {
      throw parse_error("key \"" + key + "\" has no value", line_no);
    }

    if (key == "name") {
      r.name = value;
    } else if (key == "files") {
      r.files = parse_list(value);
    } else if (key == "concat") {
      if (value == "rows") {
        r.concat = Recipe::Concat::rows;
      } else if (value == "columns") {
        r.concat = Recipe::Concat::columns;
      } else {
        throw parse_error("concat must be rows or columns", line_no);
      }
    } else if (key == "delimiter") {
      r.delimiter = parse_delimiter(value, line_no);
    } else if (key == "header") {
      if (value == "auto") {
        r.header = HeaderMode::detect;
      } else if (value == "yes") {
        r.header = HeaderMode::present;
      } else if (value == "no") {
        r.header = HeaderMode::absent;
      } else {
        throw parse_error("header must be auto, yes or no", line_no);
      }
    } else if (key == "missing") {
      r.missing_token = value;
    } else if (key == "drop_rows_with_missing") {
      r.drop_rows_with_missing = parse_bool(value, line_no);
    } else if (key == "drop_columns") {
      for (const auto& item : parse_list(value)) {
        r.drop_columns.push_back(parse_index(item, line_no));
      }
    } else if (key == "label_column") {
      r.label_column = parse_index(value, line_no);
    } else if (key == "rowblock_labels") {
      r.rowblock = parse_index(value, line_no);
    } else if (key == "keep_labels") {
      r.keep_labels = parse_list(value);
    } else if (key == "positive_label") {
      if (r.label_rule.kind == LabelRule::Kind::least_frequent) {
        throw parse_error(
            "positive_label conflicts with positive_least_frequent", line_no);
      }
      r.label_rule.kind = LabelRule::Kind::tokens;
      r.label_rule.positives = parse_list(value);
    } else if (key == "positive_least_frequent") {
      if (parse_bool(value, line_no)) {
        if (r.label_rule.kind == LabelRule::Kind::tokens) {
          throw parse_error(
              "positive_least_frequent conflicts with positive_label", line_no);
        }
        r.label_rule.kind = LabelRule::Kind::least_frequent;
      }
    } else if (key == "flip_labels") {
      r.flip_labels = parse_bool(value, line_no);
    } else {
      throw parse_error("unknown recipe key \"" + key + "\"", line_no);
    }
  }
  if (r.files.empty()) {
    throw ParseError(file.string() + ": recipe names no files");
  }
  return r;
}

EmbeddingBatch load_with_recipe(const Recipe& recipe,
                                const std::filesystem::path& data_dir) {
  if (recipe.files.empty()) {
    throw std::invalid_argument("recipe names no files");
  }
  std::vector<RawTable> tables;
  tables.reserve(recipe.files.size());
  for (const auto& f : recipe.files) {
    tables.push_back(read_raw(data_dir / f, recipe.delimiter, recipe.header,
                              recipe.missing_token));
  }

  RawTable merged = std::move(tables.front());
  for (std::size_t t = 1; t < tables.size(); ++t) {
    RawTable& next = tables[t];
    if (recipe.concat == Recipe::Concat::rows) {
      if (next.cols() != merged.cols()) {
        throw ParseError(recipe.files[t] + ": column count " +
                         std::to_string(next.cols()) +
                         " does not match earlier files (" +
                         std::to_string(merged.cols()) + ")");
      }
      for (auto& row : next.rows) merged.rows.push_back(std::move(row));
    } else {
      if (next.rows.size() != merged.rows.size()) {
        throw ParseError(recipe.files[t] + ": row count " +
                         std::to_string(next.rows.size()) +
                         " does not match earlier files (" +
                         std::to_string(merged.rows.size()) + ")");
      }
      for (std::size_t i = 0; i < merged.rows.size(); ++i) {
        for (auto& cell : next.rows[i]) {
          merged.rows[i].push_back(std::move(cell));
        }
      }
      for (auto& name : next.header) merged.header.push_back(std::move(name));
    }
  }
  return finalize(std::move(merged), recipe);
}

}  // namespace dum
