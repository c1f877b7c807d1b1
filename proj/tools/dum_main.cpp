// Command-line front end: train, score and evaluate uncertainty models,
// run reference scorers, and prepare datasets.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dum/baselines.hpp"
#include "dum/checkpoint.hpp"
#include "dum/dataset.hpp"
#include "dum/errors.hpp"
#include "dum/scoring.hpp"
#include "dum/stats.hpp"
#include "dum/trainer.hpp"
#include "dum/version.hpp"

namespace {

using json = nlohmann::ordered_json;

// Exit codes, also documented in the README: 2 bad configuration, 3 bad or
// mismatched data, 4 training divergence, 5 checkpoint format trouble.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitFormat = 5;

std::string fnv1a_hex(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw dum::ParseError("cannot open " + file.string());
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (f.read(buf, sizeof buf), f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

class RunRecorder {
 public:
  RunRecorder(std::string command, bool as_json)
      : command_(std::move(command)),
        as_json_(as_json),
        start_(std::chrono::steady_clock::now()) {}

  void config(const json& j) { config_ = j; }
  void input(const std::filesystem::path& p) {
    inputs_[p.string()] = fnv1a_hex(p);
  }
  void output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }
  void report(const std::string& key, const json& value) {
    report_[key] = value;
  }

  // Report to stdout; provenance manifest next to the primary artifact (or
  // wherever --manifest pointed).
  void finish(const std::string& manifest_path) {
    if (as_json_) {
      std::cout << report_.dump() << '\n';
    } else {
      for (const auto& [key, value] : report_.items()) {
        std::cout << key << ": "
                  << (value.is_string() ? value.get<std::string>() : value.dump())
                  << '\n';
      }
    }
    if (manifest_path.empty()) return;
    json manifest;
    manifest["command"] = command_;
    manifest["version"] = dum::kVersion;
    manifest["config"] = config_;
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    manifest["report"] = report_;
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    manifest["wall_seconds"] =
        std::chrono::duration<double>(elapsed).count();
    std::ofstream out(manifest_path);
    if (!out || !(out << manifest.dump(2) << '\n')) {
      throw dum::ParseError("cannot write manifest " + manifest_path);
    }
  }

 private:
  std::string command_;
  bool as_json_;
  std::chrono::steady_clock::time_point start_;
  json config_;
  json inputs_ = json::object();
  std::vector<std::string> outputs_;
  json report_ = json::object();
};

std::string default_manifest(const std::string& explicit_path,
                             const std::string& out_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (!out_path.empty()) return out_path + ".manifest.json";
  return {};
}

dum::NormKind parse_norm(const std::string& name) {
  if (name == "l2") return dum::NormKind::l2;
  if (name == "l1") return dum::NormKind::l1;
  if (name == "max") return dum::NormKind::max;
  throw std::invalid_argument("unknown norm \"" + name + "\"");
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data, out, manifest, recipe, data_dir = ".";
  std::uint64_t seed = 0;
  std::size_t epochs = 40, batch_size = 128, m = 2, hidden = 64;
  double lr = 1e-3, tau = 0.07;
  std::string loss = "plain";
  bool normalize_means = true;
  std::string augment = "jitter";
  double augment_sigma = 0.2, augment_dropout = 0.1;
  bool no_scale = false;
  bool as_json = false;
};

dum::EmbeddingBatch load_features(const std::string& data,
                                  const std::string& recipe,
                                  const std::string& data_dir,
                                  RunRecorder& rec) {
  if (!recipe.empty()) {
    rec.input(recipe);
    const dum::Recipe r = dum::load_recipe(recipe);
    for (const auto& f : r.files) {
      rec.input(std::filesystem::path(data_dir) / f);
    }
    return dum::load_with_recipe(r, data_dir);
  }
  if (data.empty()) {
    throw std::invalid_argument("give either --data or --recipe");
  }
  rec.input(data);
  return dum::load_csv(data);
}

json scaler_to_json(const dum::MinMaxScaler& scaler) {
  if (!scaler.fitted()) return nullptr;
  return json{{"min", scaler.min}, {"max", scaler.max}};
}

dum::MinMaxScaler scaler_from_config(const std::string& config_json) {
  dum::MinMaxScaler scaler;
  if (config_json.empty()) return scaler;
  json cfg = json::parse(config_json, nullptr, false);
  if (cfg.is_discarded() || !cfg.contains("scaler") || cfg["scaler"].is_null()) {
    return scaler;
  }
  scaler.min = cfg["scaler"]["min"].get<dum::Vec>();
  scaler.max = cfg["scaler"]["max"].get<dum::Vec>();
  return scaler;
}

int cmd_train(const TrainArgs& a) {
  RunRecorder rec("train", a.as_json);
  dum::EmbeddingBatch batch = load_features(a.data, a.recipe, a.data_dir, rec);

  dum::MinMaxScaler scaler;
  dum::Matrix features = batch.features;
  if (!a.no_scale) {
    scaler.fit(features);
    features = scaler.apply(features);
  }

  dum::TrainConfig cfg;
  cfg.hidden_dim = a.hidden;
  cfg.m = a.m;
  cfg.batch_groups = a.batch_size;
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.adam.learning_rate = a.lr;
  cfg.loss.variant = a.loss == "plain" ? dum::LossConfig::Variant::plain_dot
                                       : dum::LossConfig::Variant::infonce;
  cfg.loss.temperature = a.tau;
  cfg.loss.normalize_means = a.normalize_means;
  if (a.augment == "identity") {
    cfg.augment.kind = dum::AugmentConfig::Kind::identity;
  } else if (a.augment == "jitter") {
    cfg.augment.kind = dum::AugmentConfig::Kind::gaussian_jitter;
  } else {
    cfg.augment.kind = dum::AugmentConfig::Kind::feature_dropout;
  }
  cfg.augment.sigma = a.augment_sigma;
  cfg.augment.dropout = a.augment_dropout;

  const dum::TrainResult result = dum::train(features, cfg);
  for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
    std::cerr << "epoch " << e << " mean loss " << result.epoch_mean_loss[e]
              << '\n';
  }

  json snapshot;
  snapshot["command"] = "train";
  snapshot["version"] = dum::kVersion;
  snapshot["hidden"] = a.hidden;
  snapshot["m"] = a.m;
  snapshot["batch_size"] = a.batch_size;
  snapshot["epochs"] = a.epochs;
  snapshot["seed"] = a.seed;
  snapshot["lr"] = a.lr;
  snapshot["loss"] = a.loss;
  snapshot["tau"] = a.tau;
  snapshot["normalize_means"] = a.normalize_means;
  snapshot["augment"] = {{"kind", a.augment},
                         {"sigma", a.augment_sigma},
                         {"dropout", a.augment_dropout}};
  snapshot["scaler"] = scaler_to_json(scaler);
  dum::save_checkpoint(a.out, result.net, snapshot.dump());

  rec.config(snapshot);
  rec.output(a.out);
  rec.report("model", a.out);
  rec.report("rows", batch.features.rows());
  rec.report("dim", batch.features.cols());
  rec.report("epochs", a.epochs);
  rec.report("first_epoch_loss", result.epoch_mean_loss.front());
  rec.report("final_epoch_loss", result.epoch_mean_loss.back());
  rec.finish(default_manifest(a.manifest, a.out));
  return 0;
}

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string model, data, out, manifest, norm = "l2";
  bool as_json = false;
};

int cmd_score(const ScoreArgs& a) {
  RunRecorder rec("score", a.as_json);
  rec.input(a.model);
  rec.input(a.data);
  const dum::Checkpoint ckpt = dum::load_checkpoint(a.model);
  dum::EmbeddingBatch batch = dum::load_csv(a.data);

  dum::Matrix features = batch.features;
  const dum::MinMaxScaler scaler = scaler_from_config(ckpt.config_json);
  if (scaler.fitted()) features = scaler.apply(features);

  const dum::Vec scores = dum::score(ckpt.net, features, parse_norm(a.norm));
  dum::save_scores(a.out, scores, batch.labels);

  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());

  rec.config(json{{"model", a.model}, {"norm", a.norm}});
  rec.output(a.out);
  rec.report("scores", a.out);
  rec.report("rows", scores.size());
  rec.report("mean_score", mean);
  rec.finish(default_manifest(a.manifest, a.out));
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string scores, manifest;
  bool as_json = false;
};

int cmd_eval(const EvalArgs& a) {
  RunRecorder rec("eval", a.as_json);
  rec.input(a.scores);
  const dum::ScoredDataset scored = dum::load_scores(a.scores);
  if (scored.labels.empty()) {
    throw dum::ParseError(a.scores + " has no label column to evaluate against");
  }
  const double auc = dum::auroc(scored.scores, scored.labels);

  std::size_t n_pos = 0;
  for (int l : scored.labels) n_pos += static_cast<std::size_t>(l);
  rec.config(json{{"scores", a.scores}});
  rec.report("rows", scored.scores.size());
  rec.report("positives", n_pos);
  rec.report("auroc", auc);
  rec.report("auroc_pct", auc * 100.0);
  rec.finish(a.manifest);
  return 0;
}

// ---- baseline ---------------------------------------------------------------

struct BaselineArgs {
  std::string data, out, manifest, method = "knn";
  std::size_t k = 5, subsample = 8, ensemble = 50, trees = 100, psi = 256;
  std::uint64_t seed = 0;
  bool no_scale = false;
  bool as_json = false;
};

int cmd_baseline(const BaselineArgs& a) {
  RunRecorder rec("baseline", a.as_json);
  rec.input(a.data);
  dum::EmbeddingBatch batch = dum::load_csv(a.data);
  dum::Matrix features =
      a.no_scale ? batch.features : dum::minmax_scale(batch.features);

  dum::Vec scores;
  if (a.method == "knn") {
    scores = dum::knn_score(features, a.k);
  } else if (a.method == "lesinn") {
    scores = dum::lesinn_score(features, {a.subsample, a.ensemble, a.seed});
  } else {
    scores = dum::iforest_score(features, {a.trees, a.psi, a.seed});
  }
  dum::save_scores(a.out, scores, batch.labels);

  rec.config(json{{"method", a.method},
                  {"k", a.k},
                  {"subsample", a.subsample},
                  {"ensemble", a.ensemble},
                  {"trees", a.trees},
                  {"psi", a.psi},
                  {"seed", a.seed},
                  {"scaled", !a.no_scale}});
  rec.output(a.out);
  rec.report("scores", a.out);
  rec.report("rows", scores.size());
  rec.report("method", a.method);
  rec.finish(default_manifest(a.manifest, a.out));
  return 0;
}

// ---- corrupt ----------------------------------------------------------------

struct CorruptArgs {
  std::string data, out, manifest, kind = "gaussian";
  dum::CorruptConfig cfg;
  bool as_json = false;
};

int cmd_corrupt(const CorruptArgs& a) {
  RunRecorder rec("corrupt", a.as_json);
  rec.input(a.data);
  dum::EmbeddingBatch batch = dum::load_csv(a.data);

  dum::CorruptConfig cfg = a.cfg;
  if (a.kind == "gaussian") {
    cfg.kind = dum::CorruptKind::gaussian;
  } else if (a.kind == "uniform") {
    cfg.kind = dum::CorruptKind::uniform;
  } else if (a.kind == "impulse") {
    cfg.kind = dum::CorruptKind::impulse;
  } else if (a.kind == "dropout") {
    cfg.kind = dum::CorruptKind::feature_dropout;
  } else if (a.kind == "scale") {
    cfg.kind = dum::CorruptKind::scale;
  } else {
    cfg.kind = dum::CorruptKind::smooth;
  }
  batch.features = dum::corrupt(batch.features, cfg);
  dum::save_csv(a.out, batch);

  rec.config(json{{"kind", a.kind},
                  {"sigma", cfg.sigma},
                  {"amplitude", cfg.amplitude},
                  {"rate", cfg.rate},
                  {"magnitude", cfg.magnitude},
                  {"dropout", cfg.dropout},
                  {"factor", cfg.factor},
                  {"window", cfg.window},
                  {"seed", cfg.seed}});
  rec.output(a.out);
  rec.report("data", a.out);
  rec.report("rows", batch.features.rows());
  rec.report("kind", a.kind);
  rec.finish(default_manifest(a.manifest, a.out));
  return 0;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string out, manifest, preset = "clusters-outliers";
  dum::SynthConfig cfg;
  bool as_json = false;
};

int cmd_synth(const SynthArgs& a) {
  RunRecorder rec("synth", a.as_json);
  dum::SynthConfig cfg = a.cfg;
  cfg.preset = a.preset == "clusters"
                   ? dum::SynthConfig::Preset::clusters
                   : dum::SynthConfig::Preset::clusters_plus_outliers;
  const dum::EmbeddingBatch batch = dum::synthesize(cfg);
  dum::save_csv(a.out, batch);

  rec.config(json{{"preset", a.preset},
                  {"n", cfg.n_inliers},
                  {"n_outliers", cfg.n_outliers},
                  {"dim", cfg.dim},
                  {"clusters", cfg.cluster_count},
                  {"spread", cfg.spread},
                  {"seed", cfg.seed}});
  rec.output(a.out);
  rec.report("data", a.out);
  rec.report("rows", batch.features.rows());
  rec.finish(default_manifest(a.manifest, a.out));
  return 0;
}

// ---- shift-test -------------------------------------------------------------

struct ShiftArgs {
  std::string model, reference, suspect, manifest, norm = "l2";
  double p_threshold = 0.01;
  bool as_json = false;
};

int cmd_shift_test(const ShiftArgs& a) {
  RunRecorder rec("shift-test", a.as_json);
  rec.input(a.model);
  rec.input(a.reference);
  rec.input(a.suspect);
  const dum::Checkpoint ckpt = dum::load_checkpoint(a.model);
  const dum::EmbeddingBatch ref = dum::load_csv(a.reference);
  const dum::EmbeddingBatch sus = dum::load_csv(a.suspect);

  dum::Matrix ref_features = ref.features;
  dum::Matrix sus_features = sus.features;
  const dum::MinMaxScaler scaler = scaler_from_config(ckpt.config_json);
  if (scaler.fitted()) {
    // Both sides go through the training normalization; the suspect set must
    // not be rescaled to itself or the shift would vanish.
    ref_features = scaler.apply(ref_features);
    sus_features = scaler.apply(sus_features);
  }

  const dum::NormKind norm = parse_norm(a.norm);
  const dum::Vec ref_scores = dum::score(ckpt.net, ref_features, norm);
  const dum::Vec sus_scores = dum::score(ckpt.net, sus_features, norm);
  const dum::WelchResult w = dum::welch_ttest(sus_scores, ref_scores);

  auto mean = [](const dum::Vec& v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total / static_cast<double>(v.size());
  };
  const bool detected = w.p < a.p_threshold;

  rec.config(json{{"model", a.model},
                  {"norm", a.norm},
                  {"p_threshold", a.p_threshold}});
  rec.report("reference_rows", ref_scores.size());
  rec.report("suspect_rows", sus_scores.size());
  rec.report("reference_mean_score", mean(ref_scores));
  rec.report("suspect_mean_score", mean(sus_scores));
  rec.report("t", w.t);
  rec.report("dof", w.dof);
  rec.report("p", w.p);
  rec.report("p_underflow", w.underflow);
  rec.report("shift_detected", detected);
  rec.finish(a.manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep uncertainty model toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train an uncertainty model");
  train->add_option("--data", train_args.data, "embeddings CSV");
  train->add_option("--recipe", train_args.recipe, "dataset recipe file");
  train->add_option("--data-dir", train_args.data_dir,
                    "directory recipe files resolve against");
  train->add_option("--out", train_args.out, "checkpoint path")->required();
  train->add_option("--manifest", train_args.manifest, "manifest path");
  train->add_option("--seed", train_args.seed, "rng seed");
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--batch-size", train_args.batch_size,
                    "groups per optimizer step");
  train->add_option("--m", train_args.m, "experts fused per group half");
  train->add_option("--hidden", train_args.hidden, "hidden width");
  train->add_option("--lr", train_args.lr, "Adam learning rate");
  train->add_option("--loss", train_args.loss, "loss variant")
      ->check(CLI::IsMember({"plain", "infonce"}));
  train->add_option("--tau", train_args.tau, "infonce temperature");
  train->add_flag("--normalize-means,!--raw-means", train_args.normalize_means,
                  "L2-normalize fused means in the loss (on by default)");
  train->add_option("--augment", train_args.augment, "view augmentation")
      ->check(CLI::IsMember({"identity", "jitter", "dropout"}));
  train->add_option("--augment-sigma", train_args.augment_sigma,
                    "jitter noise sd");
  train->add_option("--augment-dropout", train_args.augment_dropout,
                    "dropout probability");
  train->add_flag("--no-scale", train_args.no_scale,
                  "skip min-max normalization");
  train->add_flag("--json", train_args.as_json, "JSON report on stdout");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "score embeddings with a model");
  score->add_option("--model", score_args.model, "checkpoint path")->required();
  score->add_option("--data", score_args.data, "embeddings CSV")->required();
  score->add_option("--out", score_args.out, "scores CSV path")->required();
  score->add_option("--manifest", score_args.manifest, "manifest path");
  score->add_option("--norm", score_args.norm, "variance norm")
      ->check(CLI::IsMember({"l2", "l1", "max"}));
  score->add_flag("--json", score_args.as_json, "JSON report on stdout");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "AUROC of a labeled score file");
  eval->add_option("--scores", eval_args.scores, "scores CSV with labels")
      ->required();
  eval->add_option("--manifest", eval_args.manifest, "manifest path");
  eval->add_flag("--json", eval_args.as_json, "JSON report on stdout");

  BaselineArgs baseline_args;
  auto* baseline = app.add_subcommand("baseline", "run a reference scorer");
  baseline->add_option("--data", baseline_args.data, "embeddings CSV")
      ->required();
  baseline->add_option("--out", baseline_args.out, "scores CSV path")
      ->required();
  baseline->add_option("--manifest", baseline_args.manifest, "manifest path");
  baseline->add_option("--method", baseline_args.method, "scorer")
      ->check(CLI::IsMember({"knn", "lesinn", "iforest"}));
  baseline->add_option("--k", baseline_args.k, "knn neighbour rank");
  baseline->add_option("--subsample", baseline_args.subsample,
                       "lesinn subsample size");
  baseline->add_option("--ensemble", baseline_args.ensemble,
                       "lesinn ensemble size");
  baseline->add_option("--trees", baseline_args.trees, "iforest tree count");
  baseline->add_option("--psi", baseline_args.psi, "iforest subsample size");
  baseline->add_option("--seed", baseline_args.seed, "rng seed");
  baseline->add_flag("--no-scale", baseline_args.no_scale,
                     "skip min-max normalization");
  baseline->add_flag("--json", baseline_args.as_json, "JSON report on stdout");

  CorruptArgs corrupt_args;
  auto* corrupt = app.add_subcommand("corrupt", "write a corrupted copy");
  corrupt->add_option("--data", corrupt_args.data, "embeddings CSV")
      ->required();
  corrupt->add_option("--out", corrupt_args.out, "output CSV path")->required();
  corrupt->add_option("--manifest", corrupt_args.manifest, "manifest path");
  corrupt->add_option("--kind", corrupt_args.kind, "corruption kind")
      ->check(CLI::IsMember(
          {"gaussian", "uniform", "impulse", "dropout", "scale", "smooth"}));
  corrupt->add_option("--sigma", corrupt_args.cfg.sigma, "gaussian noise sd");
  corrupt->add_option("--amplitude", corrupt_args.cfg.amplitude,
                      "uniform noise half-width");
  corrupt->add_option("--rate", corrupt_args.cfg.rate, "impulse rate");
  corrupt->add_option("--magnitude", corrupt_args.cfg.magnitude,
                      "impulse magnitude");
  corrupt->add_option("--dropout", corrupt_args.cfg.dropout,
                      "dropout probability");
  corrupt->add_option("--factor", corrupt_args.cfg.factor, "scale factor");
  corrupt->add_option("--window", corrupt_args.cfg.window, "smoothing window");
  corrupt->add_option("--seed", corrupt_args.cfg.seed, "rng seed");
  corrupt->add_flag("--json", corrupt_args.as_json, "JSON report on stdout");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--out", synth_args.out, "output CSV path")->required();
  synth->add_option("--manifest", synth_args.manifest, "manifest path");
  synth->add_option("--preset", synth_args.preset, "generator preset")
      ->check(CLI::IsMember({"clusters", "clusters-outliers"}));
  synth->add_option("--n", synth_args.cfg.n_inliers, "inlier count");
  synth->add_option("--n-outliers", synth_args.cfg.n_outliers, "outlier count");
  synth->add_option("--dim", synth_args.cfg.dim, "dimensionality");
  synth->add_option("--clusters", synth_args.cfg.cluster_count,
                    "cluster count");
  synth->add_option("--spread", synth_args.cfg.spread, "cluster spread");
  synth->add_option("--seed", synth_args.cfg.seed, "rng seed");
  synth->add_flag("--json", synth_args.as_json, "JSON report on stdout");

  ShiftArgs shift_args;
  auto* shift = app.add_subcommand(
      "shift-test", "test whether suspect data scores like reference data");
  shift->add_option("--model", shift_args.model, "checkpoint path")->required();
  shift->add_option("--reference", shift_args.reference, "reference CSV")
      ->required();
  shift->add_option("--suspect", shift_args.suspect, "suspect CSV")->required();
  shift->add_option("--manifest", shift_args.manifest, "manifest path");
  shift->add_option("--norm", shift_args.norm, "variance norm")
      ->check(CLI::IsMember({"l2", "l1", "max"}));
  shift->add_option("--p-threshold", shift_args.p_threshold,
                    "detection p-value threshold");
  shift->add_flag("--json", shift_args.as_json, "JSON report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (score->parsed()) return cmd_score(score_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (baseline->parsed()) return cmd_baseline(baseline_args);
    if (corrupt->parsed()) return cmd_corrupt(corrupt_args);
    if (synth->parsed()) return cmd_synth(synth_args);
    if (shift->parsed()) return cmd_shift_test(shift_args);
  } catch (const dum::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const dum::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const dum::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const dum::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const dum::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
