#include <doctest.h>

#include <string>

#include "testutil.hpp"

#ifdef DUM_CLI_PATH

using testutil::TempDir;
using testutil::read_file;
using testutil::run_cli;
using testutil::write_file;

namespace {

std::string q(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST_CASE("the full pipeline runs: synth, train, score, eval, shift-test") {
  TempDir dir;
  const auto data = dir.file("data.csv");
  const auto model = dir.file("model.dumckpt");
  const auto scores = dir.file("scores.csv");
  const auto report = dir.file("eval.txt");
  const auto errs = dir.file("stderr.txt");

  REQUIRE(run_cli("synth --out " + q(data) +
                      " --n 256 --n-outliers 16 --dim 6 --clusters 2 --seed 1",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(std::filesystem::exists(data));
  const std::string head = read_file(data).substr(0, 64);
  CHECK(head.rfind("f0,f1,f2,f3,f4,f5,label", 0) == 0);

  REQUIRE(run_cli("train --data " + q(data) + " --out " + q(model) +
                      " --epochs 3 --batch-size 32 --hidden 16 --m 2 --seed 0",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(std::filesystem::exists(model));

  // The provenance manifest lands next to the checkpoint by default.
  const auto manifest = dir.file("model.dumckpt.manifest.json");
  REQUIRE(std::filesystem::exists(manifest));
  const std::string mtext = read_file(manifest);
  CHECK(mtext.find("\"command\": \"train\"") != std::string::npos);
  CHECK(mtext.find("\"inputs\"") != std::string::npos);
  CHECK(mtext.find("\"wall_seconds\"") != std::string::npos);

  REQUIRE(run_cli("score --model " + q(model) + " --data " + q(data) +
                      " --out " + q(scores),
                  "> /dev/null 2> " + q(errs)) == 0);
  const std::string score_head = read_file(scores).substr(0, 32);
  CHECK(score_head.rfind("index,score,label", 0) == 0);

  REQUIRE(run_cli("eval --scores " + q(scores),
                  "> " + q(report) + " 2> " + q(errs)) == 0);
  const std::string eval_out = read_file(report);
  CHECK(eval_out.find("auroc: ") != std::string::npos);
  CHECK(eval_out.find("rows: 272") != std::string::npos);

  // Identical data on both sides of the shift test: t = 0, nothing detected.
  REQUIRE(run_cli("shift-test --model " + q(model) + " --reference " +
                      q(data) + " --suspect " + q(data),
                  "> " + q(report) + " 2> " + q(errs)) == 0);
  const std::string shift_out = read_file(report);
  CHECK(shift_out.find("shift_detected: false") != std::string::npos);
  CHECK(shift_out.find("p: 1.0") != std::string::npos);

  // Baselines score the same file.
  const auto base_scores = dir.file("knn.csv");
  REQUIRE(run_cli("baseline --data " + q(data) + " --out " + q(base_scores) +
                      " --method knn --k 5",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(run_cli("eval --scores " + q(base_scores),
                  "> " + q(report) + " 2> " + q(errs)) == 0);
  CHECK(read_file(report).find("auroc: ") != std::string::npos);

  // Corrupt writes a same-shaped copy.
  const auto noisy = dir.file("noisy.csv");
  REQUIRE(run_cli("corrupt --data " + q(data) + " --out " + q(noisy) +
                      " --kind gaussian --sigma 0.1 --seed 7",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(std::filesystem::exists(noisy));
  REQUIRE(run_cli("shift-test --model " + q(model) + " --reference " +
                      q(data) + " --suspect " + q(noisy),
                  "> " + q(report) + " 2> " + q(errs)) == 0);
  CHECK(read_file(report).find("p: ") != std::string::npos);
}

TEST_CASE("training and scoring are reproducible end to end") {
  TempDir dir;
  const auto data = dir.file("data.csv");
  const auto errs = dir.file("stderr.txt");
  REQUIRE(run_cli("synth --out " + q(data) + " --n 128 --n-outliers 8 --dim 4",
                  "> /dev/null 2> " + q(errs)) == 0);

  const std::string train_flags =
      " --epochs 2 --batch-size 16 --hidden 8 --seed 3";
  const auto m1 = dir.file("a.dumckpt");
  const auto m2 = dir.file("b.dumckpt");
  REQUIRE(run_cli("train --data " + q(data) + " --out " + q(m1) + train_flags,
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(run_cli("train --data " + q(data) + " --out " + q(m2) + train_flags,
                  "> /dev/null 2> " + q(errs)) == 0);
  CHECK(read_file(m1) == read_file(m2));

  const auto s1 = dir.file("s1.csv");
  const auto s2 = dir.file("s2.csv");
  REQUIRE(run_cli("score --model " + q(m1) + " --data " + q(data) + " --out " +
                      q(s1),
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(run_cli("score --model " + q(m2) + " --data " + q(data) + " --out " +
                      q(s2),
                  "> /dev/null 2> " + q(errs)) == 0);
  CHECK(read_file(s1) == read_file(s2));
}

TEST_CASE("configuration mistakes exit with code 2") {
  TempDir dir;
  const auto errs = dir.file("stderr.txt");
  CHECK(run_cli("", "> /dev/null 2> " + q(errs)) == 2);  // no subcommand
  CHECK(run_cli("train --data x.csv", "> /dev/null 2> " + q(errs)) == 2);
  CHECK(run_cli("train --data x.csv --out m --loss bogus",
                "> /dev/null 2> " + q(errs)) == 2);
  CHECK(run_cli("baseline --data x.csv --out s --method zzz",
                "> /dev/null 2> " + q(errs)) == 2);
  // Neither --data nor --recipe.
  CHECK(run_cli("train --out " + q(dir.file("m.dumckpt")),
                "> /dev/null 2> " + q(errs)) == 2);
}

TEST_CASE("data problems exit with code 3") {
  TempDir dir;
  const auto errs = dir.file("stderr.txt");
  CHECK(run_cli("baseline --data " + q(dir.file("absent.csv")) + " --out " +
                    q(dir.file("s.csv")),
                "> /dev/null 2> " + q(errs)) == 3);

  const auto unlabeled = dir.file("unlabeled.csv");
  write_file(unlabeled, "index,score\n0,1.5\n1,2.5\n");
  CHECK(run_cli("eval --scores " + q(unlabeled),
                "> /dev/null 2> " + q(errs)) == 3);

  // Width mismatch between model and data.
  const auto data = dir.file("data.csv");
  const auto other = dir.file("other.csv");
  const auto model = dir.file("m.dumckpt");
  REQUIRE(run_cli("synth --out " + q(data) + " --n 64 --n-outliers 0 --dim 4",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(run_cli("synth --out " + q(other) + " --n 64 --n-outliers 0 --dim 6",
                  "> /dev/null 2> " + q(errs)) == 0);
  REQUIRE(run_cli("train --data " + q(data) + " --out " + q(model) +
                      " --epochs 1 --batch-size 16 --hidden 8",
                  "> /dev/null 2> " + q(errs)) == 0);
  CHECK(run_cli("score --model " + q(model) + " --data " + q(other) +
                    " --out " + q(dir.file("s.csv")),
                "> /dev/null 2> " + q(errs)) == 3);
}

TEST_CASE("unreadable checkpoints exit with code 5") {
  TempDir dir;
  const auto errs = dir.file("stderr.txt");
  const auto junk = dir.file("junk.dumckpt");
  write_file(junk, "this is not a checkpoint");
  const auto data = dir.file("data.csv");
  write_file(data, "1,2\n3,4\n");
  CHECK(run_cli("score --model " + q(junk) + " --data " + q(data) + " --out " +
                    q(dir.file("s.csv")),
                "> /dev/null 2> " + q(errs)) == 5);
}

#endif  // DUM_CLI_PATH
