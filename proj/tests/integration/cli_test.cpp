// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "dkt/binary_io.hpp"
#include "dkt/commands.hpp"
#include "dkt/formats.hpp"
#include "dkt/numeric.hpp"
#include "dkt/pipeline.hpp"
#include "dkt/report.hpp"
#include "dkt/run_record.hpp"

namespace fs = std::filesystem;

namespace dkt::cli {
namespace {

// Small enough that the whole pipeline runs in well under a second.
const std::vector<std::string> kTiny{
    "--classes=4",        "--feature-dim=5",      "--train-utts=16",  "--cv-utts=6",
    "--test-utts=6",      "--min-length=8",       "--max-length=16",  "--teacher-hidden=12",
    "--teacher-epochs=4", "--teacher-lr=0.05",    "--student-cells=6", "--student-projection=3",
    "--max-epochs=3",     "--max-soft-epochs=2",  "--lr=0.002",       "--seeds=1",
    "--quiet"};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result dkt(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"dkt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Result tiny(const std::string& cmd, const fs::path& out, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{cmd, "--out=" + out.string()};
  // Later options replace the tiny defaults of the same name.
  for (const auto& d : kTiny) {
    const auto key = d.substr(0, d.find('='));
    if (std::none_of(extra.begin(), extra.end(), [&](const std::string& e) { return e.rfind(key + "=", 0) == 0; }))
      args.push_back(d);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return dkt(args);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("dkt-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path dir(const std::string& name) const { return root_ / name; }

  void prepare(const fs::path& out) {
    ASSERT_EQ(tiny("generate-data", out).code, 0);
    ASSERT_EQ(tiny("train-teacher", out).code, 0);
    ASSERT_EQ(tiny("export-soft", out).code, 0);
  }

  fs::path root_;
};

std::vector<std::uint8_t> bytes(const fs::path& p) { return read_file(p); }

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(dkt({"--help"}).code, 0);
  EXPECT_EQ(dkt({}).code, kExitUsage);
  EXPECT_EQ(dkt({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(dkt({"generate-data", "--bogus"}).code, kExitUsage);
  const auto r = tiny("train-student", dir("a"), {"--regime=dark"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("dark"), std::string::npos);
  EXPECT_EQ(tiny("generate-data", dir("b"), {"--temperatures=0"}).code, kExitUsage);
}

TEST_F(Cli, GenerateDataIsIdempotent) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  const auto first = bytes(out / "seed1/data/train.dkds");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  EXPECT_EQ(bytes(out / "seed1/data/train.dkds"), first);
  EXPECT_TRUE(fs::exists(out / "seed1/data/cv.dkds"));
  EXPECT_TRUE(fs::exists(out / "seed1/data/test.manifest.txt"));
  EXPECT_TRUE(fs::exists(out / "config.digest"));
  EXPECT_TRUE(fs::exists(out / "config.effective"));
}

TEST_F(Cli, MissingDatasetNamesPath) {
  const auto out = dir("empty");
  const auto r = tiny("train-teacher", out);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find((out / "seed1/data/train.dkds").string()), std::string::npos) << r.err;
}

TEST_F(Cli, TeacherRerunIsBitIdentical) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  ASSERT_EQ(tiny("train-teacher", out).code, 0);
  const auto model = bytes(out / "seed1/teacher/model.dkdm");
  const auto record = bytes(out / "seed1/teacher/record.tsv");
  ASSERT_EQ(tiny("train-teacher", out).code, 0);
  EXPECT_EQ(bytes(out / "seed1/teacher/model.dkdm"), model);
  EXPECT_EQ(bytes(out / "seed1/teacher/record.tsv"), record);
  EXPECT_NO_THROW(parse_run_record(read_text_file(out / "seed1/teacher/record.tsv")).validate());
}

TEST_F(Cli, ExportedSoftTargetsDifferOnlyInTemperatureAndRows) {
  const auto out = dir("run");
  prepare(out);
  const auto a = bytes(out / "seed1/soft/T1/train.dkst");
  const auto b = bytes(out / "seed1/soft/T2/train.dkst");
  ASSERT_EQ(a.size(), b.size());
  // Magic and version, then f64 temperature, then the rest of the header.
  EXPECT_TRUE(std::equal(a.begin(), a.begin() + 6, b.begin()));
  EXPECT_FALSE(std::equal(a.begin() + 6, a.begin() + 14, b.begin() + 6));
  EXPECT_TRUE(std::equal(a.begin() + 14, a.begin() + 58, b.begin() + 14));

  const auto t1 = read_soft_targets(out / "seed1/soft/T1/train.dkst");
  const auto t2 = read_soft_targets(out / "seed1/soft/T2/train.dkst");
  const auto train = read_dataset(out / "seed1/data/train.dkds");
  EXPECT_TRUE(validate_soft_targets(t1, train).empty());
  EXPECT_TRUE(validate_soft_targets(t2, train).empty());
  EXPECT_EQ(t1.teacher_digest, model_digest(read_model(out / "seed1/teacher/model.dkdm")));
  double h1 = 0.0, h2 = 0.0;
  for (std::size_t t = 0; t < t1.frame_count(); ++t) {
    h1 += entropy(t1.row(t));
    h2 += entropy(t2.row(t));
  }
  EXPECT_GT(h2, h1);
}

TEST_F(Cli, DistillationWithoutSoftTargetsIsAlignmentError) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  const auto r = tiny("train-student", out, {"--regime=reg", "--temperature=2"});
  EXPECT_EQ(r.code, kExitFormat);
  EXPECT_NE(r.err.find("alignment"), std::string::npos) << r.err;
  // Hard training needs no teacher at all.
  EXPECT_EQ(tiny("train-student", out, {"--regime=hard"}).code, 0);
}

TEST_F(Cli, SoftTargetsForAnotherDatasetAreRejected) {
  const auto out = dir("run");
  prepare(out);
  ASSERT_EQ(tiny("generate-data", out, {"--train-utts=17"}).code, 0);
  EXPECT_EQ(tiny("train-student", out, {"--regime=soft", "--temperature=1", "--train-utts=17"}).code,
            kExitFormat);
}

TEST_F(Cli, PretrainSwitchZeroMatchesHard) {
  const auto out = dir("run");
  prepare(out);
  ASSERT_EQ(tiny("train-student", out, {"--regime=hard", "--regime=pretrain", "--temperature=2",
                                         "--pretrain-switch=0"})
                .code,
            0);
  EXPECT_EQ(bytes(out / "seed1/student/hard/model.dkdm"), bytes(out / "seed1/student/pretrain-T2/model.dkdm"));
  const auto hard = parse_run_record(read_text_file(out / "seed1/student/hard/record.tsv"));
  const auto pre = parse_run_record(read_text_file(out / "seed1/student/pretrain-T2/record.tsv"));
  ASSERT_EQ(hard.epochs.size(), pre.epochs.size());
  for (std::size_t e = 0; e < hard.epochs.size(); ++e) {
    EXPECT_EQ(pre.epochs[e].phase, "hard");
    EXPECT_EQ(pre.epochs[e].cv_fa, hard.epochs[e].cv_fa);
    EXPECT_EQ(pre.epochs[e].mean_loss, hard.epochs[e].mean_loss);
  }
}

TEST_F(Cli, FullMatrixReportAndParallelDeterminism) {
  const auto out = dir("serial");
  const auto par = dir("parallel");
  prepare(out);
  prepare(par);
  ASSERT_EQ(tiny("train-student", out).code, 0);
  ASSERT_EQ(tiny("train-student", par, {"--jobs=3"}).code, 0);
  for (const char* cell : {"hard", "soft-T1", "soft-T2", "reg-T1", "reg-T2", "pretrain-T1", "pretrain-T2"}) {
    const auto rel = fs::path("seed1/student") / cell;
    EXPECT_EQ(bytes(out / rel / "model.dkdm"), bytes(par / rel / "model.dkdm")) << cell;
    EXPECT_EQ(bytes(out / rel / "record.tsv"), bytes(par / rel / "record.tsv")) << cell;
  }
  ASSERT_EQ(tiny("variance-report", out).code, 0);
  const auto r = dkt({"report", "--out=" + out.string(), "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* row : {"DNN", "RNN-0", "RNN-T1 (soft)", "RNN-T1 (reg.)", "RNN-T1 (pretrain)",
                          "RNN-T2 (soft)", "RNN-T2 (reg.)", "RNN-T2 (pretrain)"})
    EXPECT_NE(r.out.find(row), std::string::npos) << row;
  EXPECT_NE(r.out.find("Soft + Hard"), std::string::npos);
  EXPECT_NE(r.out.find("Gradient variance"), std::string::npos);

  const auto rows = parse_report_csv(read_text_file(out / "report.csv"));
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_TRUE(check_report_csv(out).empty());

  // Tampering with a run after the report was written is detected.
  auto eval = parse_eval(read_text_file(out / "seed1/student/hard/eval.tsv"));
  eval.fa["test"] = "0.0000";
  write_text_file(out / "seed1/student/hard/eval.tsv", format_eval(eval));
  EXPECT_FALSE(check_report_csv(out).empty());
}

TEST_F(Cli, ReportOnEmptyDirectory) {
  fs::create_directories(dir("nothing"));
  EXPECT_EQ(dkt({"report", "--out=" + dir("nothing").string()}).code, kExitUsage);
  EXPECT_EQ(dkt({"report", "--out=" + dir("missing").string()}).code, kExitUsage);
}

TEST_F(Cli, SingleHardRunGivesOneRowTable) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  ASSERT_EQ(tiny("train-student", out, {"--regime=hard"}).code, 0);
  const auto r = dkt({"report", "--out=" + out.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("RNN-0"), std::string::npos);
  EXPECT_EQ(r.out.find("DNN"), std::string::npos);
  EXPECT_EQ(parse_report_csv(read_text_file(out / "report.csv")).size(), 1u);
}

TEST_F(Cli, EvalAndCorruptCheckpoint) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  ASSERT_EQ(tiny("train-teacher", out).code, 0);
  const auto model = out / "seed1/teacher/model.dkdm";
  const auto r = tiny("eval", out, {"--model=" + model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_eval(r.out).fa, parse_eval(read_text_file(out / "seed1/teacher/eval.tsv")).fa);

  auto data = read_file(model);
  data.resize(data.size() - 1);
  write_file(model, data);
  const auto bad = tiny("eval", out, {"--model=" + model.string()});
  EXPECT_EQ(bad.code, kExitFormat);
  EXPECT_NE(bad.err.find("offset"), std::string::npos);
  EXPECT_EQ(tiny("export-soft", out).code, kExitFormat);
  EXPECT_EQ(tiny("eval", out, {"--model=" + (out / "nope.dkdm").string()}).code, kExitUsage);
}

TEST_F(Cli, NumericFailureExitCode) {
  const auto out = dir("run");
  ASSERT_EQ(tiny("generate-data", out).code, 0);
  const auto r = tiny("train-student", out, {"--regime=hard", "--lr=1e300", "--clip=0"});
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
  // The last good parameters and the partial record are still written.
  EXPECT_TRUE(fs::exists(out / "seed1/student/hard/model.dkdm"));
  EXPECT_EQ(parse_run_info(read_text_file(out / "seed1/student/hard/run.tsv")).at("status"), "aborted");
}

TEST_F(Cli, ConfigFile) {
  const auto out = dir("run");
  fs::create_directories(root_);
  const auto cfg = root_ / "exp.toml";
  write_text_file(cfg, "classes = 3\nfeature-dim = 4\ntrain-utts = 5\ncv-utts = 2\ntest-utts = 2\n"
                       "temperatures = [1.5, 3]\n");
  const auto r = dkt({"generate-data", "--config=" + cfg.string(), "--out=" + out.string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_dataset(out / "seed3/data/train.dkds").num_classes, 3u);
  const auto effective = read_text_file(out / "config.effective");
  EXPECT_NE(effective.find("temperatures = [1.5, 3]"), std::string::npos) << effective;

  // The effective config reloads to the same digest.
  const auto again = dir("again");
  ASSERT_EQ(dkt({"generate-data", "--config=" + (out / "config.effective").string(),
                 "--out=" + again.string(), "--quiet", "--seed=1"})
                .code,
            0);
  EXPECT_EQ(read_text_file(again / "config.digest"), read_text_file(out / "config.digest"));

  write_text_file(cfg, "clases = 3\n");
  const auto typo = dkt({"generate-data", "--config=" + cfg.string(), "--out=" + out.string()});
  EXPECT_EQ(typo.code, kExitUsage);
  EXPECT_NE(typo.err.find("clases"), std::string::npos) << typo.err;
  EXPECT_EQ(dkt({"generate-data", "--config=" + (root_ / "absent.toml").string()}).code, kExitUsage);
}

TEST_F(Cli, DigestIgnoresSweepLists) {
  ExperimentConfig a, b;
  b.seeds = {7};
  b.regimes = {"hard"};
  b.temperatures = {5.0};
  EXPECT_EQ(a.digest(), b.digest());
  b.lr = 2e-4;
  EXPECT_NE(a.digest(), b.digest());
  EXPECT_EQ(a.digest().size(), 16u);
}

}  // namespace
}  // namespace dkt::cli
