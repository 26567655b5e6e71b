// SPDX-License-Identifier: Apache-2.0
#include "dkt/pipeline.hpp"

#include <ostream>
#include <sstream>

#include "dkt/binary_io.hpp"
#include "dkt/error.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/formats.hpp"
#include "dkt/random.hpp"
#include "dkt/run_record.hpp"

namespace dkt::cli {

namespace {

constexpr const char* kSplits[] = {"train", "cv", "test"};

std::vector<std::pair<std::string, std::string>> parse_kv(std::string_view text, std::string_view title) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::uint64_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const std::uint64_t at = offset;
    offset += line.size() + 1;
    if (first) {
      if (line != title) throw FormatError("expected \"" + std::string(title) + "\"", at);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected key<TAB>value", at);
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (first) throw FormatError("empty file", 0);
  return out;
}

FrameDataset load_split(const ExperimentConfig& config, std::uint64_t seed, const std::string& split) {
  const auto path = Layout(config.out).split_path(config, seed, split);
  if (!std::filesystem::exists(path)) throw IoError("dataset file not found", path.string());
  return read_dataset(path);
}

LstmProjParams fresh_student(const ExperimentConfig& config, std::uint64_t seed) {
  LstmProjParams p = make_lstm(config.student_shape());
  Rng rng(derive_seed(seed, SeedStream::kStudentInit));
  init_lstm(p, rng, config.init_scale, config.forget_bias);
  return p;
}

EvalSummary summarize(const ModelParams& model, const FrameDataset& train, const FrameDataset& cv,
                      const FrameDataset& test) {
  EvalSummary s;
  s.fa["train"] = format_percent(frame_accuracy(model, train));
  s.fa["cv"] = format_percent(frame_accuracy(model, cv));
  s.fa["test"] = format_percent(frame_accuracy(model, test));
  return s;
}

void write_run(const std::filesystem::path& dir, const ModelParams& model, const RunRecord& record,
               const EvalSummary& eval, const RunInfo& info) {
  std::filesystem::create_directories(dir);
  write_model(dir / "model.dkdm", model);
  write_text_file(dir / "record.tsv", format_run_record(record));
  write_text_file(dir / "eval.tsv", format_eval(eval));
  write_text_file(dir / "run.tsv", format_run_info(info));
}

}  // namespace

void Progress::line(const std::string& text) {
  if (quiet_) return;
  std::lock_guard lock(mutex_);
  out_ << text << '\n' << std::flush;
}

EpochCallback Progress::epoch_logger(std::string tag) {
  return [this, tag = std::move(tag)](const EpochRecord& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] epoch %zu %-5s lr %.3g  loss %.4f  TR %.2f  CV %.2f",
                  tag.c_str(), e.epoch, e.phase.c_str(), e.learning_rate, e.mean_loss, e.train_fa,
                  e.cv_fa);
    line(buf);
  };
}

std::string format_eval(const EvalSummary& summary) {
  std::string s = "# dkt-eval v1\n";
  for (const char* split : kSplits) {
    const auto it = summary.fa.find(split);
    if (it != summary.fa.end()) s += std::string(split) + '\t' + it->second + '\n';
  }
  return s;
}

EvalSummary parse_eval(std::string_view text) {
  EvalSummary s;
  for (auto& [k, v] : parse_kv(text, "# dkt-eval v1")) s.fa[k] = v;
  return s;
}

std::string format_run_info(const RunInfo& info) {
  std::string s = "# dkt-run v1\n";
  for (const auto& [k, v] : info) s += k + '\t' + v + '\n';
  return s;
}

RunInfo parse_run_info(std::string_view text) {
  RunInfo info;
  for (auto& [k, v] : parse_kv(text, "# dkt-run v1")) info[k] = v;
  return info;
}

void write_config_snapshot(const ExperimentConfig& config) {
  const std::filesystem::path root(config.out);
  write_text_file(root / "config.effective", config.canonical_text());
  write_text_file(root / "config.digest", config.digest() + "\n");
}

void generate_data(const ExperimentConfig& config, std::uint64_t seed, Progress& progress) {
  if (!config.data_dir.empty())
    throw InvalidArgument("generate-data writes under --out; unset data-dir to generate");
  const SplitSet splits = generate_synth(config.task(), derive_seed(seed, SeedStream::kGenerator));
  const Layout layout(config.out);
  const auto dir = layout.data_dir(config, seed);
  const FrameDataset* sets[] = {&splits.train, &splits.cv, &splits.test};
  for (std::size_t i = 0; i < 3; ++i) {
    write_dataset(dir / (std::string(kSplits[i]) + ".dkds"), *sets[i]);
    write_text_file(dir / (std::string(kSplits[i]) + ".manifest.txt"), manifest_text(*sets[i]));
  }
  progress.line("[seed " + std::to_string(seed) + "] wrote " + dir.string() + " (" +
                std::to_string(splits.train.frame_count()) + " train frames)");
}

void train_teacher(const ExperimentConfig& config, std::uint64_t seed, Progress& progress) {
  const auto train = load_split(config, seed, "train");
  const auto cv = load_split(config, seed, "cv");
  const auto test = load_split(config, seed, "test");
  FeedForwardParams init = make_feedforward(config.teacher_dims());
  Rng rng(derive_seed(seed, SeedStream::kTeacherInit));
  init_uniform(init, rng, config.init_scale);
  const RunIdentity id{seed, config.digest()};
  auto run = dkt::train_teacher(std::move(init), train, cv, config.teacher_schedule(), id,
                                progress.epoch_logger("seed " + std::to_string(seed) + " teacher"));
  RunInfo info{{"model", "teacher"}, {"regime", "hard"}, {"temperature", "1"},
               {"seed", std::to_string(seed)}, {"config", id.config_digest},
               {"epochs", std::to_string(run.record.epochs.size())},
               {"status", run.aborted ? "aborted" : "ok"}};
  write_run(Layout(config.out).teacher_dir(seed), run.model, run.record,
            summarize(run.model, train, cv, test), info);
  if (run.aborted) throw NumericOverflow("teacher training aborted: " + run.diagnostic);
}

void export_soft(const ExperimentConfig& config, std::uint64_t seed, double temperature,
                 Progress& progress) {
  const Layout layout(config.out);
  const auto teacher_path = layout.teacher_dir(seed) / "model.dkdm";
  if (!std::filesystem::exists(teacher_path))
    throw IoError("teacher checkpoint not found", teacher_path.string());
  const ModelParams model = read_model(teacher_path);
  const auto* teacher = std::get_if<FeedForwardParams>(&model);
  if (teacher == nullptr) throw FormatError("teacher checkpoint is not a feed-forward model", 5);
  const auto train = load_split(config, seed, "train");
  const SoftTargetSet set = export_soft_targets(*teacher, train, temperature, model_digest(model));
  const auto path = layout.soft_path(seed, temperature);
  write_soft_targets(path, set);

  // Self-check: the written file must decode to the same set and fit the data.
  const SoftTargetSet back = read_soft_targets(path);
  if (!(back == set)) throw FormatError("soft-target file did not round-trip", 0);
  const auto violations = validate_soft_targets(back, train);
  if (!violations.empty()) throw AlignmentError("exported soft targets invalid: " + violations.front());
  progress.line("[seed " + std::to_string(seed) + "] wrote " + path.string());
}

void train_student(const ExperimentConfig& config, std::uint64_t seed, Regime regime,
                   double temperature, Progress& progress) {
  const Layout layout(config.out);
  const auto train = load_split(config, seed, "train");
  const auto cv = load_split(config, seed, "cv");
  const auto test = load_split(config, seed, "test");
  const double t = regime == Regime::kHard ? 1.0 : temperature;

  std::optional<SoftTargetSet> soft;
  if (needs_soft_targets(regime)) {
    const auto path = layout.soft_path(seed, t);
    if (!std::filesystem::exists(path))
      throw AlignmentError("regime " + std::string(regime_name(regime)) +
                           " needs soft targets; not found: " + path.string());
    soft = read_soft_targets(path);
    const auto violations = validate_soft_targets(*soft, train);
    if (!violations.empty())
      throw AlignmentError("soft targets " + path.string() + " do not fit the training split: " +
                           violations.front());
  }

  const auto spec = DistillLossSpec::for_regime(regime, t, config.alpha);
  const RunIdentity id{seed, config.digest()};
  std::string tag = "seed " + std::to_string(seed) + " " + std::string(regime_name(regime));
  if (regime != Regime::kHard) tag += " T" + temperature_label(t);
  auto run = run_training(spec, fresh_student(config, seed), train, cv, soft ? &*soft : nullptr,
                          config.student_schedule(), id, progress.epoch_logger(tag));
  RunInfo info{{"model", "student"}, {"regime", std::string(regime_name(regime))},
               {"temperature", temperature_label(t)}, {"seed", std::to_string(seed)},
               {"config", id.config_digest}, {"epochs", std::to_string(run.record.epochs.size())},
               {"status", run.aborted ? "aborted" : "ok"}};
  write_run(layout.student_dir(seed, regime, t), run.model, run.record,
            summarize(run.model, train, cv, test), info);
  if (run.aborted) throw NumericOverflow("student training aborted: " + run.diagnostic);
}

std::vector<VarianceRow> variance_report(const ExperimentConfig& config, std::uint64_t seed,
                                         Progress& progress) {
  const Layout layout(config.out);
  const auto train = load_split(config, seed, "train");
  const ModelParams student = fresh_student(config, seed);
  std::vector<VarianceRow> rows;
  rows.push_back({"hard", 1.0, gradient_variance_report(student, train)});
  for (double t : config.temperatures) {
    const auto path = layout.soft_path(seed, t);
    if (!std::filesystem::exists(path)) throw IoError("soft-target file not found", path.string());
    const auto soft = read_soft_targets(path);
    rows.push_back({"soft", t, gradient_variance_report(student, train, soft)});
  }
  write_text_file(layout.variance_path(seed), format_variance(seed, rows));
  progress.line("[seed " + std::to_string(seed) + "] wrote " + layout.variance_path(seed).string());
  return rows;
}

std::string format_variance(std::uint64_t seed, const std::vector<VarianceRow>& rows) {
  std::string s = "# dkt-variance v1\nseed\ttargets\ttemperature\tframes\tvar\tvar_first_term\n";
  for (const auto& r : rows) {
    s += std::to_string(seed) + '\t' + r.targets + '\t' + temperature_label(r.temperature) + '\t' +
         std::to_string(r.report.frames) + '\t' + format_real(r.report.total) + '\t' +
         format_real(r.report.total_first_term) + '\n';
  }
  return s;
}

EvalSummary evaluate_model(const ExperimentConfig& config, std::uint64_t seed,
                           const std::filesystem::path& model_path) {
  if (!std::filesystem::exists(model_path)) throw IoError("model checkpoint not found", model_path.string());
  const ModelParams model = read_model(model_path);
  return summarize(model, load_split(config, seed, "train"), load_split(config, seed, "cv"),
                   load_split(config, seed, "test"));
}

}  // namespace dkt::cli
