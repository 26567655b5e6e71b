// SPDX-License-Identifier: Apache-2.0
#include "dkt/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "dkt/binary_io.hpp"
#include "dkt/error.hpp"
#include "dkt/pipeline.hpp"

namespace dkt::cli {

namespace {

constexpr const char* kCsvHeader =
    "seed,model,regime,temperature,targets,status,epochs,final_lr,train_fa,cv_fa,test_fa,config";

std::optional<std::uint64_t> seed_of(const std::filesystem::path& dir) {
  const std::string name = dir.filename().string();
  if (name.rfind("seed", 0) != 0 || name.size() == 4) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : name.substr(4)) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

std::vector<std::filesystem::path> sorted_subdirs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

bool load_run(const std::filesystem::path& dir, std::uint64_t seed, RunSummary& run) {
  const auto info_path = dir / "run.tsv";
  if (!std::filesystem::exists(info_path) || !std::filesystem::exists(dir / "eval.tsv") ||
      !std::filesystem::exists(dir / "record.tsv"))
    return false;
  const RunInfo info = parse_run_info(read_text_file(info_path));
  const auto get = [&](const char* key) {
    const auto it = info.find(key);
    if (it == info.end()) throw FormatError(info_path.string() + ": missing key " + key, 0);
    return it->second;
  };
  EvalSummary eval = parse_eval(read_text_file(dir / "eval.tsv"));
  run.seed = seed;
  run.model = get("model");
  run.regime = get("regime");
  run.temperature = get("temperature");
  run.status = get("status");
  run.config = get("config");
  run.train_fa = eval.fa["train"];
  run.cv_fa = eval.fa["cv"];
  run.test_fa = eval.fa["test"];
  run.dir = dir;
  run.record = parse_run_record(read_text_file(dir / "record.tsv"));
  return true;
}

// Row order of the table: teacher, hard baseline, then per temperature the
// distillation regimes.
std::tuple<int, double, int> row_key(const RunSummary& r) {
  if (r.model == "teacher") return {0, 0.0, 0};
  static const std::map<std::string, int> order{
      {"hard", 0}, {"soft", 1}, {"reg", 2}, {"pretrain", 3}, {"logitmatch", 4}};
  const auto it = order.find(r.regime);
  const int idx = it == order.end() ? 9 : it->second;
  if (idx == 0) return {1, 0.0, 0};
  return {2, std::stod(r.temperature), idx};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

// Quotes only when needed; embedded quotes are doubled.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') cell += c;
      else if (i + 1 < line.size() && line[i + 1] == '"') cell += line[++i];
      else quoted = false;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string targets_label(const std::string& regime) {
  if (regime == "hard") return "Hard";
  if (regime == "soft") return "Soft";
  if (regime == "reg") return "Soft + Hard";
  if (regime == "pretrain") return "Soft, Hard";
  if (regime == "logitmatch") return "Logits";
  return regime;
}

std::string row_label(const RunSummary& run) {
  if (run.model == "teacher") return "DNN";
  if (run.regime == "hard") return "RNN-0";
  const std::string tag = run.regime == "reg" ? "reg." : run.regime;
  return "RNN-T" + run.temperature + " (" + tag + ")";
}

std::vector<RunSummary> collect_runs(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw IoError("output directory not found", root.string());
  std::vector<std::pair<std::uint64_t, std::filesystem::path>> seeds;
  for (const auto& dir : sorted_subdirs(root))
    if (auto s = seed_of(dir)) seeds.emplace_back(*s, dir);
  std::sort(seeds.begin(), seeds.end());

  std::vector<RunSummary> runs;
  for (const auto& [seed, dir] : seeds) {
    RunSummary run;
    if (load_run(dir / "teacher", seed, run)) runs.push_back(run);
    for (const auto& sdir : sorted_subdirs(dir / "student"))
      if (load_run(sdir, seed, run)) runs.push_back(run);
  }
  if (runs.empty()) throw IoError("no completed runs found", root.string());
  std::stable_sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) {
    return std::make_tuple(row_key(a), a.seed) < std::make_tuple(row_key(b), b.seed);
  });
  return runs;
}

std::vector<VarianceEntry> collect_variance(const std::filesystem::path& root) {
  std::vector<VarianceEntry> out;
  for (const auto& dir : sorted_subdirs(root)) {
    if (!seed_of(dir)) continue;
    const auto path = dir / "variance.tsv";
    if (!std::filesystem::exists(path)) continue;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::uint64_t offset = 0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const std::uint64_t at = offset;
      offset += line.size() + 1;
      if (n++ < 2 || line.empty()) continue;
      std::istringstream fields(line);
      VarianceEntry e;
      std::string frames, var;
      if (!(fields >> e.seed >> e.targets >> e.temperature >> frames >> var))
        throw FormatError(path.string() + ": malformed variance row", at);
      e.var = std::stod(var);
      out.push_back(e);
    }
  }
  return out;
}

std::string format_report_text(const std::vector<RunSummary>& runs,
                               const std::vector<VarianceEntry>& variance) {
  struct Cell {
    std::string label, targets;
    std::vector<double> tr, cv, test;
    std::size_t aborted = 0;
  };
  std::vector<Cell> rows;
  std::map<std::string, std::size_t> index;
  for (const auto& r : runs) {
    const std::string label = row_label(r);
    auto [it, inserted] = index.emplace(label, rows.size());
    if (inserted) rows.push_back({label, targets_label(r.regime), {}, {}, {}, 0});
    Cell& c = rows[it->second];
    c.tr.push_back(std::stod(r.train_fa));
    c.cv.push_back(std::stod(r.cv_fa));
    c.test.push_back(std::stod(r.test_fa));
    if (r.status != "ok") ++c.aborted;
  }

  std::string s = "Frame accuracy (%), median over seeds\n\n";
  s += pad("Model", 22) + pad("Targets", 13) + lpad("Runs", 5) + lpad("TR FA", 9) + lpad("CV FA", 9) +
       lpad("TEST FA", 9) + "\n";
  s += std::string(67, '-') + "\n";
  for (const auto& c : rows) {
    std::string runs_col = std::to_string(c.tr.size());
    if (c.aborted > 0) runs_col += "!";
    s += pad(c.label, 22) + pad(c.targets, 13) + lpad(runs_col, 5) + lpad(fixed(median(c.tr), 2), 9) +
         lpad(fixed(median(c.cv), 2), 9) + lpad(fixed(median(c.test), 2), 9) + "\n";
  }
  if (std::any_of(rows.begin(), rows.end(), [](const Cell& c) { return c.aborted > 0; }))
    s += "(!: includes aborted runs)\n";

  if (!variance.empty()) {
    std::map<std::uint64_t, double> hard;
    std::map<std::string, std::map<std::uint64_t, double>> soft;
    for (const auto& v : variance) {
      if (v.targets == "hard") hard[v.seed] = v.var;
      else soft[v.temperature][v.seed] = v.var;
    }
    s += "\nGradient variance at initialisation (training split)\n\n";
    s += pad("Targets", 13) + lpad("Seeds", 6) + lpad("Median var", 14) + lpad("<= hard", 9) + "\n";
    s += std::string(42, '-') + "\n";
    if (!hard.empty()) {
      std::vector<double> h;
      for (const auto& [seed, v] : hard) h.push_back(v);
      s += pad("Hard", 13) + lpad(std::to_string(h.size()), 6) + lpad(fixed(median(h), 6), 14) +
           lpad("-", 9) + "\n";
    }
    std::vector<std::pair<double, std::string>> temps;
    for (const auto& [t, m] : soft) temps.emplace_back(std::stod(t), t);
    std::sort(temps.begin(), temps.end());
    for (const auto& [tv, t] : temps) {
      std::vector<double> vals;
      std::size_t below = 0, paired = 0;
      for (const auto& [seed, v] : soft[t]) {
        vals.push_back(v);
        if (auto it = hard.find(seed); it != hard.end()) {
          ++paired;
          if (v <= it->second) ++below;
        }
      }
      s += pad("Soft T=" + t, 13) + lpad(std::to_string(vals.size()), 6) +
           lpad(fixed(median(vals), 6), 14) +
           lpad(std::to_string(below) + "/" + std::to_string(paired), 9) + "\n";
    }
  }
  return s;
}

std::string format_report_csv(const std::vector<RunSummary>& runs) {
  std::string s = std::string(kCsvHeader) + "\n";
  for (const auto& r : runs) {
    char buf[64] = "-";
    if (!r.record.epochs.empty()) std::snprintf(buf, sizeof buf, "%.10g", r.record.epochs.back().learning_rate);
    s += std::to_string(r.seed) + ',' + r.model + ',' + r.regime + ',' + r.temperature + ',' +
         csv_field(targets_label(r.regime)) + ',' + r.status + ',' + std::to_string(r.record.epochs.size()) + ',' +
         buf + ',' + r.train_fa + ',' + r.cv_fa + ',' + r.test_fa + ',' + r.config + '\n';
  }
  return s;
}

std::vector<CsvRow> parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::uint64_t offset = 0;
  std::vector<CsvRow> rows;
  bool header = true;
  const std::size_t columns = split_csv_line(kCsvHeader).size();
  while (std::getline(in, line)) {
    const std::uint64_t at = offset;
    offset += line.size() + 1;
    if (header) {
      if (line != kCsvHeader) throw FormatError("unexpected CSV header", at);
      header = false;
      continue;
    }
    auto cells = split_csv_line(line);
    if (cells.size() != columns) throw FormatError("wrong number of CSV columns", at);
    rows.push_back({std::move(cells)});
  }
  if (header) throw FormatError("empty CSV", 0);
  return rows;
}

std::vector<std::string> check_report_csv(const std::filesystem::path& root) {
  std::vector<std::string> problems;
  const auto rows = parse_report_csv(read_text_file(root / "report.csv"));
  const auto runs = collect_runs(root);
  if (rows.size() != runs.size()) {
    problems.push_back("report.csv has " + std::to_string(rows.size()) + " rows, found " +
                       std::to_string(runs.size()) + " runs");
    return problems;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const auto& c = rows[i].cells;
    const auto expect = [&](std::size_t col, const std::string& want, const char* what) {
      if (c[col] != want)
        problems.push_back("row " + std::to_string(i + 1) + " " + what + ": csv " + c[col] + ", run " + want);
    };
    expect(0, std::to_string(r.seed), "seed");
    expect(1, r.model, "model");
    expect(2, r.regime, "regime");
    expect(3, r.temperature, "temperature");
    expect(5, r.status, "status");
    expect(6, std::to_string(r.record.epochs.size()), "epochs");
    expect(8, r.train_fa, "train_fa");
    expect(9, r.cv_fa, "cv_fa");
    expect(10, r.test_fa, "test_fa");
    expect(11, r.config, "config");
    if (!r.record.epochs.empty() && r.record.epochs.back().config_digest != r.config)
      problems.push_back("row " + std::to_string(i + 1) + ": record digest differs from run metadata");
  }
  return problems;
}

std::string write_report(const std::filesystem::path& root) {
  const auto runs = collect_runs(root);
  const auto text = format_report_text(runs, collect_variance(root));
  write_text_file(root / "report.txt", text);
  write_text_file(root / "report.csv", format_report_csv(runs));
  return text;
}

}  // namespace dkt::cli
