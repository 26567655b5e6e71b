// SPDX-License-Identifier: Apache-2.0
#include "dkt/commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "dkt/error.hpp"
#include "dkt/pipeline.hpp"
#include "dkt/report.hpp"

namespace dkt::cli {

namespace {

struct Cell {
  std::uint64_t seed;
  Regime regime;
  double temperature;
};

// Runs cells on `jobs` threads. Each cell is self-contained and deterministic,
// so scheduling order does not affect outputs. The first exception (in cell
// order) is rethrown after all workers finish.
void run_cells(const std::vector<Cell>& cells, std::size_t jobs, const ExperimentConfig& config,
               Progress& progress) {
  std::vector<std::exception_ptr> failures(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        train_student(config, cells[i].seed, cells[i].regime, cells[i].temperature, progress);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

std::vector<Cell> student_cells(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                const std::vector<Regime>& regimes, const std::vector<double>& temps) {
  std::vector<Cell> cells;
  for (auto seed : seeds)
    for (auto regime : regimes) {
      if (regime == Regime::kHard) {
        cells.push_back({seed, regime, 1.0});
        continue;
      }
      for (double t : temps) cells.push_back({seed, regime, t});
    }
  (void)config;
  return cells;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Teacher-student distillation experiments on a synthetic frame-classification task",
               "dkt"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  ExperimentConfig config;
  std::optional<std::uint64_t> seed;
  register_options(app, config, seed);

  auto* gen = app.add_subcommand("generate-data", "Generate train/cv/test splits for each seed");
  auto* teacher = app.add_subcommand("train-teacher", "Train the feed-forward teacher on hard labels");

  std::vector<double> export_temps;
  auto* exp = app.add_subcommand("export-soft", "Write teacher posteriors at temperature T");
  exp->add_option("--temperature,-T", export_temps, "Temperatures (default: config temperatures)");

  std::vector<std::string> student_regimes;
  std::vector<double> student_temps;
  std::size_t jobs = 1;
  auto* student = app.add_subcommand("train-student", "Train the LSTM student under one or more regimes");
  student->add_option("--regime,-r", student_regimes, "Regimes (default: config regimes)");
  student->add_option("--temperature,-T", student_temps, "Temperatures (default: config temperatures)");
  student->add_option("--jobs,-j", jobs, "Independent runs to train concurrently")->capture_default_str();

  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Frame accuracy of a checkpoint on a seed's splits");
  eval->add_option("--model", model_path, "Checkpoint (.dkdm)")->required();

  auto* var = app.add_subcommand("variance-report", "Gradient variance of a fresh student, hard vs soft");

  bool check = false;
  auto* report = app.add_subcommand("report", "Summarise every run under --out");
  report->add_flag("--check", check, "Also verify report.csv against the run directories");

  auto* all = app.add_subcommand("all", "Run the full matrix: data, teacher, soft targets, students, "
                                        "variance and report");
  all->add_option("--jobs,-j", jobs, "Independent runs to train concurrently")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    config.validate();
    const std::vector<std::uint64_t> seeds = seed ? std::vector<std::uint64_t>{*seed} : config.seeds;
    Progress progress(err, config.quiet);

    if (*report) {
      out << write_report(config.out);
      if (check) {
        const auto problems = check_report_csv(config.out);
        for (const auto& p : problems) err << "dkt: " << p << '\n';
        if (!problems.empty()) return kExitFormat;
      }
      return kExitOk;
    }

    write_config_snapshot(config);
    const auto temps_or = [&](const std::vector<double>& given) {
      for (double t : given)
        if (!(t > 0.0)) throw InvalidArgument("temperatures must be positive");
      return given.empty() ? config.temperatures : given;
    };

    if (*gen || *all)
      for (auto s : seeds) generate_data(config, s, progress);
    if (*teacher || *all)
      for (auto s : seeds) train_teacher(config, s, progress);
    if (*exp || *all)
      for (auto s : seeds)
        for (double t : temps_or(export_temps)) export_soft(config, s, t, progress);
    if (*student || *all) {
      std::vector<Regime> regimes;
      for (const auto& name : student_regimes) {
        const auto r = parse_regime(name);
        if (!r) throw InvalidArgument("unknown regime \"" + name + "\"");
        regimes.push_back(*r);
      }
      if (regimes.empty()) regimes = config.regime_list();
      run_cells(student_cells(config, seeds, regimes, temps_or(student_temps)), jobs, config, progress);
    }
    if (*var || *all)
      for (auto s : seeds) variance_report(config, s, progress);
    if (*all) out << write_report(config.out);
    if (*eval) {
      const EvalSummary s = evaluate_model(config, seeds.front(), model_path);
      out << format_eval(s);
    }
    return kExitOk;
  } catch (const NumericOverflow& e) {
    err << "dkt: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "dkt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "dkt: format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const AlignmentError& e) {
    err << "dkt: alignment error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const ShapeError& e) {
    err << "dkt: shape error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const InvalidArgument& e) {
    err << "dkt: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "dkt: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace dkt::cli
