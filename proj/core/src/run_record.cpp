// SPDX-License-Identifier: Apache-2.0
#include "dkt/run_record.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "dkt/error.hpp"

namespace dkt {

namespace {

constexpr std::string_view kTitle = "# dkt-run-record v1";
constexpr std::string_view kHeader =
    "epoch\tphase\tlr\ttrain_fa\tcv_fa\tmean_loss\tvar_hard\tvar_soft\twall_s\tseed\tconfig";

std::string printf_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::uint64_t at) {
  if (field == "-") return std::numeric_limits<double>::quiet_NaN();
  const std::string s(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw FormatError("bad number \"" + s + "\"", at);
  return v;
}

std::uint64_t parse_uint(std::string_view field, std::uint64_t at) {
  const std::string s(field);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || end != s.c_str() + s.size())
    throw FormatError("bad integer \"" + s + "\"", at);
  return v;
}

}  // namespace

std::string format_percent(double value) { return printf_double("%.4f", value); }

std::string format_real(double value) {
  if (std::isnan(value)) return "-";
  return printf_double("%.8f", value);
}

void RunRecord::validate() const {
  for (std::size_t i = 1; i < epochs.size(); ++i) {
    if (epochs[i].epoch <= epochs[i - 1].epoch)
      throw InvalidArgument("run record epochs must strictly increase");
    if (epochs[i].config_digest != epochs[0].config_digest)
      throw InvalidArgument("run record mixes config digests");
  }
}

std::string format_epoch_line(const EpochRecord& e) {
  std::string line = std::to_string(e.epoch);
  line += '\t' + e.phase;
  line += '\t' + printf_double("%.10g", e.learning_rate);
  line += '\t' + format_percent(e.train_fa);
  line += '\t' + format_percent(e.cv_fa);
  line += '\t' + format_real(e.mean_loss);
  line += '\t' + format_real(e.var_hard);
  line += '\t' + format_real(e.var_soft);
  line += '\t' + printf_double("%.3f", e.wall_seconds);
  line += '\t' + std::to_string(e.seed);
  line += '\t' + e.config_digest;
  return line;
}

std::string format_run_record(const RunRecord& record) {
  record.validate();
  std::string out(kTitle);
  out += '\n';
  out += kHeader;
  out += '\n';
  for (const auto& e : record.epochs) {
    out += format_epoch_line(e);
    out += '\n';
  }
  return out;
}

RunRecord parse_run_record(std::string_view text) {
  RunRecord record;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    const std::uint64_t at = pos;
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kTitle) throw FormatError("not a dkt run record", at);
      continue;
    }
    if (line_no == 2) {
      if (line != kHeader) throw FormatError("unexpected run-record column header", at);
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 11)
      throw FormatError("run-record line " + std::to_string(line_no) + " has " +
                            std::to_string(f.size()) + " fields, expected 11",
                        at);
    EpochRecord e;
    e.epoch = parse_uint(f[0], at);
    e.phase = std::string(f[1]);
    e.learning_rate = parse_double(f[2], at);
    e.train_fa = parse_double(f[3], at);
    e.cv_fa = parse_double(f[4], at);
    e.mean_loss = parse_double(f[5], at);
    e.var_hard = parse_double(f[6], at);
    e.var_soft = parse_double(f[7], at);
    e.wall_seconds = parse_double(f[8], at);
    e.seed = parse_uint(f[9], at);
    e.config_digest = std::string(f[10]);
    record.epochs.push_back(std::move(e));
  }
  if (line_no < 2) throw FormatError("run record is missing its header", text.size());
  try {
    record.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what(), 0);
  }
  return record;
}

}  // namespace dkt
