#include "iso/harness/results.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iso/core/errors.hpp"

namespace iso::harness {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("results column " + field + " is not a number: '" + s + "'");
  }
}

}  // namespace

std::string ResultRow::curve_key() const {
  if (!setup.empty()) return "lambda" + fmt("%g", lambda.value_or(0.0)) + "_" + setup;
  return "cf" + (cf ? std::to_string(*cf) : std::string("?")) + "_" + behavior + "_" + irl_method;
}

std::string format_row(const ResultRow& r) {
  std::string line = r.run_id + "," + std::to_string(r.iteration) + "," + r.behavior + "," + r.irl_method + ",";
  line += (r.cf ? std::to_string(*r.cf) : "") + ",";
  line += (r.nf ? fmt("%g", *r.nf) : "") + ",";
  line += fmt("%.17g", r.quality) + "," + fmt("%.3f", r.wall_ms) + "," + r.setup + ",";
  line += r.lambda ? fmt("%g", *r.lambda) : "";
  return line;
}

ResultRow parse_row(const std::string& line) {
  const auto cells = split(line);
  if (cells.size() != 10) {
    throw ConfigError("results row has " + std::to_string(cells.size()) + " columns, expected 10: " + line);
  }
  ResultRow r;
  r.run_id = cells[0];
  r.iteration = static_cast<std::size_t>(to_double(cells[1], "iteration"));
  r.behavior = cells[2];
  r.irl_method = cells[3];
  if (!cells[4].empty()) r.cf = static_cast<std::size_t>(to_double(cells[4], "cf"));
  if (!cells[5].empty()) r.nf = to_double(cells[5], "nf");
  r.quality = to_double(cells[6], "quality");
  r.wall_ms = to_double(cells[7], "wall_ms");
  r.setup = cells[8];
  if (!cells[9].empty()) r.lambda = to_double(cells[9], "lambda");
  return r;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write results file " + path.string());
  write_results(out, rows);
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read results file " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != kResultsHeader) throw ConfigError("unexpected results header in " + path.string());
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

std::map<std::string, std::map<std::string, std::vector<ResultRow>>> group_curves(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::map<std::string, std::vector<ResultRow>>> curves;
  for (const auto& row : rows) curves[row.curve_key()][row.run_id].push_back(row);
  for (auto& [_, runs] : curves) {
    for (auto& [id, run] : runs) {
      std::sort(run.begin(), run.end(), [](const auto& a, const auto& b) { return a.iteration < b.iteration; });
    }
  }
  return curves;
}

std::map<std::string, SummaryStats> summarize_results(const std::vector<ResultRow>& rows) {
  std::map<std::string, SummaryStats> out;
  for (const auto& [key, runs] : group_curves(rows)) {
    std::size_t longest = 0;
    for (const auto& [_, run] : runs) longest = std::max(longest, run.size());
    std::vector<std::vector<double>> values;
    for (const auto& [_, run] : runs) {
      if (run.size() != longest) continue;
      std::vector<double> q;
      for (const auto& row : run) q.push_back(row.quality);
      values.push_back(std::move(q));
    }
    out[key] = summarize(values);
  }
  return out;
}

}  // namespace iso::harness
