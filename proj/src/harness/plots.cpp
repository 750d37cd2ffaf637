#include "iso/harness/plots.hpp"

#include <cstdio>
#include <fstream>

#include "iso/core/errors.hpp"

namespace iso::harness {
namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const std::vector<ResultRow>& rows,
                                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written{out_dir / "index.csv"};
  auto index = open(written.front());
  index << kIndexHeader << '\n';

  const auto stats = summarize_results(rows);
  for (const auto& [key, summary] : stats) {
    const auto file = out_dir / (key + ".csv");
    auto out = open(file);
    out << kCurveHeader << '\n';
    for (std::size_t k = 0; k < summary.mean.size(); ++k) {
      out << k << ',' << num(summary.mean[k]) << ',' << num(summary.sem[k]) << ',' << summary.count[k] << '\n';
    }
    index << key << ',' << file.filename().string() << ',' << (summary.count.empty() ? 0 : summary.count.front())
          << '\n';
    written.push_back(file);
  }
  return written;
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& results,
                                                  const std::filesystem::path& out_dir) {
  return emit_plot_data(read_results(results), out_dir);
}

}  // namespace iso::harness
