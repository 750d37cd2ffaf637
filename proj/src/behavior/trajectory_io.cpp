#include "iso/behavior/trajectory_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "iso/core/errors.hpp"

namespace iso {

std::string format_trajectory(std::size_t id, const Trajectory& trajectory) {
  std::string line = std::to_string(id) + ", [";
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    if (t > 0) line += ',';
    line += std::to_string(trajectory.steps[t].state);
    line += ',';
    line += std::to_string(trajectory.steps[t].action);
  }
  line += ']';
  if (trajectory.score) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", *trajectory.score);
    line += ", ";
    line += buf;
  }
  return line;
}

Trajectory parse_trajectory(const std::string& line, std::size_t* id) {
  const auto open = line.find('[');
  const auto close = line.find(']');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw InvariantViolation("malformed trajectory record: " + line);
  }
  const auto comma = line.find(',');
  if (comma == std::string::npos || comma > open) throw InvariantViolation("trajectory record lacks an id: " + line);
  if (id) *id = std::stoull(line.substr(0, comma));

  Trajectory trajectory;
  std::vector<std::size_t> values;
  std::stringstream body(line.substr(open + 1, close - open - 1));
  std::string token;
  while (std::getline(body, token, ',')) {
    if (token.find_first_not_of(" \t") == std::string::npos) continue;
    values.push_back(std::stoull(token));
  }
  if (values.size() % 2 != 0) throw InvariantViolation("trajectory record has an unpaired state: " + line);
  for (std::size_t i = 0; i < values.size(); i += 2) trajectory.steps.push_back(Step{values[i], values[i + 1]});

  const auto rest = line.substr(close + 1);
  const auto score_comma = rest.find(',');
  if (score_comma != std::string::npos) {
    const auto text = rest.substr(score_comma + 1);
    if (text.find_first_not_of(" \t\r") != std::string::npos) trajectory.score = std::stod(text);
  }
  return trajectory;
}

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  for (std::size_t i = 0; i < trajectories.size(); ++i) out << format_trajectory(i, trajectories[i]) << '\n';
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_trajectory(line));
  }
  return out;
}

}  // namespace iso
