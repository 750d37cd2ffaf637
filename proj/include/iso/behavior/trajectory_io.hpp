#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

/// One record per line: `traj_id, [s0,a0,s1,a1,...]` with an optional
/// trailing `, score`. Scores round-trip exactly (17 significant digits).
std::string format_trajectory(std::size_t id, const Trajectory& trajectory);
Trajectory parse_trajectory(const std::string& line, std::size_t* id = nullptr);

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(std::istream& in);

}  // namespace iso
