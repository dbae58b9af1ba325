#pragma once

#include <iosfwd>
#include <string>

#include "core/engine.hpp"

namespace nbrw {

// Trajectory files come in two spellings of the same schema: a JSON-lines
// variant (header object, then one object per generation) and a binary
// variant (magic "NBRWTRJ1"). Either round-trips exactly; save_trajectory
// picks binary for paths ending in .bin, JSON-lines otherwise, and
// load_trajectory sniffs the leading bytes.
void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

void write_trajectory_jsonl(const Trajectory& traj, std::ostream& out);
Trajectory read_trajectory_jsonl(std::istream& in);
void write_trajectory_binary(const Trajectory& traj, std::ostream& out);
Trajectory read_trajectory_binary(std::istream& in);

// Labels are not stored; they are re-derived from parent links on load.
void recompute_labels(Trajectory& traj);

} // namespace nbrw
