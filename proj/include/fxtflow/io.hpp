#pragma once

#include "fxtflow/core.hpp"
#include "fxtflow/graph.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fxt {

struct CaseInstance;

/// 17 significant digits, enough for an exact double round trip.
std::string format_double(double v);

/// Header `t,x_0,...,x_{n-1},f,grad_norm`, one row per sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);
/// Inverse of write_trajectory_csv. settling_time is not part of the file.
Trajectory read_trajectory_csv(const std::string& path);
Trajectory parse_trajectory_csv(const std::string& text);

using Summary = std::vector<std::pair<std::string, std::string>>;
/// Flat key=value lines.
void write_summary(const std::string& path, const Summary& summary);
Summary read_summary(const std::string& path);

/// Comma or whitespace separated numbers, one matrix row per line; '#' starts a comment.
Matrix read_matrix_csv(const std::string& path);
Matrix parse_matrix_csv(const std::string& text);
/// All numbers of the file in reading order.
Vector read_vector_csv(const std::string& path);

/// Lines `u,v[,weight]` with zero-based node ids. Node count is max id + 1
/// unless given.
Graph read_edge_list_csv(const std::string& path, int nodes = 0);
/// One integer per agent (rows or columns held by that agent).
std::vector<int> read_block_sizes(const std::string& path);

/// Matrices, scalars, notes and seed of a case instance as JSON.
std::string instance_json(const CaseInstance& inst);
void write_instance_json(const std::string& path, const CaseInstance& inst);

}  // namespace fxt
