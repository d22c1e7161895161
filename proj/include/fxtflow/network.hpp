#pragma once

#include "fxtflow/flows.hpp"
#include "fxtflow/graph.hpp"

#include <vector>

namespace fxt {

/// f(x) = 1/2 x'Lx on a connected graph; minimizers span{1}.
Objective consensus_objective(const Graph& graph);

/// -g(Lx) with a componentwise g.
FlowSpec consensus_flow(const Graph& graph, const ProtocolSum& g);

/// Per-agent blocks of a linear system. Rows layout: agent i holds rows
/// (A_i, b_i) of Ax = b and a copy x_i of the unknown. Columns layout:
/// agent i holds columns A_i (m x n_i) and b_i in R^m with sum A_i x_i = sum b_i.
struct PartitionedSystem {
  enum class Layout { Rows, Columns };

  Layout layout = Layout::Rows;
  std::vector<Matrix> blocks;
  std::vector<Vector> rhs;
  double delta = 1.0;  // penalty weight, rows layout

  static PartitionedSystem by_rows(const Matrix& A, const Vector& b,
                                   const std::vector<int>& rows_per_agent, double delta = 1.0);

  int agents() const { return static_cast<int>(blocks.size()); }
  void validate() const;
  /// blkdiag(A_1, ..., A_N).
  Matrix block_diagonal() const;
  Vector stacked_rhs() const;
  /// Rows layout: vertical stack [A_1; ...; A_N]. Columns layout: [A_1 ... A_N].
  Matrix assembled() const;
  /// Right-hand side of the assembled system.
  Vector assembled_rhs() const;
  /// rank(A) == rank([A b]) for the assembled system.
  bool consistent() const;
};

/// f(x) = 1/2 x'(L kron I)x + delta/2 |A^ x - b^|^2 on R^{Nn}, f* = 0.
Objective row_partition_objective(const PartitionedSystem& sys, const Graph& graph);

/// -g(grad f) for the row objective with componentwise g.
FlowSpec row_partition_flow(const PartitionedSystem& sys, const Graph& graph,
                            const ProtocolSum& g);

/// Joint objective 1/2|y + A^x - b^|^2 + 1/2|y + L^z|^2 on the stacked
/// state (x, y, z), f* = 0.
Objective column_partition_objective(const PartitionedSystem& sys, const Graph& graph);

/// x' = -gx(A^'(y + A^x - b^)), y' = -gy(2y + A^x - b^ + L^z), z' = -gz(L^(y + L^z)).
FlowSpec column_partition_flow(const PartitionedSystem& sys, const Graph& graph,
                               const ProtocolSum& gx, const ProtocolSum& gy,
                               const ProtocolSum& gz);

/// Agent owning each state index, for the stacked layouts above.
std::vector<int> row_partition_owners(const PartitionedSystem& sys);
std::vector<int> column_partition_owners(const PartitionedSystem& sys);

/// Hop distances between all node pairs (-1 when unreachable).
std::vector<std::vector<int>> hop_distances(const Graph& graph);

/// Perturbs every state entry owned by agents more than `hops` away from
/// agent i and checks that agent i's rhs entries do not change.
bool verify_structural_distributedness(const RhsFn& rhs, const Vector& x, const Graph& graph,
                                       const std::vector<int>& owners, int hops);

struct DispatchProjection {
  Matrix P;
  double lambda2_ptp = 0.0;
  double norm = 0.0;
};

/// Validates a zero-row-sum projection for the balance constraint 1'x = const.
DispatchProjection dispatch_projection(const Matrix& P);

}  // namespace fxt
