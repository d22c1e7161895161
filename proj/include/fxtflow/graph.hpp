#pragma once

#include "fxtflow/core.hpp"

#include <vector>

namespace fxt {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Weighted undirected graph with Laplacian L = D - W.
class Graph {
 public:
  Graph(int nodes, std::vector<Edge> edges);

  static Graph circle(int nodes, double weight = 1.0);
  static Graph complete(int nodes, double weight = 1.0);
  static Graph path(int nodes, double weight = 1.0);

  int size() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& laplacian() const { return laplacian_; }
  /// Sorted neighbor lists (nonzero off-diagonal entries).
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

  /// lambda_2(L) from a symmetric eigensolve; 0 when disconnected.
  double algebraic_connectivity() const;
  bool connected() const;

 private:
  int nodes_;
  std::vector<Edge> edges_;
  Matrix laplacian_;
  std::vector<std::vector<int>> neighbors_;
};

}  // namespace fxt
