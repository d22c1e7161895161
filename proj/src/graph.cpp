#include "fxtflow/graph.hpp"

#include "fxtflow/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fxt {

Graph::Graph(int nodes, std::vector<Edge> edges) : nodes_(nodes), edges_(std::move(edges)) {
  require(nodes_ >= 1, ErrorKind::Validation, "graph needs at least one node");
  laplacian_ = Matrix::Zero(nodes_, nodes_);
  for (const Edge& e : edges_) {
    require(e.u >= 0 && e.u < nodes_ && e.v >= 0 && e.v < nodes_, ErrorKind::Validation,
            "edge endpoint out of range");
    require(e.u != e.v, ErrorKind::Validation, "self loops are not allowed");
    require(std::isfinite(e.weight) && e.weight > 0.0, ErrorKind::Validation,
            "edge weights must be positive");
    laplacian_(e.u, e.v) -= e.weight;
    laplacian_(e.v, e.u) -= e.weight;
    laplacian_(e.u, e.u) += e.weight;
    laplacian_(e.v, e.v) += e.weight;
  }
  neighbors_.resize(nodes_);
  for (int i = 0; i < nodes_; ++i)
    for (int j = 0; j < nodes_; ++j)
      if (i != j && laplacian_(i, j) != 0.0) neighbors_[i].push_back(j);
}

Graph Graph::circle(int nodes, double weight) {
  require(nodes >= 3, ErrorKind::Validation, "a circle needs at least three nodes");
  std::vector<Edge> edges;
  for (int i = 0; i < nodes; ++i) edges.push_back({i, (i + 1) % nodes, weight});
  return Graph(nodes, std::move(edges));
}

Graph Graph::complete(int nodes, double weight) {
  std::vector<Edge> edges;
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) edges.push_back({i, j, weight});
  return Graph(nodes, std::move(edges));
}

Graph Graph::path(int nodes, double weight) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < nodes; ++i) edges.push_back({i, i + 1, weight});
  return Graph(nodes, std::move(edges));
}

double Graph::algebraic_connectivity() const {
  if (nodes_ == 1) return 0.0;
  const Vector vals = linalg::symmetric_eigenvalues(laplacian_);
  const double top = vals.maxCoeff();
  if (top <= 0.0) return 0.0;
  return vals[1] > linalg::kZeroCutoff * top ? vals[1] : 0.0;
}

bool Graph::connected() const { return nodes_ == 1 || algebraic_connectivity() > 0.0; }

}  // namespace fxt
