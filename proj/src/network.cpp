#include "fxtflow/network.hpp"

#include "fxtflow/linalg.hpp"

#include <cmath>
#include <deque>
#include <numeric>

namespace fxt {
namespace {

Matrix kron_identity(const Matrix& L, int m) {
  const int N = static_cast<int>(L.rows());
  Matrix out = Matrix::Zero(N * m, N * m);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (L(i, j) != 0.0) out.block(i * m, j * m, m, m) = L(i, j) * Matrix::Identity(m, m);
  return out;
}

void require_connected(const Graph& graph) {
  require(graph.connected(), ErrorKind::Validation, "graph is not connected");
}

void require_componentwise(const ProtocolSum& g) {
  require(g.is_componentwise(), ErrorKind::DistributednessViolation,
          "protocol " + g.describe() + " is not componentwise, so the flow is not distributed");
}

// Adds a constant so that the quadratic's optimal value is exactly zero.
Objective shift_to_zero(Objective obj, double constant) {
  auto f = obj.f;
  obj.f = [f, constant](const Vector& x) { return f(x) + constant; };
  obj.f_star = 0.0;
  return obj;
}

}  // namespace

Objective consensus_objective(const Graph& graph) {
  require_connected(graph);
  Objective obj = quadratic_objective(graph.laplacian(), Vector::Zero(graph.size()));
  obj.f_star = 0.0;
  return obj;
}

FlowSpec consensus_flow(const Graph& graph, const ProtocolSum& g) {
  require_componentwise(g);
  require_connected(graph);
  const Matrix L = graph.laplacian();
  FlowSpec spec;
  spec.variant = FlowVariant::Consensus;
  spec.description = "consensus: " + g.describe();
  spec.rhs = [L, g](const Vector& x, double, double reg) -> Vector { return -g.eval(L * x, reg); };
  return spec;
}

PartitionedSystem PartitionedSystem::by_rows(const Matrix& A, const Vector& b,
                                             const std::vector<int>& rows_per_agent,
                                             double delta) {
  require(A.rows() == b.size(), ErrorKind::Validation, "A and b have different row counts");
  const int total = std::accumulate(rows_per_agent.begin(), rows_per_agent.end(), 0);
  require(total == A.rows(), ErrorKind::Validation, "row partition does not cover A");
  PartitionedSystem sys;
  sys.layout = Layout::Rows;
  sys.delta = delta;
  int start = 0;
  for (int r : rows_per_agent) {
    require(r >= 1, ErrorKind::Validation, "each agent needs at least one row");
    sys.blocks.push_back(A.middleRows(start, r));
    sys.rhs.push_back(b.segment(start, r));
    start += r;
  }
  sys.validate();
  return sys;
}

void PartitionedSystem::validate() const {
  require(!blocks.empty() && blocks.size() == rhs.size(), ErrorKind::Validation,
          "partitioned system needs one (A_i, b_i) per agent");
  require(delta > 0.0, ErrorKind::Validation, "penalty delta must be positive");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    require(blocks[i].rows() == rhs[i].size(), ErrorKind::Validation,
            "block " + std::to_string(i) + " has mismatched A_i and b_i");
    if (layout == Layout::Rows) {
      require(blocks[i].cols() == blocks[0].cols(), ErrorKind::Validation,
              "row blocks must share the column count");
    } else {
      require(blocks[i].rows() == blocks[0].rows(), ErrorKind::Validation,
              "column blocks must share the row count");
    }
  }
}

Matrix PartitionedSystem::block_diagonal() const {
  int rows = 0, cols = 0;
  for (const auto& B : blocks) {
    rows += static_cast<int>(B.rows());
    cols += static_cast<int>(B.cols());
  }
  Matrix out = Matrix::Zero(rows, cols);
  int r = 0, c = 0;
  for (const auto& B : blocks) {
    out.block(r, c, B.rows(), B.cols()) = B;
    r += static_cast<int>(B.rows());
    c += static_cast<int>(B.cols());
  }
  return out;
}

Vector PartitionedSystem::stacked_rhs() const {
  int rows = 0;
  for (const auto& v : rhs) rows += static_cast<int>(v.size());
  Vector out(rows);
  int r = 0;
  for (const auto& v : rhs) {
    out.segment(r, v.size()) = v;
    r += static_cast<int>(v.size());
  }
  return out;
}

Matrix PartitionedSystem::assembled() const {
  if (layout == Layout::Rows) {
    int rows = 0;
    for (const auto& B : blocks) rows += static_cast<int>(B.rows());
    Matrix out(rows, blocks[0].cols());
    int r = 0;
    for (const auto& B : blocks) {
      out.middleRows(r, B.rows()) = B;
      r += static_cast<int>(B.rows());
    }
    return out;
  }
  int cols = 0;
  for (const auto& B : blocks) cols += static_cast<int>(B.cols());
  Matrix out(blocks[0].rows(), cols);
  int c = 0;
  for (const auto& B : blocks) {
    out.middleCols(c, B.cols()) = B;
    c += static_cast<int>(B.cols());
  }
  return out;
}

Vector PartitionedSystem::assembled_rhs() const {
  if (layout == Layout::Rows) return stacked_rhs();
  Vector out = Vector::Zero(rhs[0].size());
  for (const auto& v : rhs) out += v;
  return out;
}

bool PartitionedSystem::consistent() const {
  const Matrix A = assembled();
  Matrix Ab(A.rows(), A.cols() + 1);
  Ab << A, assembled_rhs();
  return linalg::numerical_rank(A) == linalg::numerical_rank(Ab);
}

Objective row_partition_objective(const PartitionedSystem& sys, const Graph& graph) {
  sys.validate();
  require(sys.layout == PartitionedSystem::Layout::Rows, ErrorKind::Validation,
          "row objective needs a row-partitioned system");
  require(sys.agents() == graph.size(), ErrorKind::Validation, "one agent per graph node");
  require_connected(graph);
  require(sys.consistent(), ErrorKind::Infeasible, "stacked system has no solution");
  const int n = static_cast<int>(sys.blocks[0].cols());
  const Matrix Ahat = sys.block_diagonal();
  const Vector bhat = sys.stacked_rhs();
  const Matrix Q = kron_identity(graph.laplacian(), n) + sys.delta * Ahat.transpose() * Ahat;
  const Vector c = -sys.delta * (Ahat.transpose() * bhat);
  return shift_to_zero(quadratic_objective(0.5 * (Q + Q.transpose()), c),
                       0.5 * sys.delta * bhat.squaredNorm());
}

FlowSpec row_partition_flow(const PartitionedSystem& sys, const Graph& graph,
                            const ProtocolSum& g) {
  require_componentwise(g);
  const Objective obj = row_partition_objective(sys, graph);
  FlowSpec spec = first_order_flow(obj, g);
  spec.variant = FlowVariant::RowPartition;
  spec.description = "row_partition: " + g.describe();
  return spec;
}

Objective column_partition_objective(const PartitionedSystem& sys, const Graph& graph) {
  sys.validate();
  require(sys.layout == PartitionedSystem::Layout::Columns, ErrorKind::Validation,
          "column objective needs a column-partitioned system");
  require(sys.agents() == graph.size(), ErrorKind::Validation, "one agent per graph node");
  require_connected(graph);
  require(sys.consistent(), ErrorKind::Infeasible, "column system has no solution");
  const int m = static_cast<int>(sys.blocks[0].rows());
  const int N = sys.agents();
  const Matrix Ahat = sys.block_diagonal();  // Nm x sum n_i
  const Vector bhat = sys.stacked_rhs();
  const Matrix Lhat = kron_identity(graph.laplacian(), m);
  const int nx = static_cast<int>(Ahat.cols());
  const int ny = N * m;
  // Residual map r(s) = M s - c with s = (x, y, z).
  Matrix M = Matrix::Zero(2 * ny, nx + 2 * ny);
  M.block(0, 0, ny, nx) = Ahat;
  M.block(0, nx, ny, ny) = Matrix::Identity(ny, ny);
  M.block(ny, nx, ny, ny) = Matrix::Identity(ny, ny);
  M.block(ny, nx + ny, ny, ny) = Lhat;
  Vector c = Vector::Zero(2 * ny);
  c.head(ny) = bhat;
  const Matrix Q = M.transpose() * M;
  const Vector lin = -(M.transpose() * c);
  return shift_to_zero(quadratic_objective(0.5 * (Q + Q.transpose()), lin),
                       0.5 * c.squaredNorm());
}

FlowSpec column_partition_flow(const PartitionedSystem& sys, const Graph& graph,
                               const ProtocolSum& gx, const ProtocolSum& gy,
                               const ProtocolSum& gz) {
  require_componentwise(gx);
  require_componentwise(gy);
  require_componentwise(gz);
  const Objective obj = column_partition_objective(sys, graph);
  const int m = static_cast<int>(sys.blocks[0].rows());
  const int ny = sys.agents() * m;
  const int nx = obj.dim - 2 * ny;
  FlowSpec spec;
  spec.variant = FlowVariant::ColumnPartition;
  spec.description = "column_partition: " + gx.describe() + " | " + gy.describe() + " | " +
                     gz.describe();
  spec.rhs = [obj, gx, gy, gz, nx, ny](const Vector& s, double, double reg) -> Vector {
    const Vector grad = obj.grad(s);
    Vector out(s.size());
    out.head(nx) = -gx.eval(grad.head(nx), reg);
    out.segment(nx, ny) = -gy.eval(grad.segment(nx, ny), reg);
    out.tail(ny) = -gz.eval(grad.tail(ny), reg);
    return out;
  };
  return spec;
}

std::vector<int> row_partition_owners(const PartitionedSystem& sys) {
  const int n = static_cast<int>(sys.blocks[0].cols());
  std::vector<int> owners;
  for (int i = 0; i < sys.agents(); ++i)
    for (int k = 0; k < n; ++k) owners.push_back(i);
  return owners;
}

std::vector<int> column_partition_owners(const PartitionedSystem& sys) {
  const int m = static_cast<int>(sys.blocks[0].rows());
  std::vector<int> owners;
  for (int i = 0; i < sys.agents(); ++i)
    for (int k = 0; k < sys.blocks[i].cols(); ++k) owners.push_back(i);
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < sys.agents(); ++i)
      for (int k = 0; k < m; ++k) owners.push_back(i);
  return owners;
}

std::vector<std::vector<int>> hop_distances(const Graph& graph) {
  const int N = graph.size();
  std::vector<std::vector<int>> dist(N, std::vector<int>(N, -1));
  for (int s = 0; s < N; ++s) {
    std::deque<int> queue{s};
    dist[s][s] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : graph.neighbors()[u]) {
        if (dist[s][v] < 0) {
          dist[s][v] = dist[s][u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

bool verify_structural_distributedness(const RhsFn& rhs, const Vector& x, const Graph& graph,
                                       const std::vector<int>& owners, int hops) {
  require(static_cast<int>(owners.size()) == x.size(), ErrorKind::Validation,
          "ownership map has the wrong length");
  const auto dist = hop_distances(graph);
  const Vector base = rhs(x, 0.0, 0.0);
  for (int k = 0; k < x.size(); ++k) {
    Vector probe = x;
    probe[k] += 1.0 + std::abs(x[k]);
    const Vector moved = rhs(probe, 0.0, 0.0);
    for (int idx = 0; idx < x.size(); ++idx) {
      const int i = owners[idx];
      const int d = dist[i][owners[k]];
      if ((d < 0 || d > hops) && moved[idx] != base[idx]) return false;
    }
  }
  return true;
}

DispatchProjection dispatch_projection(const Matrix& P) {
  require(P.rows() == P.cols() && P.rows() > 0, ErrorKind::Validation,
          "dispatch projection must be square");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  require(P.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * scale * P.cols(),
          ErrorKind::Validation, "dispatch projection rows must sum to zero");
  DispatchProjection out;
  out.P = P;
  out.lambda2_ptp = linalg::smallest_nonzero_eigenvalue(P.transpose() * P);
  out.norm = linalg::spectral_norm(P);
  return out;
}

}  // namespace fxt
