#include "fxtflow/config.hpp"

#include "fxtflow/io.hpp"
#include "fxtflow/linalg.hpp"
#include "fxtflow/network.hpp"
#include "fxtflow/problems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace fxt {
namespace {

using nlohmann::json;

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
    fail(ErrorKind::Configuration, std::string("field '") + key + "' must be a number");
  }
  require(v.is_number(), ErrorKind::Configuration, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double required_number(const json& j, const char* key) {
  require(j.contains(key), ErrorKind::Configuration, std::string("missing field '") + key + "'");
  return number(j, key, 0.0);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

// Closed-form bound for a two-term protocol with tabulated constants.
struct PairConstants {
  double sigma, p, rho, q;
};

std::optional<PairConstants> pair_constants(const ProtocolSum& g, int n) {
  if (g.terms().size() != 2) return std::nullopt;
  const ClassConstants a = class_constants(g.terms()[0], n);
  const ClassConstants b = class_constants(g.terms()[1], n);
  if (!a.tabulated() || !b.tabulated()) return std::nullopt;
  if (a.exponent < 1.0 && b.exponent > 1.0) return PairConstants{a.coefficient, a.exponent, b.coefficient, b.exponent};
  if (b.exponent < 1.0 && a.exponent > 1.0) return PairConstants{b.coefficient, b.exponent, a.coefficient, a.exponent};
  return std::nullopt;
}

Objective build_objective(const json& pj, const std::string& base, std::optional<Graph>& graph) {
  const std::string type = pj.at("type").get<std::string>();
  if (type == "quadratic") {
    const Matrix Q = json_matrix(pj.at("Q"), base);
    const Vector c = pj.contains("c") ? json_vector(pj.at("c"), base) : Vector::Zero(Q.rows());
    return quadratic_objective(Q, c);
  }
  if (type == "least_squares") {
    return least_squares_objective(json_matrix(pj.at("A"), base), json_vector(pj.at("b"), base));
  }
  if (type == "dispatch") {
    return dispatch_objective(json_vector(pj.at("a"), base), json_vector(pj.at("b"), base),
                              json_vector(pj.at("c"), base));
  }
  if (type == "consensus") {
    const json& e = pj.at("edges");
    const int nodes = pj.value("nodes", 0);
    if (e.is_string()) {
      graph = read_edge_list_csv(resolve(base, e.get<std::string>()), nodes);
    } else {
      std::vector<Edge> edges;
      int max_id = -1;
      for (const json& row : e) {
        require(row.is_array() && (row.size() == 2 || row.size() == 3), ErrorKind::Configuration,
                "edges must be [u, v] or [u, v, w]");
        Edge edge{row[0].get<int>(), row[1].get<int>(), row.size() == 3 ? row[2].get<double>() : 1.0};
        max_id = std::max({max_id, edge.u, edge.v});
        edges.push_back(edge);
      }
      graph = Graph(nodes > 0 ? nodes : max_id + 1, std::move(edges));
    }
    return consensus_objective(*graph);
  }
  fail(ErrorKind::Configuration, "unknown problem type '" + type + "'");
}

ProxFunction build_prox(const json& j, int n, const std::string& base) {
  const std::string kind = j.value("kind", std::string("zero"));
  auto bound_vec = [&](const char* key, double fallback) -> Vector {
    if (!j.contains(key)) return Vector::Constant(n, fallback);
    const json& v = j.at(key);
    if (v.is_number()) return Vector::Constant(n, v.get<double>());
    return json_vector(v, base);
  };
  if (kind == "zero") return ProxFunction::zero();
  if (kind == "l1") return ProxFunction::l1(required_number(j, "gamma"));
  if (kind == "box") return ProxFunction::box(bound_vec("lower", -kInfinity), bound_vec("upper", kInfinity));
  if (kind == "l1_plus_box")
    return ProxFunction::l1_plus_box(required_number(j, "gamma"), bound_vec("lower", -kInfinity),
                                     bound_vec("upper", kInfinity));
  fail(ErrorKind::Configuration, "unknown prox kind '" + kind + "'");
}

}  // namespace

Protocol parse_protocol(const json& j) {
  require(j.is_object() && j.contains("kind"), ErrorKind::Configuration, "protocol needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const double scale = number(j, "scale", 1.0);
  if (kind == "norm_subgradient") return Protocol::norm_subgradient(required_number(j, "r"), scale);
  if (kind == "rescaled") return Protocol::rescaled(required_number(j, "p"), number(j, "r", 2.0), scale);
  if (kind == "power") return Protocol::power(required_number(j, "q"), number(j, "r", 2.0), scale);
  if (kind == "componentwise_power") return Protocol::componentwise_power(required_number(j, "alpha"), scale);
  if (kind == "signum") return Protocol::signum(scale);
  if (kind == "exponential_l2") return Protocol::exponential_l2(scale);
  if (kind == "exponential_l1") return Protocol::exponential_l1(scale);
  if (kind == "identity") return Protocol::identity(scale);
  if (kind == "exp_scaled")
    return Protocol::exp_scaled_norm_subgradient(number(j, "s", 2.0), number(j, "r", 2.0), scale);
  fail(ErrorKind::Configuration, "unknown protocol kind '" + kind + "'");
}

ProtocolSum parse_protocol_sum(const json& j) {
  if (j.is_array()) {
    require(!j.empty(), ErrorKind::Configuration, "protocol list is empty");
    std::vector<Protocol> terms;
    for (const json& t : j) terms.push_back(parse_protocol(t));
    return ProtocolSum(std::move(terms));
  }
  return ProtocolSum(parse_protocol(j));
}

json protocol_to_json(const Protocol& g) {
  json j;
  switch (g.kind()) {
    case ProtocolKind::NormSubgradient: j["kind"] = "norm_subgradient"; break;
    case ProtocolKind::Rescaled: j["kind"] = "rescaled"; j["p"] = g.p(); break;
    case ProtocolKind::Power: j["kind"] = "power"; j["q"] = g.q(); break;
    case ProtocolKind::ComponentwisePower: j["kind"] = "componentwise_power"; j["alpha"] = g.alpha(); break;
    case ProtocolKind::Signum: j["kind"] = "signum"; break;
    case ProtocolKind::ExponentialL2: j["kind"] = "exponential_l2"; break;
    case ProtocolKind::ExponentialL1: j["kind"] = "exponential_l1"; break;
    case ProtocolKind::Identity: j["kind"] = "identity"; break;
    case ProtocolKind::ExpScaledNormSubgradient: j["kind"] = "exp_scaled"; j["s"] = g.s(); break;
  }
  switch (g.kind()) {
    case ProtocolKind::NormSubgradient:
    case ProtocolKind::Rescaled:
    case ProtocolKind::Power:
    case ProtocolKind::ExpScaledNormSubgradient:
      j["r"] = std::isinf(g.r()) ? json("inf") : json(g.r());
      break;
    default: break;
  }
  j["scale"] = g.scale();
  return j;
}

DisturbanceModel parse_disturbance(const json& j, int dim) {
  const std::string kind = j.value("kind", std::string("none"));
  if (kind == "none") return DisturbanceModel::none();
  if (kind == "sinusoid") {
    Vector amp;
    const json& a = j.at("amplitude");
    if (a.is_number()) {
      amp = Vector::Constant(dim, a.get<double>());
    } else {
      amp = json_vector(a, ".");
    }
    require(amp.size() == dim, ErrorKind::Configuration, "disturbance amplitude has wrong length");
    return DisturbanceModel::sinusoid(amp, number(j, "frequency", 1.0));
  }
  if (kind == "state_scaled") {
    const std::string dir = j.value("direction", std::string("rotating"));
    DisturbanceModel::Direction d;
    if (dir == "rotating") d = DisturbanceModel::Direction::Rotating;
    else if (dir == "constant") d = DisturbanceModel::Direction::Constant;
    else if (dir == "along_gradient") d = DisturbanceModel::Direction::AlongGradient;
    else if (dir == "random") d = DisturbanceModel::Direction::Random;
    else fail(ErrorKind::Configuration, "unknown disturbance direction '" + dir + "'");
    return DisturbanceModel::state_scaled_plus_bounded(required_number(j, "epsilon"),
                                                       required_number(j, "dbar"), d);
  }
  fail(ErrorKind::Configuration, "unknown disturbance kind '" + kind + "'");
}

IntegratorConfig parse_integrator(const json& j, IntegratorConfig base) {
  base.dt = number(j, "dt", base.dt);
  base.t_max = number(j, "t_max", base.t_max);
  base.settle_tol = number(j, "settle_tol", base.settle_tol);
  base.chatter_regularization = number(j, "chatter_regularization", base.chatter_regularization);
  base.record_stride = j.value("record_stride", base.record_stride);
  base.seed = j.value("seed", base.seed);
  base.stop_when_settled = j.value("stop_when_settled", base.stop_when_settled);
  base.validate();
  return base;
}

Matrix json_matrix(const json& j, const std::string& base_dir) {
  if (j.is_string()) return read_matrix_csv(resolve(base_dir, j.get<std::string>()));
  require(j.is_array() && !j.empty(), ErrorKind::Configuration, "matrix must be a nonempty array or a path");
  if (!j.front().is_array()) {
    Matrix m(j.size(), 1);
    for (std::size_t i = 0; i < j.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
    return m;
  }
  const std::size_t cols = j.front().size();
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_array() && j[i].size() == cols, ErrorKind::Configuration, "ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

Vector json_vector(const json& j, const std::string& base_dir) {
  if (j.is_string()) return read_vector_csv(resolve(base_dir, j.get<std::string>()));
  const Matrix m = json_matrix(j, base_dir);
  require(m.cols() == 1 || m.rows() == 1, ErrorKind::Configuration, "expected a vector");
  return m.cols() == 1 ? Vector(m.col(0)) : Vector(m.row(0).transpose());
}

SolveSetup parse_solve_config(const json& doc, const std::string& base_dir) {
  require(doc.is_object(), ErrorKind::Configuration, "config must be a JSON object");
  require(doc.value("schema_version", 0) == kConfigSchemaVersion, ErrorKind::Configuration,
          "unsupported or missing schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  std::optional<Graph> graph;
  SolveSetup s;
  s.objective = build_objective(doc.at("problem"), base_dir, graph);
  if (doc.at("problem").contains("strongly_convex"))
    s.objective.strongly_convex = doc.at("problem").at("strongly_convex").get<bool>();
  const int n = s.objective.dim;
  s.disturbance = doc.contains("disturbance") ? parse_disturbance(doc.at("disturbance"), n)
                                              : DisturbanceModel::none();
  s.integrator = doc.contains("integrator") ? parse_integrator(doc.at("integrator")) : IntegratorConfig{};
  require(doc.contains("x0"), ErrorKind::Configuration, "missing 'x0'");
  s.x0 = json_vector(doc.at("x0"), base_dir);
  require(s.x0.size() == n, ErrorKind::Configuration, "x0 has wrong dimension");

  const json& fj = doc.at("flow");
  const std::string variant = fj.at("variant").get<std::string>();
  const double safety = number(fj, "safety_multiplier", 1.0);
  if (variant == "first_order" || variant == "newton" || variant == "consensus") {
    const ProtocolSum g = parse_protocol_sum(fj.at("protocol"));
    const int cn = graph ? graph->size() : n;
    const auto pc = pair_constants(g, cn);
    if (variant == "first_order") {
      s.flow = first_order_flow(s.objective, g);
      if (pc && s.objective.pl_mu && *s.objective.pl_mu > 0.0)
        s.bound = nominal_bound(*s.objective.pl_mu, pc->sigma, pc->rho, pc->p, pc->q);
    } else if (variant == "newton") {
      s.flow = newton_flow(s.objective, g);
      if (pc) s.bound = newton_bound(pc->sigma, pc->rho, pc->p, pc->q);
    } else {
      require(graph.has_value(), ErrorKind::Configuration, "consensus flow needs a consensus problem");
      s.flow = consensus_flow(*graph, g);
      if (pc && graph->connected())
        s.bound = consensus_bound(graph->algebraic_connectivity(), pc->sigma, pc->rho, pc->p, pc->q);
    }
  } else if (variant == "robust") {
    const Protocol g0 = parse_protocol(fj.at("g0"));
    const Protocol gq = parse_protocol(fj.at("gq"));
    const std::optional<DisturbanceModel> d =
        s.disturbance.active() ? std::optional<DisturbanceModel>(s.disturbance) : std::nullopt;
    s.flow = robust_flow(s.objective, g0, gq, d, safety);
    if (s.objective.pl_mu) {
      const ClassConstants c0 = class_constants(g0, n);
      const ClassConstants cq = class_constants(gq, n);
      s.bound = robust_bound(*s.objective.pl_mu, c0.coefficient, cq.coefficient, cq.exponent,
                             s.disturbance.epsilon, s.disturbance.dbar, safety);
    }
  } else if (variant == "projected") {
    const Matrix A = json_matrix(fj.at("A"), base_dir);
    const Matrix P = fj.contains("P") ? json_matrix(fj.at("P"), base_dir) : orthogonal_projector(A);
    const ProtocolSum g = parse_protocol_sum(fj.at("protocol"));
    s.flow = projected_flow(s.objective, A, P, g);
    const auto pc = pair_constants(g, n);
    if (pc && s.objective.pl_mu && *s.objective.pl_mu > 0.0)
      s.bound = projected_bound(*s.objective.pl_mu,
                                linalg::smallest_nonzero_eigenvalue(P.transpose() * P), pc->sigma,
                                pc->rho, pc->p, pc->q);
  } else if (variant == "feasibility") {
    const Matrix A = json_matrix(fj.at("A"), base_dir);
    const Vector b = json_vector(fj.at("b"), base_dir);
    const ProtocolSum g = parse_protocol_sum(fj.at("protocol"));
    s.flow = feasibility_flow(A, b, g);
    const auto pc = pair_constants(g, static_cast<int>(A.rows()));
    if (pc)
      s.bound = feasibility_bound(pc->sigma, pc->rho, pc->p, pc->q,
                                  linalg::smallest_nonzero_eigenvalue(A * A.transpose()));
  } else if (variant == "proximal" || variant == "epgf") {
    require(doc.contains("prox"), ErrorKind::Configuration, "proximal flows need a 'prox' block");
    const ProxFunction h = build_prox(doc.at("prox"), n, base_dir);
    const double lambda = required_number(fj, "lambda");
    if (variant == "proximal") {
      s.flow = proximal_flow(s.objective, h, lambda, number(fj, "kp", 1.0), number(fj, "kq", 1.0),
                             required_number(fj, "p"), required_number(fj, "q"));
    } else {
      s.flow = epgf_flow(s.objective, h, lambda);
    }
  } else {
    fail(ErrorKind::Configuration, "unknown flow variant '" + variant + "'");
  }
  return s;
}

SolveSetup load_solve_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Usage, "cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorKind::Configuration, "malformed config '" + path + "': " + e.what());
  }
  return parse_solve_config(doc, std::filesystem::path(path).parent_path().string().empty()
                                     ? std::string(".")
                                     : std::filesystem::path(path).parent_path().string());
}

}  // namespace fxt
