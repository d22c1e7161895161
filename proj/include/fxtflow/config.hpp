#pragma once

#include "fxtflow/bounds.hpp"
#include "fxtflow/flows.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace fxt {

inline constexpr int kConfigSchemaVersion = 1;

/// {"kind": "componentwise_power", "alpha": 1.5, "scale": 3}. Parameter keys:
/// r (number or "inf"), p, q, alpha, s, scale.
Protocol parse_protocol(const nlohmann::json& j);
/// A single protocol object or an array of them (summed).
ProtocolSum parse_protocol_sum(const nlohmann::json& j);
nlohmann::json protocol_to_json(const Protocol& g);

/// {"kind": "none" | "sinusoid" | "state_scaled", ...}. Sinusoid takes
/// "amplitude" (scalar broadcast to dim, or array) and "frequency";
/// state_scaled takes "epsilon", "dbar" and "direction"
/// (rotating | constant | along_gradient | random).
DisturbanceModel parse_disturbance(const nlohmann::json& j, int dim);

/// Fields override `base`: dt, t_max, settle_tol, chatter_regularization,
/// record_stride, seed, stop_when_settled.
IntegratorConfig parse_integrator(const nlohmann::json& j, IntegratorConfig base = {});

/// Matrix given inline as nested arrays (a flat array is a column) or as a
/// CSV path relative to base_dir.
Matrix json_matrix(const nlohmann::json& j, const std::string& base_dir);
Vector json_vector(const nlohmann::json& j, const std::string& base_dir);

/// Everything `solve` needs, assembled from a config document.
struct SolveSetup {
  Objective objective;
  FlowSpec flow;
  DisturbanceModel disturbance;
  IntegratorConfig integrator;
  Vector x0;
  std::optional<SettlingBound> bound;
};

/// Document layout:
///   schema_version: 1
///   problem:  {type: quadratic (Q, c) | least_squares (A, b) | dispatch (a, b, c)
///              | consensus (edges, nodes), strongly_convex (optional override)}
///   flow:     {variant: first_order | robust | newton | projected | feasibility
///              | proximal | epgf | consensus, protocol, ...variant fields}
///   prox:     {kind: zero | l1 | box | l1_plus_box, gamma, lower, upper}
///   disturbance, integrator, x0
/// `bound` is filled when the chosen flow has a closed-form settling bound.
SolveSetup parse_solve_config(const nlohmann::json& doc, const std::string& base_dir = ".");
SolveSetup load_solve_config(const std::string& path);

}  // namespace fxt
