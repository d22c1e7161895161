// fxtflow command-line harness: case, solve, bounds, regret.
#include "fxtflow/bounds.hpp"
#include "fxtflow/cases.hpp"
#include "fxtflow/config.hpp"
#include "fxtflow/io.hpp"
#include "fxtflow/regret.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

struct Common {
  std::optional<double> dt, tmax, tol;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "fxtflow_out";
  double safety = 1.0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--dt", c.dt, "integrator step (s)")->check(CLI::PositiveNumber);
  app->add_option("--tmax", c.tmax, "horizon (s)")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "settling tolerance")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for data, initializations and random disturbances")
      ->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--out-dir", c.out_dir, "directory for CSV and summary files");
  app->add_option("--safety-multiplier", c.safety, "inflation of the vanishing disturbance term")
      ->check(CLI::PositiveNumber);
}

void print_summary(const fxt::Summary& s) {
  for (const auto& [k, v] : s) std::cout << k << "=" << v << "\n";
}

int cmd_case(int id, const Common& c) {
  if (id < 1 || id > 4) {
    std::cerr << "error: unknown case id " << id << " (expected 1-4)\n";
    return kExitUsage;
  }
  fxt::CaseInstance inst = fxt::build_case(id, c.seed_set ? c.seed : static_cast<std::uint64_t>(id), c.safety);
  fxt::apply_overrides(inst, {c.dt, c.tmax, c.tol});
  const fxt::CaseResult result = fxt::run_case(inst);
  print_summary(fxt::write_case_outputs(inst, result, c.out_dir));
  return result.passed() ? 0 : kExitFailed;
}

int cmd_solve(const std::string& path, const Common& c) {
  if (!std::filesystem::exists(path)) {
    std::cerr << "error: config file '" << path << "' not found\n";
    return kExitUsage;
  }
  fxt::SolveSetup s = fxt::load_solve_config(path);
  if (c.dt) s.integrator.dt = *c.dt;
  if (c.tmax) s.integrator.t_max = *c.tmax;
  if (c.tol) s.integrator.settle_tol = *c.tol;
  if (c.seed_set) s.integrator.seed = c.seed;
  s.integrator.validate();
  fxt::Trajectory traj = fxt::integrate(s.flow.rhs, s.x0, s.objective, s.disturbance, s.integrator);
  std::filesystem::create_directories(c.out_dir);
  const std::string stem = (std::filesystem::path(c.out_dir) / std::filesystem::path(path).stem()).string();
  fxt::write_trajectory_csv(stem + ".csv", traj);
  fxt::Summary sum;
  sum.emplace_back("config", path);
  sum.emplace_back("flow", s.flow.description);
  sum.emplace_back("samples", std::to_string(traj.size()));
  sum.emplace_back("final_time", fxt::format_double(traj.final_time()));
  sum.emplace_back("settling", traj.settling_time ? fxt::format_double(*traj.settling_time) : "none");
  sum.emplace_back("bound", s.bound ? fxt::format_double(s.bound->value) : "none");
  if (s.bound) sum.emplace_back("bound_source", s.bound->source);
  sum.emplace_back("final_grad_norm", fxt::format_double(traj.grad_norms.back()));
  if (s.objective.f_star)
    sum.emplace_back("regret", fxt::format_double(fxt::measure_regret(traj, *s.objective.f_star)));
  fxt::write_summary(stem + "_summary.txt", sum);
  print_summary(sum);
  return 0;
}

struct BoundArgs {
  std::string kind;
  double mu = 1, sigma = 1, rho = 1, p = 0, q = 2, epsilon = 0, dbar = 0, lambda2 = 1, alpha = 1;
  double lambda = 0.1, lipschitz = 1, kp = 1, kq = 1, v0 = 1, r1 = 0.5, k = 1, c1 = 1, c2 = 1, r2 = 2;
  int n = 1;
};

int cmd_bounds(const BoundArgs& a, const Common& c) {
  fxt::SettlingBound b;
  if (a.q <= 1.0 && a.kind != "exponential_l2" && a.kind != "exponential_l1" && a.kind != "finite_time" &&
      a.kind != "lyapunov") {
    std::cerr << "error: q must exceed 1\n";
    return kExitUsage;
  }
  if (a.kind == "nominal") b = fxt::nominal_bound(a.mu, a.sigma, a.rho, a.p, a.q);
  else if (a.kind == "robust") b = fxt::robust_bound(a.mu, a.sigma, a.rho, a.q, a.epsilon, a.dbar, c.safety);
  else if (a.kind == "newton") b = fxt::newton_bound(a.sigma, a.rho, a.p, a.q);
  else if (a.kind == "exponential_l2") b = fxt::exponential_bound(a.alpha, a.mu, fxt::ExponentialVariant::L2, a.n);
  else if (a.kind == "exponential_l1") b = fxt::exponential_bound(a.alpha, a.mu, fxt::ExponentialVariant::L1, a.n);
  else if (a.kind == "finite_time") b = fxt::finite_time_bound(a.mu, a.sigma, a.p, a.v0);
  else if (a.kind == "projected") b = fxt::projected_bound(a.mu, a.lambda2, a.sigma, a.rho, a.p, a.q);
  else if (a.kind == "feasibility") b = fxt::feasibility_bound(a.sigma, a.rho, a.p, a.q, a.lambda2);
  else if (a.kind == "proximal") b = fxt::proximal_bound(a.mu, a.lambda, a.lipschitz, a.kp, a.kq, a.p, a.q);
  else if (a.kind == "consensus") b = fxt::consensus_bound(a.lambda2, a.sigma, a.rho, a.p, a.q);
  else if (a.kind == "lyapunov") b = fxt::fixed_time_lyapunov_bound(a.c1, a.c2, a.r1, a.r2, a.k);
  else {
    std::cerr << "error: unknown bound kind '" << a.kind << "'\n";
    return kExitUsage;
  }
  std::cout << "bound=" << fxt::format_double(b.value) << "\nsource=" << b.source << "\n";
  for (const auto& [k, v] : b.parameters) std::cout << k << "=" << fxt::format_double(v) << "\n";
  return 0;
}

int cmd_regret(const std::string& kind, double v0, double mu, double p, double q) {
  static const std::map<std::string, fxt::RegretProtocol> kinds = {
      {"g1", fxt::RegretProtocol::G1}, {"gp", fxt::RegretProtocol::Gp},
      {"gpq", fxt::RegretProtocol::Gpq}, {"ge", fxt::RegretProtocol::Ge}};
  const auto it = kinds.find(kind);
  if (it == kinds.end()) {
    std::cerr << "error: unknown regret kind '" << kind << "' (g1, gp, gpq, ge)\n";
    return kExitUsage;
  }
  if (it->second == fxt::RegretProtocol::Gpq && !(q > 1.0)) {
    std::cerr << "error: q must exceed 1\n";
    return kExitUsage;
  }
  const fxt::RegretBound b = fxt::regret_bound(it->second, v0, mu, p, q);
  std::cout << "bound=" << fxt::format_double(b.value) << "\nbound_kind=" << fxt::to_string(b.kind) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-time gradient flow toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* case_cmd = app.add_subcommand("case", "run a packaged case study (1-4)");
  int case_id = 0;
  case_cmd->add_option("id", case_id, "case id")->required();
  add_common(case_cmd, common);

  auto* solve_cmd = app.add_subcommand("solve", "run a flow described by a JSON config");
  std::string config;
  solve_cmd->add_option("config", config, "config file")->required();
  add_common(solve_cmd, common);

  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a settling-time bound");
  BoundArgs ba;
  bounds_cmd->add_option("kind", ba.kind,
                         "nominal | robust | newton | exponential_l2 | exponential_l1 | finite_time | "
                         "projected | feasibility | proximal | consensus | lyapunov")
      ->required();
  bounds_cmd->add_option("--mu", ba.mu);
  bounds_cmd->add_option("--sigma", ba.sigma);
  bounds_cmd->add_option("--rho", ba.rho);
  bounds_cmd->add_option("--p", ba.p);
  bounds_cmd->add_option("--q", ba.q);
  bounds_cmd->add_option("--epsilon", ba.epsilon);
  bounds_cmd->add_option("--dbar", ba.dbar);
  bounds_cmd->add_option("--lambda2", ba.lambda2);
  bounds_cmd->add_option("--alpha", ba.alpha);
  bounds_cmd->add_option("--n", ba.n);
  bounds_cmd->add_option("--lambda", ba.lambda);
  bounds_cmd->add_option("--lipschitz", ba.lipschitz);
  bounds_cmd->add_option("--kp", ba.kp);
  bounds_cmd->add_option("--kq", ba.kq);
  bounds_cmd->add_option("--v0", ba.v0);
  bounds_cmd->add_option("--c1", ba.c1);
  bounds_cmd->add_option("--c2", ba.c2);
  bounds_cmd->add_option("--r1", ba.r1);
  bounds_cmd->add_option("--r2", ba.r2);
  bounds_cmd->add_option("--k", ba.k);
  bounds_cmd->add_option("--safety-multiplier", common.safety)->check(CLI::PositiveNumber);

  auto* regret_cmd = app.add_subcommand("regret", "evaluate a regret bound");
  std::string regret_kind;
  double v0 = 1.0, mu = 1.0, p = 0.5, q = 2.0;
  regret_cmd->add_option("kind", regret_kind, "g1 | gp | gpq | ge")->required();
  regret_cmd->add_option("--v0", v0);
  regret_cmd->add_option("--mu", mu);
  regret_cmd->add_option("--p", p);
  regret_cmd->add_option("--q", q);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*case_cmd) return cmd_case(case_id, common);
    if (*solve_cmd) return cmd_solve(config, common);
    if (*bounds_cmd) return cmd_bounds(ba, common);
    if (*regret_cmd) return cmd_regret(regret_kind, v0, mu, p, q);
  } catch (const fxt::Error& e) {
    std::cerr << "error (" << fxt::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == fxt::ErrorKind::Usage || e.kind() == fxt::ErrorKind::Configuration ? kExitUsage
                                                                                          : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
