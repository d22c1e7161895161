#include "fxtflow/bounds.hpp"
#include "fxtflow/cases.hpp"
#include "fxtflow/config.hpp"
#include "fxtflow/network.hpp"
#include "fxtflow/regret.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fxt;

namespace {

py::dict trajectory_dict(const Trajectory& tr) {
  Matrix states(static_cast<Eigen::Index>(tr.size()), tr.empty() ? 0 : tr.states.front().size());
  for (std::size_t k = 0; k < tr.size(); ++k) states.row(static_cast<Eigen::Index>(k)) = tr.states[k].transpose();
  py::dict d;
  d["times"] = tr.times;
  d["states"] = states;
  d["costs"] = tr.costs;
  d["grad_norms"] = tr.grad_norms;
  d["settling_time"] = tr.settling_time;
  return d;
}

Trajectory trajectory_from(const py::dict& d) {
  Trajectory tr;
  tr.times = d["times"].cast<std::vector<double>>();
  tr.costs = d["costs"].cast<std::vector<double>>();
  tr.grad_norms = d["grad_norms"].cast<std::vector<double>>();
  const Matrix states = d["states"].cast<Matrix>();
  for (Eigen::Index k = 0; k < states.rows(); ++k) tr.states.push_back(states.row(k).transpose());
  if (d.contains("settling_time") && !d["settling_time"].is_none())
    tr.settling_time = d["settling_time"].cast<double>();
  tr.validate();
  return tr;
}

}  // namespace

PYBIND11_MODULE(_fxtflow, m) {
  m.doc() = "fixed-time gradient flows";
  m.attr("__version__") = "0.1.0";
  py::register_exception<Error>(m, "FxtError", PyExc_ValueError);

  py::class_<Objective>(m, "Objective")
      .def(py::init([](int dim, ScalarFn f, VectorFn grad,
                       std::optional<double> f_star, std::optional<double> pl_mu) {
             Objective o;
             o.dim = dim;
             o.f = std::move(f);
             o.grad = std::move(grad);
             o.f_star = f_star;
             o.pl_mu = pl_mu;
             o.validate();
             return o;
           }),
           py::arg("dim"), py::arg("f"), py::arg("grad"), py::arg("f_star") = py::none(),
           py::arg("pl_mu") = py::none())
      .def_readonly("dim", &Objective::dim)
      .def_readwrite("f_star", &Objective::f_star)
      .def_readwrite("pl_mu", &Objective::pl_mu)
      .def_readwrite("grad_lipschitz", &Objective::grad_lipschitz)
      .def("f", [](const Objective& o, const Vector& x) { return o.f(x); })
      .def("grad", [](const Objective& o, const Vector& x) { return o.grad(x); });

  m.def("quadratic_objective", &quadratic_objective, py::arg("Q"), py::arg("c"));
  m.def("least_squares_objective", &least_squares_objective, py::arg("A"), py::arg("b"));
  m.def("random_quadratic", &random_quadratic, py::arg("n"), py::arg("mu"), py::arg("L"), py::arg("seed"));
  m.def("pl_residual", &pl_residual, py::arg("obj"), py::arg("x"));

  py::class_<Protocol>(m, "Protocol")
      .def_static("norm_subgradient", &Protocol::norm_subgradient, py::arg("r"), py::arg("scale") = 1.0)
      .def_static("rescaled", &Protocol::rescaled, py::arg("p"), py::arg("r") = 2.0, py::arg("scale") = 1.0)
      .def_static("power", &Protocol::power, py::arg("q"), py::arg("r") = 2.0, py::arg("scale") = 1.0)
      .def_static("componentwise_power", &Protocol::componentwise_power, py::arg("alpha"),
                  py::arg("scale") = 1.0)
      .def_static("signum", &Protocol::signum, py::arg("scale") = 1.0)
      .def_static("exponential_l2", &Protocol::exponential_l2, py::arg("scale") = 1.0)
      .def_static("exponential_l1", &Protocol::exponential_l1, py::arg("scale") = 1.0)
      .def_static("identity", &Protocol::identity, py::arg("scale") = 1.0)
      .def("eval", &Protocol::eval, py::arg("y"), py::arg("regularization") = 0.0)
      .def("is_componentwise", &Protocol::is_componentwise)
      .def("is_span_preserving", &Protocol::is_span_preserving)
      .def("__add__", [](const Protocol& a, const Protocol& b) { return a + b; })
      .def("__repr__", &Protocol::describe);

  py::class_<ProtocolSum>(m, "ProtocolSum")
      .def(py::init<std::vector<Protocol>>(), py::arg("terms"))
      .def(py::init<Protocol>(), py::arg("term"))
      .def("eval", &ProtocolSum::eval, py::arg("y"), py::arg("regularization") = 0.0)
      .def("__add__", [](const ProtocolSum& a, const Protocol& b) { return a + b; })
      .def("__repr__", &ProtocolSum::describe);
  py::implicitly_convertible<Protocol, ProtocolSum>();

  m.def("class_constants", [](const Protocol& g, int n) {
    const ClassConstants c = class_constants(g, n);
    const char* status = c.status == ClassConstants::Status::Tabulated    ? "tabulated"
                         : c.status == ClassConstants::Status::GlobalBound ? "global_bound"
                                                                          : "untabulated";
    return py::make_tuple(status, c.exponent, c.coefficient);
  }, py::arg("g"), py::arg("n"));
  m.def("verify_class_membership", [](const Protocol& g, double p, double sigma, int n,
                                      std::size_t samples, std::uint64_t seed) {
    const MembershipReport r = verify_class_membership(g, p, sigma, n, samples, seed);
    return py::make_tuple(r.passed, r.worst_margin);
  }, py::arg("g"), py::arg("p"), py::arg("sigma"), py::arg("n"), py::arg("samples") = 10000,
        py::arg("seed") = 0);

  py::class_<Graph>(m, "Graph")
      .def_static("circle", &Graph::circle, py::arg("nodes"), py::arg("weight") = 1.0)
      .def_static("complete", &Graph::complete, py::arg("nodes"), py::arg("weight") = 1.0)
      .def_static("path", &Graph::path, py::arg("nodes"), py::arg("weight") = 1.0)
      .def_property_readonly("laplacian", &Graph::laplacian)
      .def("algebraic_connectivity", &Graph::algebraic_connectivity);

  py::class_<DisturbanceModel>(m, "Disturbance")
      .def_static("none", &DisturbanceModel::none)
      .def_static("sinusoid", &DisturbanceModel::sinusoid, py::arg("amplitude"), py::arg("frequency") = 1.0)
      .def_static("state_scaled", [](double eps, double dbar) {
        return DisturbanceModel::state_scaled_plus_bounded(eps, dbar);
      }, py::arg("epsilon"), py::arg("dbar"));

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("t_max", &IntegratorConfig::t_max)
      .def_readwrite("settle_tol", &IntegratorConfig::settle_tol)
      .def_readwrite("chatter_regularization", &IntegratorConfig::chatter_regularization)
      .def_readwrite("record_stride", &IntegratorConfig::record_stride)
      .def_readwrite("seed", &IntegratorConfig::seed)
      .def_readwrite("stop_when_settled", &IntegratorConfig::stop_when_settled);

  py::class_<FlowSpec>(m, "Flow")
      .def_readonly("description", &FlowSpec::description)
      .def("__call__", [](const FlowSpec& f, const Vector& x, double t, double reg) { return f(x, t, reg); },
           py::arg("x"), py::arg("t") = 0.0, py::arg("regularization") = 0.0);

  m.def("first_order_flow", &first_order_flow, py::arg("obj"), py::arg("g"));
  m.def("robust_flow", &robust_flow, py::arg("obj"), py::arg("g0"), py::arg("gq"),
        py::arg("disturbance") = std::optional<DisturbanceModel>(), py::arg("safety_multiplier") = 1.0);
  m.def("newton_flow", &newton_flow, py::arg("obj"), py::arg("g"));
  m.def("projected_flow", &projected_flow, py::arg("obj"), py::arg("A"), py::arg("P"), py::arg("g"));
  m.def("feasibility_flow", &feasibility_flow, py::arg("A"), py::arg("b"), py::arg("g_hat"));
  m.def("orthogonal_projector", &orthogonal_projector, py::arg("A"));
  m.def("consensus_flow", &consensus_flow, py::arg("graph"), py::arg("g"));
  m.def("consensus_objective", &consensus_objective, py::arg("graph"));

  m.def("integrate", [](const FlowSpec& flow, const Vector& x0, const Objective& obj,
                        const DisturbanceModel& dist, const IntegratorConfig& cfg) {
    return trajectory_dict(integrate(flow.rhs, x0, obj, dist, cfg));
  }, py::arg("flow"), py::arg("x0"), py::arg("obj"), py::arg("disturbance") = DisturbanceModel::none(),
        py::arg("config") = IntegratorConfig{});

  py::class_<SettlingBound>(m, "SettlingBound")
      .def_readonly("value", &SettlingBound::value)
      .def_readonly("source", &SettlingBound::source)
      .def_readonly("parameters", &SettlingBound::parameters);
  m.def("nominal_bound", &nominal_bound, py::arg("mu"), py::arg("sigma"), py::arg("rho"), py::arg("p"), py::arg("q"));
  m.def("robust_bound", &robust_bound, py::arg("mu"), py::arg("sigma"), py::arg("rho"), py::arg("q"),
        py::arg("epsilon"), py::arg("dbar"), py::arg("safety_multiplier") = 1.0);
  m.def("newton_bound", &newton_bound, py::arg("sigma"), py::arg("rho"), py::arg("p"), py::arg("q"));
  m.def("finite_time_bound", &finite_time_bound, py::arg("mu"), py::arg("sigma"), py::arg("p"), py::arg("v0"));
  m.def("projected_bound", &projected_bound, py::arg("mu"), py::arg("lambda2_ptp"), py::arg("sigma"),
        py::arg("rho"), py::arg("p"), py::arg("q"));
  m.def("feasibility_bound", &feasibility_bound, py::arg("sigma"), py::arg("rho"), py::arg("p"), py::arg("q"),
        py::arg("lambda2_aat"));
  m.def("consensus_bound", &consensus_bound, py::arg("lambda2"), py::arg("sigma"), py::arg("rho"),
        py::arg("p"), py::arg("q"));

  m.def("regret_bound", [](const std::string& kind, double v0, double mu, double p, double q) {
    RegretProtocol k;
    if (kind == "g1") k = RegretProtocol::G1;
    else if (kind == "gp") k = RegretProtocol::Gp;
    else if (kind == "gpq") k = RegretProtocol::Gpq;
    else if (kind == "ge") k = RegretProtocol::Ge;
    else fail(ErrorKind::Usage, "unknown regret kind '" + kind + "'");
    return regret_bound(k, v0, mu, p, q).value;
  }, py::arg("kind"), py::arg("v0"), py::arg("mu"), py::arg("p") = 0.5, py::arg("q") = 2.0);
  m.def("measure_regret", [](const py::dict& traj, double f_star) {
    return measure_regret(trajectory_from(traj), f_star);
  }, py::arg("trajectory"), py::arg("f_star"));

  py::class_<ProxFunction>(m, "ProxFunction")
      .def_static("zero", &ProxFunction::zero)
      .def_static("l1", &ProxFunction::l1, py::arg("gamma"))
      .def_static("box", py::overload_cast<int, double, double>(&ProxFunction::box), py::arg("n"),
                  py::arg("lower"), py::arg("upper"))
      .def_static("l1_plus_box", &ProxFunction::l1_plus_box, py::arg("gamma"), py::arg("lower"), py::arg("upper"))
      .def("value", &ProxFunction::value, py::arg("x"));
  m.def("prox", &prox, py::arg("h"), py::arg("lam"), py::arg("x"));
  m.def("fb_envelope", &fb_envelope, py::arg("f"), py::arg("h"), py::arg("lam"), py::arg("x"));
  m.def("fb_envelope_gradient", &fb_envelope_gradient, py::arg("f"), py::arg("h"), py::arg("lam"), py::arg("x"));
  m.def("proximal_flow", &proximal_flow, py::arg("f"), py::arg("h"), py::arg("lam"), py::arg("kp"),
        py::arg("kq"), py::arg("p"), py::arg("q"));
  m.def("epgf_flow", &epgf_flow, py::arg("f"), py::arg("h"), py::arg("lam"));

  m.def("dispatch_kkt", [](const Vector& a, const Vector& b, double demand) {
    const DispatchSolution s = dispatch_kkt(a, b, demand);
    return py::make_tuple(s.x, s.lambda);
  }, py::arg("a"), py::arg("b"), py::arg("demand"));

  m.def("run_case", [](int id, std::uint64_t seed, std::optional<double> dt, std::optional<double> t_max) {
    Summary summary;
    {
      py::gil_scoped_release release;
      CaseInstance inst = build_case(id, seed);
      apply_overrides(inst, {dt, t_max, std::nullopt});
      summary = case_summary(inst, run_case(inst));
    }
    py::dict out;
    for (const auto& [k, v] : summary) out[py::str(k)] = v;
    return out;
  }, py::arg("case_id"), py::arg("seed"), py::arg("dt") = py::none(), py::arg("t_max") = py::none());

  m.def("solve_config", [](const std::string& json_text, const std::string& base_dir) {
    const SolveSetup s = parse_solve_config(nlohmann::json::parse(json_text), base_dir);
    py::dict out = trajectory_dict(integrate(s.flow.rhs, s.x0, s.objective, s.disturbance, s.integrator));
    out["bound"] = s.bound ? py::cast(s.bound->value) : py::none();
    out["flow"] = s.flow.description;
    return out;
  }, py::arg("config_json"), py::arg("base_dir") = ".");
}
