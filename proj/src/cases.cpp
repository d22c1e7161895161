#include "fxtflow/cases.hpp"

#include "fxtflow/regret.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>

namespace fxt {
namespace {

std::string fmt(double v) { return format_double(v); }

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

RunRecord run_one(const MethodSpec& m, int index) {
  RunRecord rec;
  rec.method = m.name;
  rec.run = index;
  const Vector& x0 = m.initial_states.at(static_cast<std::size_t>(index));
  IntegratorConfig cfg = m.integrator;
  cfg.seed = m.integrator.seed + static_cast<std::uint64_t>(index);
  rec.trajectory = integrate(m.flow.rhs, x0, m.objective, m.disturbance, cfg, m.settle_metric);
  const Trajectory& tr = rec.trajectory;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    rec.errors.push_back(m.error_metric ? m.error_metric(tr.states[k], tr.times[k]) : tr.grad_norms[k]);
    rec.settle.push_back(m.settle_metric ? m.settle_metric(tr.states[k], tr.times[k]) : tr.grad_norms[k]);
  }
  rec.settling = settled_after(tr.times, rec.settle, cfg.settle_tol);
  rec.trajectory.settling_time = rec.settling;
  if (m.objective.f_star) rec.regret = measure_regret(rec.trajectory, *m.objective.f_star);
  return rec;
}

CaseCheck check(std::string name, bool passed, std::string detail) {
  return CaseCheck{std::move(name), passed, std::move(detail)};
}

std::vector<CaseCheck> checks_case1(const CaseInstance& inst, const CaseResult& r) {
  std::vector<CaseCheck> out;
  const double limit = inst.method("g_0_2").bound->value * 1.05;
  bool ok = true;
  std::ostringstream d;
  d << "limit=" << fmt(limit);
  for (const RunRecord* run : r.runs_of("g_0_2")) {
    ok = ok && run->settling && *run->settling <= limit;
    d << " run" << run->run << "=" << fmt_opt(run->settling);
  }
  out.push_back(check("robust_settles_within_bound", ok, d.str()));

  ok = true;
  std::ostringstream d2;
  for (const RunRecord* run : r.runs_of("g_0.5_2")) {
    const double lo = run->error_range(2.0, 5.0).first;
    ok = ok && lo > 1e-2;
    d2 << " run" << run->run << "_min=" << fmt(lo);
  }
  out.push_back(check("vanishing_only_stays_above_1e-2", ok, d2.str()));
  return out;
}

std::vector<CaseCheck> checks_case2(const CaseInstance& inst, const CaseResult& r) {
  std::vector<CaseCheck> out;
  const auto fxt = r.runs_of("fxtpgf");
  const auto ep = r.runs_of("epgf");
  bool settle_ok = true, value_ok = true, gap_ok = true;
  std::ostringstream ds, dv, dg;
  for (std::size_t i = 0; i < fxt.size(); ++i) {
    settle_ok = settle_ok && fxt[i]->settling && *fxt[i]->settling < 2.0;
    ds << " run" << i << "=" << fmt_opt(fxt[i]->settling);
    const double final_gap = fxt[i]->errors.back();
    value_ok = value_ok && std::abs(final_gap) <= 1e-3;
    dv << " run" << i << "_F=" << fmt(final_gap + *inst.reference_value);
    const double e_fxt = fxt[i]->error_at(2.0);
    const double e_ep = ep.at(i)->error_at(2.0);
    gap_ok = gap_ok && e_ep >= 10.0 * std::max(e_fxt, 1e-4);
    dg << " run" << i << "_fxt=" << fmt(e_fxt) << "_epgf=" << fmt(e_ep);
  }
  out.push_back(check("fxtpgf_gap_below_1e-4_before_2s", settle_ok, ds.str()));
  out.push_back(check("envelope_value_matches_reference", value_ok, dv.str()));
  out.push_back(check("epgf_gap_10x_larger_at_2s", gap_ok, dg.str()));
  return out;
}

std::vector<CaseCheck> checks_case3(const CaseInstance&, const CaseResult& r) {
  std::vector<CaseCheck> out;
  for (const char* name : {"distributed_g_d", "centralized_g_c1", "centralized_g_c2"}) {
    bool ok = true;
    std::ostringstream d;
    for (const RunRecord* run : r.runs_of(name)) {
      ok = ok && run->settling.has_value();
      d << " run" << run->run << "=" << fmt_opt(run->settling) << "_final=" << fmt(run->errors.back());
    }
    out.push_back(check(std::string(name) + "_settles", ok, d.str()));
  }
  bool ok = true;
  std::ostringstream d;
  for (const RunRecord* run : r.runs_of("epa")) {
    const double med = tail_median(*run, 2.0 * M_PI);
    ok = ok && med > 1e-2;
    d << " run" << run->run << "_tail_median=" << fmt(med);
  }
  out.push_back(check("epa_plateaus_above_1e-2", ok, d.str()));
  return out;
}

std::vector<CaseCheck> checks_case4(const CaseInstance& inst, const CaseResult& r) {
  std::vector<CaseCheck> out;
  Vector published(4);
  published << 42.87, 52.56, 8.71, 125.86;
  const double kkt_diff = (*inst.reference_solution - published).cwiseAbs().maxCoeff();
  out.push_back(check("kkt_matches_published_optimum", kkt_diff <= 5e-3, "max_abs_diff=" + fmt(kkt_diff)));

  const RunRecord* l1 = r.runs_of("fxt_L1").at(0);
  const RunRecord* l2 = r.runs_of("fxt_L2").at(0);
  const bool reach = l1->settling && l2->settling && l1->errors.back() <= 1e-2 && l2->errors.back() <= 1e-2;
  out.push_back(check("fxt_flows_reach_1e-2", reach,
                      "L1=" + fmt_opt(l1->settling) + " L2=" + fmt_opt(l2->settling)));
  out.push_back(check("L2_settles_before_L1", reach && *l2->settling < *l1->settling,
                      "L1=" + fmt_opt(l1->settling) + " L2=" + fmt_opt(l2->settling)));

  const RunRecord* lap = r.runs_of("laplacian_gradient_L2").at(0);
  const double half = 0.5 * lap->trajectory.final_time();
  std::vector<double> t, y;
  for (std::size_t k = 0; k < lap->trajectory.size() && lap->trajectory.times[k] <= half; ++k) {
    t.push_back(lap->trajectory.times[k]);
    y.push_back(std::log10(std::max(lap->errors[k], 1e-300)));
  }
  const auto [slope, r2] = linear_fit(t, y);
  out.push_back(check("laplacian_log_error_linear", slope < 0.0 && r2 >= 0.95,
                      "slope=" + fmt(slope) + " r2=" + fmt(r2)));
  const double window = std::max(l1->settling.value_or(0.0), l2->settling.value_or(0.0));
  const double lap_err = lap->error_at(window);
  out.push_back(check("laplacian_unsettled_in_fxt_window", reach && lap_err > 1e-2,
                      "t=" + fmt(window) + " error=" + fmt(lap_err)));
  return out;
}

}  // namespace

void apply_overrides(CaseInstance& inst, const CaseOverrides& o) {
  for (auto& m : inst.methods) {
    if (o.dt) m.integrator.dt = *o.dt;
    if (o.t_max) m.integrator.t_max = *o.t_max;
    if (o.settle_tol) m.integrator.settle_tol = *o.settle_tol;
    m.integrator.validate();
  }
}

double RunRecord::error_at(double t) const {
  const auto& ts = trajectory.times;
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  if (it == ts.end()) return errors.back();
  std::size_t k = static_cast<std::size_t>(it - ts.begin());
  if (k > 0 && t - ts[k - 1] < ts[k] - t) --k;
  return errors[k];
}

std::pair<double, double> RunRecord::error_range(double a, double b) const {
  double lo = kInfinity, hi = -kInfinity;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double t = trajectory.times[k];
    if (t < a || t > b) continue;
    lo = std::min(lo, errors[k]);
    hi = std::max(hi, errors[k]);
  }
  return {lo, hi};
}

bool CaseResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CaseCheck& c) { return c.passed; });
}

std::vector<const RunRecord*> CaseResult::runs_of(const std::string& method) const {
  std::vector<const RunRecord*> out;
  for (const auto& r : runs)
    if (r.method == method) out.push_back(&r);
  require(!out.empty(), ErrorKind::Usage, "no runs recorded for method '" + method + "'");
  return out;
}

CaseResult run_case(const CaseInstance& inst) {
  std::vector<std::future<RunRecord>> jobs;
  for (const auto& m : inst.methods)
    for (int k = 0; k < static_cast<int>(m.initial_states.size()); ++k)
      jobs.push_back(std::async(std::launch::async, [&m, k] { return run_one(m, k); }));
  CaseResult result;
  result.id = inst.id;
  for (auto& j : jobs) result.runs.push_back(j.get());
  result.checks = evaluate_case(inst, result);
  return result;
}

std::vector<CaseCheck> evaluate_case(const CaseInstance& inst, const CaseResult& result) {
  switch (inst.id) {
    case 1: return checks_case1(inst, result);
    case 2: return checks_case2(inst, result);
    case 3: return checks_case3(inst, result);
    case 4: return checks_case4(inst, result);
    default: fail(ErrorKind::Usage, "unknown case id " + std::to_string(inst.id));
  }
}

std::pair<double, double> linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  require(t.size() == y.size() && t.size() >= 2, ErrorKind::Validation, "need at least two points");
  const double n = static_cast<double>(t.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(stt > 0.0, ErrorKind::Validation, "degenerate time samples");
  const double slope = sty / stt;
  const double r2 = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  return {slope, r2};
}

double tail_median(const RunRecord& run, double window) {
  const double start = run.trajectory.final_time() - window;
  std::vector<double> v;
  for (std::size_t k = 0; k < run.errors.size(); ++k)
    if (run.trajectory.times[k] >= start) v.push_back(run.errors[k]);
  require(!v.empty(), ErrorKind::Validation, "empty tail window");
  std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

Summary case_summary(const CaseInstance& inst, const CaseResult& result) {
  Summary s;
  s.emplace_back("case", std::to_string(inst.id));
  s.emplace_back("title", inst.title);
  s.emplace_back("seed", std::to_string(inst.seed));
  for (const auto& m : inst.methods) {
    s.emplace_back(m.name + ".flow", m.flow.description);
    s.emplace_back(m.name + ".bound", m.bound ? fmt(m.bound->value) : "none");
    if (m.bound) s.emplace_back(m.name + ".bound_source", m.bound->source);
  }
  for (const auto& r : result.runs) {
    const std::string p = r.method + ".run" + std::to_string(r.run);
    s.emplace_back(p + ".settling", fmt_opt(r.settling));
    s.emplace_back(p + ".final_error", fmt(r.errors.back()));
    s.emplace_back(p + ".final_grad_norm", fmt(r.trajectory.grad_norms.back()));
    s.emplace_back(p + ".regret", fmt_opt(r.regret));
  }
  for (const auto& c : result.checks) {
    s.emplace_back("check." + c.name, c.passed ? "PASS" : "FAIL");
    s.emplace_back("check." + c.name + ".detail", c.detail);
  }
  s.emplace_back("passed", result.passed() ? "true" : "false");
  return s;
}

Summary write_case_outputs(const CaseInstance& inst, const CaseResult& result,
                           const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string prefix = (std::filesystem::path(out_dir) / ("case" + std::to_string(inst.id))).string();
  for (const auto& r : result.runs)
    write_trajectory_csv(prefix + "_" + r.method + "_run" + std::to_string(r.run) + ".csv", r.trajectory);
  Summary s = case_summary(inst, result);
  write_summary(prefix + "_summary.txt", s);
  write_instance_json(prefix + "_instance.json", inst);
  return s;
}

}  // namespace fxt
