#pragma once

// Distributionally robust solvers over the mean-support ambiguity set: the
// dualized adversarial subproblem with McCormick products, the scenario-pool
// master problem, and the column-and-constraint-generation loop, for both the
// worst-case expectation and worst-case CVaR objectives.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orasp/common.hpp"
#include "orasp/instance.hpp"
#include "orasp/milp_adapter.hpp"
#include "orasp/model_core.hpp"
#include "orasp/sp_solver.hpp"

namespace orasp {

struct AmbiguitySet {
  std::vector<double> mean, lo, hi;

  static AmbiguitySet from(const DurationModel& dm) {
    for (std::size_t i = 0; i < dm.size(); ++i)
      if (!(dm.lo[i] <= dm.mean[i] && dm.mean[i] <= dm.hi[i]))
        throw ValidationError("ambiguity set needs lo <= mean <= hi");
    return {dm.mean, dm.lo, dm.hi};
  }
};

struct DroRisk {
  bool cvar = false;
  double gamma = 0.95;
};

struct DroOptions {
  SbcOptions sbc;
  bool idle_vi = true;
  bool tightened_big_m = true;
  SolveParams params;
  DecomposeMode decompose = DecomposeMode::Auto;
  bool init_mean_scenario = true;  // seed the pool with d = mean
  bool mean_value_cut = true;      // constant lower bound from the d = mean model
  bool rho_box = true;             // variable-free bounds on rho
  bool rho_var_bounds = false;     // variable-dependent bounds on rho
  std::optional<double> master_time_limit;  // inexact variant
  int max_iterations = 0;          // 0 = automatic cap
};

struct SubproblemSolution {
  double value = 0.0;        // incumbent objective
  double value_bound = 0.0;  // proven upper bound on the maximum
  std::vector<char> b;          // support-vertex selector per surgery
  std::vector<double> worst_d;  // lo + b * (hi - lo)
  std::map<std::pair<int, int>, double> lambda, mu, theta;
  std::map<std::pair<int, int>, double> zeta_l, zeta_m, zeta_t;
};

struct CcgIteration {
  double lb = 0.0;
  double ub = 0.0;
  std::vector<double> added_scenario;  // empty when nothing was added
};

struct CcgResult {
  std::vector<CcgIteration> iterations;
  SolutionBundle final;
  std::vector<std::vector<double>> scenario_pool;
  bool converged = false;
  double epsilon = 0.0;
  std::vector<CcgResult> parts;  // populated for decomposed runs
};

struct CcgNonConvergence : BackendError {
  explicit CcgNonConvergence(const std::string& msg, CcgResult partial_result)
      : BackendError(msg), partial(std::move(partial_result)) {}
  CcgResult partial;
};

// ---------------------------------------------------------------------------
// Adversarial subproblem: max over support vertices of the dualized recourse
// minus the pricing term.
// ---------------------------------------------------------------------------

inline SubproblemSolution solve_subproblem(
    const Instance& inst, const FeasibilityIndex& fx,
    const SharingComponents& sc, const FirstStageSolution& sol,
    const std::vector<double>& rho, const DualBounds& bounds, const BigM& mm,
    const AmbiguitySet& amb, const SolveParams& params) {
  const int n = static_cast<int>(inst.num_surgeries());
  ModelFragment f;
  std::map<std::pair<int, int>, int> lam, mu, th, zl, zm, zt;
  std::vector<int> b(n);

  for (int i = 0; i < n; ++i)
    b[i] = f.add_binary("b_" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && sc.surgery_comp[i] == sc.surgery_comp[j]) {
        lam[{i, j}] = f.add_var("l_" + std::to_string(i) + "_" + std::to_string(j),
                                0.0, bounds.lambda_bar, false);
        zl[{i, j}] = f.add_var("zl_" + std::to_string(i) + "_" + std::to_string(j),
                               0.0, bounds.lambda_bar, false);
      }
  for (const auto& [i, a] : fx.F_A) {
    mu[{i, a}] = f.add_var("m_" + std::to_string(i) + "_" + std::to_string(a),
                           0.0, bounds.mu_bar[a], false);
    zm[{i, a}] = f.add_var("zm_" + std::to_string(i) + "_" + std::to_string(a),
                           0.0, bounds.mu_bar[a], false);
  }
  for (const auto& [i, r] : fx.F_R) {
    th[{i, r}] = f.add_var("t_" + std::to_string(i) + "_" + std::to_string(r),
                           0.0, bounds.theta_bar[r], false);
    zt[{i, r}] = f.add_var("zt_" + std::to_string(i) + "_" + std::to_string(r),
                           0.0, bounds.theta_bar[r], false);
  }

  // Dual feasibility rows (shared with the recourse dual).
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    MilpRow row{{}, RowSense::Le,
                inst.anesthesiologists[a].idle_cost +
                    inst.anesthesiologists[a].overtime_cost,
                ""};
    for (int i : fx.I_a[a]) row.terms.emplace_back(mu[{i, static_cast<int>(a)}], 1.0);
    f.add_row(std::move(row));
  }
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    MilpRow row{{}, RowSense::Le,
                inst.rooms[r].idle_cost + inst.rooms[r].overtime_cost, ""};
    for (int i : fx.I_r[r]) row.terms.emplace_back(th[{i, static_cast<int>(r)}], 1.0);
    f.add_row(std::move(row));
  }
  for (int i = 0; i < n; ++i) {
    MilpRow row{{}, RowSense::Ge, -inst.surgeries[i].waiting_cost, ""};
    for (const auto& [key, var] : lam) {
      if (key.first == i) row.terms.emplace_back(var, 1.0);
      if (key.second == i) row.terms.emplace_back(var, -1.0);
    }
    for (int a : fx.A_i[i]) row.terms.emplace_back(mu[{i, a}], 1.0);
    for (int r : fx.R_i[i]) row.terms.emplace_back(th[{i, r}], 1.0);
    f.add_row(std::move(row));
  }
  // McCormick envelopes for zeta = dual * b; exact because b is binary and
  // the duals carry finite bounds.
  auto mccormick = [&f](int zeta, int dual, int bb, double bound) {
    f.add_row({{{zeta, 1.0}, {dual, -1.0}}, RowSense::Le, 0.0, ""});
    f.add_row({{{zeta, 1.0}, {bb, -bound}}, RowSense::Le, 0.0, ""});
    f.add_row({{{zeta, 1.0}, {dual, -1.0}, {bb, -bound}}, RowSense::Ge, -bound, ""});
  };
  for (const auto& [key, var] : lam)
    mccormick(zl[key], var, b[key.first], bounds.lambda_bar);
  for (const auto& [key, var] : mu)
    mccormick(zm[key], var, b[key.first], bounds.mu_bar[key.second]);
  for (const auto& [key, var] : th)
    mccormick(zt[key], var, b[key.first], bounds.theta_bar[key.second]);

  // Maximized objective, passed to the adapter negated.
  double constant = 0.0;
  for (const auto& a : inst.anesthesiologists)
    if (a.is_regular) constant += a.idle_cost * (a.shift_end - a.shift_start);
  for (std::size_t r = 0; r < inst.num_rooms(); ++r)
    if (sol.open[r]) constant += inst.rooms[r].idle_cost * inst.rooms[r].horizon_end;

  std::vector<double> obj(f.vars.size(), 0.0);
  std::vector<double> assigned_idle(n, 0.0);  // c_g coefficients tied to i
  for (int i = 0; i < n; ++i) {
    const auto& an = inst.anesthesiologists[sol.anes_of[i]];
    if (an.is_regular) assigned_idle[i] += an.idle_cost;
    assigned_idle[i] += inst.rooms[sol.room_of[i]].idle_cost;
    constant += amb.lo[i] * (-rho[i] - assigned_idle[i]);
    obj[b[i]] += (amb.hi[i] - amb.lo[i]) * (-rho[i] - assigned_idle[i]);
  }
  for (const auto& [key, var] : lam) {
    const auto [i, j] = key;
    const double u = sol.precedes[i][j] ? 1.0 : 0.0;
    obj[var] += sol.start[i] - sol.start[j] - mm.m_seq * (1.0 - u) + amb.lo[i];
    obj[zl[key]] += amb.hi[i] - amb.lo[i];
  }
  for (const auto& [key, var] : mu) {
    const auto [i, a] = key;
    const double slack = 1.0 - (sol.x(i, a) ? 1.0 : 0.0) + (sol.called[a] ? 1.0 : 0.0);
    obj[var] += sol.start[i] -
                (inst.anesthesiologists[a].shift_end + mm.m_anes * slack) +
                amb.lo[i];
    obj[zm[key]] += amb.hi[i] - amb.lo[i];
  }
  for (const auto& [key, var] : th) {
    const auto [i, r] = key;
    const double slack = sol.z(i, r) ? 0.0 : 1.0;
    obj[var] += sol.start[i] -
                (inst.rooms[r].horizon_end + mm.m_room * slack) + amb.lo[i];
    obj[zt[key]] += amb.hi[i] - amb.lo[i];
  }
  for (std::size_t j = 0; j < obj.size(); ++j)
    f.add_objective(static_cast<int>(j), -obj[j]);
  f.objective_offset = -constant;

  HighsAdapter adapter;
  const auto res = adapter.solve(f, params);
  if (!res.has_solution())
    throw BackendError("adversarial subproblem failed: " + res.message);

  SubproblemSolution sub;
  sub.value = -res.objective;
  sub.value_bound = std::max(sub.value, -res.best_bound);
  sub.b.resize(n);
  sub.worst_d.resize(n);
  for (int i = 0; i < n; ++i) {
    sub.b[i] = res.values[b[i]] > 0.5 ? 1 : 0;
    sub.worst_d[i] = amb.lo[i] + (sub.b[i] ? amb.hi[i] - amb.lo[i] : 0.0);
  }
  for (const auto& [key, var] : lam) sub.lambda[key] = res.values[var];
  for (const auto& [key, var] : mu) sub.mu[key] = res.values[var];
  for (const auto& [key, var] : th) sub.theta[key] = res.values[var];
  for (const auto& [key, var] : zl) sub.zeta_l[key] = res.values[var];
  for (const auto& [key, var] : zm) sub.zeta_m[key] = res.values[var];
  for (const auto& [key, var] : zt) sub.zeta_t[key] = res.values[var];
  return sub;
}

// ---------------------------------------------------------------------------
// Master problem.
// ---------------------------------------------------------------------------

struct MasterModel {
  ModelFragment frag;
  FirstStageVars fs;
  FeasibilityIndex fx;
  SharingComponents sc;
  std::vector<int> rho;
  int delta = -1;
  int rho0 = -1;
  std::vector<int> psi_lo, psi_hi;
  bool fixed_first_stage = false;
};

// Builds the scenario-pool master.  With `fixed` set, the first stage is a
// constant and the master reduces to the pricing LP used for evaluating the
// worst-case risk of a given schedule.
inline MasterModel build_master(const Instance& inst,
                                const std::vector<std::vector<double>>& pool,
                                const DroRisk& risk, const DroOptions& opts,
                                const DualBounds& bounds, const BigM& mm,
                                std::optional<double> mean_cut_value = std::nullopt,
                                const FirstStageSolution* fixed = nullptr) {
  if (risk.cvar && !(risk.gamma >= 0.0 && risk.gamma < 1.0))
    throw UsageError("confidence level must lie in [0, 1)");
  const auto amb = AmbiguitySet::from(inst.durations);
  const int n = static_cast<int>(inst.num_surgeries());

  MasterModel m;
  m.fixed_first_stage = fixed != nullptr;
  if (!fixed) {
    FirstStageModel fsm = build_first_stage(inst);
    add_symmetry_breaking(fsm.frag, fsm.vars, inst, opts.sbc);
    m.frag = std::move(fsm.frag);
    m.fs = std::move(fsm.vars);
    m.fx = std::move(fsm.fx);
    m.sc = std::move(fsm.sc);
  } else {
    m.fx = derive_feasibility(inst);
    m.sc = sharing_components(inst, m.fx);
  }
  ModelFragment& f = m.frag;

  double max_idle_a = 0.0, max_ot_a = 0.0;
  for (const auto& a : inst.anesthesiologists) {
    max_idle_a = std::max(max_idle_a, a.idle_cost);
    max_ot_a = std::max(max_ot_a, a.overtime_cost);
  }
  double max_idle_r = 0.0, max_ot_r = 0.0;
  for (const auto& r : inst.rooms) {
    max_idle_r = std::max(max_idle_r, r.idle_cost);
    max_ot_r = std::max(max_ot_r, r.overtime_cost);
  }
  const double rho_lo = -max_idle_a - max_idle_r;
  const double rho_hi = 2.0 * bounds.lambda_bar + max_ot_a + max_ot_r;

  m.rho.resize(n);
  for (int i = 0; i < n; ++i)
    m.rho[i] = f.add_var("rho_" + std::to_string(i),
                         opts.rho_box ? rho_lo : -kInf,
                         opts.rho_box ? rho_hi : kInf, false);
  m.delta = f.add_var("delta", -kInf, kInf, false);

  const double inv = risk.cvar ? 1.0 / (1.0 - risk.gamma) : 1.0;
  if (risk.cvar) {
    m.rho0 = f.add_var("rho0", -kInf, kInf, false);
    m.psi_lo.resize(n);
    m.psi_hi.resize(n);
    MilpRow feas{{{m.rho0, 1.0}}, RowSense::Ge, 0.0, ""};
    for (int i = 0; i < n; ++i) {
      m.psi_lo[i] = f.add_var("psl_" + std::to_string(i), 0.0, kInf, false);
      m.psi_hi[i] = f.add_var("psh_" + std::to_string(i), 0.0, kInf, false);
      // psi_lo - psi_hi = rho
      f.add_row({{{m.psi_lo[i], 1.0}, {m.psi_hi[i], -1.0}, {m.rho[i], -1.0}},
                 RowSense::Eq,
                 0.0,
                 ""});
      feas.terms.emplace_back(m.psi_lo[i], amb.lo[i]);
      feas.terms.emplace_back(m.psi_hi[i], -amb.hi[i]);
    }
    f.add_row(std::move(feas));
    f.add_objective(m.rho0, inv - 1.0);
  }
  for (int i = 0; i < n; ++i) f.add_objective(m.rho[i], inv * amb.mean[i]);
  f.add_objective(m.delta, 1.0);

  if (opts.rho_var_bounds && !fixed) {
    // Assignment-dependent bounds on rho; the two upper rows linearize the
    // min of the precedence-count bound and the constant 2.
    for (int i = 0; i < n; ++i) {
      MilpRow lo_row{{{m.rho[i], 1.0}}, RowSense::Ge, 0.0, ""};
      MilpRow up_const{{{m.rho[i], 1.0}}, RowSense::Le, 2.0 * bounds.lambda_bar, ""};
      MilpRow up_count{{{m.rho[i], 1.0}}, RowSense::Le, 0.0, ""};
      for (int a : m.fx.A_i[i]) {
        const auto& an = inst.anesthesiologists[a];
        if (an.is_regular)
          lo_row.terms.emplace_back(m.fs.x.at({i, a}), an.idle_cost);
        up_const.terms.emplace_back(m.fs.x.at({i, a}), -an.overtime_cost);
        up_count.terms.emplace_back(m.fs.x.at({i, a}), -an.overtime_cost);
      }
      for (int r : m.fx.R_i[i]) {
        lo_row.terms.emplace_back(m.fs.z.at({i, r}), inst.rooms[r].idle_cost);
        up_const.terms.emplace_back(m.fs.z.at({i, r}), -inst.rooms[r].overtime_cost);
        up_count.terms.emplace_back(m.fs.z.at({i, r}), -inst.rooms[r].overtime_cost);
      }
      for (int j = 0; j < n; ++j)
        if (j != i && m.sc.surgery_comp[i] == m.sc.surgery_comp[j])
          up_count.terms.emplace_back(m.fs.u.at({i, j}), -bounds.lambda_bar);
      f.add_row(std::move(lo_row));
      f.add_row(std::move(up_const));
      f.add_row(std::move(up_count));
    }
  }

  // Scenario blocks and epigraph cuts.
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& d = pool[k];
    SecondStageVars ss = add_recourse_block(
        f, inst, m.fx, m.sc, d, mm, fixed ? nullptr : &m.fs, fixed,
        "_" + std::to_string(k));
    if (opts.idle_vi && !fixed)
      add_idle_nonneg_vi(f, inst, m.fx, m.fs, ss, d);
    MilpRow cut{{{m.delta, 1.0}}, RowSense::Ge, 0.0, ""};
    for (const auto& [var, c] : ss.cost_terms) cut.terms.emplace_back(var, -c);
    for (int i = 0; i < n; ++i) cut.terms.emplace_back(m.rho[i], d[i]);
    f.add_row(std::move(cut));
  }

  if (mean_cut_value && opts.mean_value_cut) {
    MilpRow cut{{{m.delta, 1.0}}, RowSense::Ge, *mean_cut_value, ""};
    for (int i = 0; i < n; ++i) cut.terms.emplace_back(m.rho[i], inv * amb.mean[i]);
    if (risk.cvar) cut.terms.emplace_back(m.rho0, inv - 1.0);
    f.add_row(std::move(cut));
  }
  return m;
}

// Best lower bound on the recourse value at the mean scenario over all
// feasible first stages; the solver's dual bound keeps it safe under a gap.
inline double mean_recourse_lower_bound(const Instance& inst,
                                        const DroOptions& opts,
                                        const BigM& mm) {
  FirstStageModel fsm = build_first_stage(inst);
  add_symmetry_breaking(fsm.frag, fsm.vars, inst, opts.sbc);
  fsm.frag.objective.clear();
  SecondStageVars ss = add_recourse_block(fsm.frag, inst, fsm.fx, fsm.sc,
                                          inst.durations.mean, mm, &fsm.vars,
                                          nullptr, "_m");
  if (opts.idle_vi)
    add_idle_nonneg_vi(fsm.frag, inst, fsm.fx, fsm.vars, ss, inst.durations.mean);
  for (const auto& [var, c] : ss.cost_terms) fsm.frag.add_objective(var, c);

  HighsAdapter adapter;
  SolveParams p = opts.params;
  p.time_limit = 30.0;  // any dual bound is valid
  const auto res = adapter.solve(fsm.frag, p);
  if (res.status == SolveStatus::Infeasible)
    throw ValidationError("first-stage constraints are infeasible");
  if (res.best_bound <= -kInf / 2) return 0.0;
  return std::max(0.0, res.best_bound);
}

// ---------------------------------------------------------------------------
// Column-and-constraint generation.
// ---------------------------------------------------------------------------

namespace dro_detail {

struct LoopOutput {
  CcgResult result;
  std::vector<double> rho;
  double delta = 0.0;
};

inline LoopOutput ccg_loop(const Instance& inst, const DroRisk& risk,
                           double epsilon, const DroOptions& opts,
                           const FirstStageSolution* fixed) {
  solver_detail::Timer timer;
  const auto amb = AmbiguitySet::from(inst.durations);
  const auto bounds = dual_bounds(inst);
  const BigM mm = big_m_parameters(inst, opts.tightened_big_m);
  const int n = static_cast<int>(inst.num_surgeries());

  std::optional<double> mean_cut;
  if (opts.mean_value_cut && !fixed)
    mean_cut = mean_recourse_lower_bound(inst, opts, mm);

  std::vector<std::vector<double>> pool;
  if (opts.init_mean_scenario) pool.push_back(amb.mean);

  SolveParams master_params = opts.params;
  master_params.rel_gap = std::min(opts.params.rel_gap, epsilon);
  if (opts.master_time_limit) master_params.time_limit = opts.master_time_limit;
  SolveParams sub_params = opts.params;
  sub_params.rel_gap = std::min({1e-9, epsilon * 1e-2, opts.params.rel_gap});
  sub_params.time_limit.reset();

  double lb = 0.0, ub = kInf;
  CcgResult out;
  out.epsilon = epsilon;
  HighsAdapter adapter;

  const int cap = opts.max_iterations > 0
                      ? opts.max_iterations
                      : (n < 20 ? (1 << n) : (1 << 20)) + 16;
  for (int iter = 0; iter < cap; ++iter) {
    MasterModel master = build_master(inst, pool, risk, opts, bounds, mm,
                                      mean_cut, fixed);
    const auto res = adapter.solve(master.frag, master_params);
    if (res.status == SolveStatus::Infeasible)
      throw ValidationError("master problem is infeasible");
    if (res.status == SolveStatus::Unbounded)
      throw UsageError("master is unbounded below; it needs a seeded scenario "
                       "pool or the mean-value cut");
    if (!res.has_solution())
      throw BackendError("master solve failed: " + res.message);
    lb = std::max(lb, res.best_bound);

    FirstStageSolution sol =
        fixed ? *fixed : extract_first_stage(inst, master.fs, res.values);
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = res.values[master.rho[i]];
    const double delta_hat = res.values[master.delta];

    const SubproblemSolution sub = solve_subproblem(
        inst, master.fx, master.sc, sol, rho, bounds, mm, amb, sub_params);
    const double y_safe = sub.value_bound;
    ub = std::min(ub, (res.objective - delta_hat) + y_safe);

    const double term_tol = 1e-7 * std::max(1.0, std::fabs(y_safe));
    const double rel_gap = (ub - lb) / std::max(1e-12, std::fabs(ub));
    const bool done = rel_gap < epsilon || delta_hat >= y_safe - term_tol;

    CcgIteration it{lb, ub, {}};
    if (!done) it.added_scenario = sub.worst_d;
    out.iterations.push_back(std::move(it));

    if (done) {
      out.converged = true;
      out.scenario_pool = pool;
      out.final.first_stage = std::move(sol);
      out.final.objective = res.objective;
      // Fixed-first-stage masters price only the risk term; their fixed
      // costs are not part of the objective.
      out.final.fixed_cost =
          fixed ? 0.0 : solver_detail::fixed_cost_of(inst, out.final.first_stage);
      out.final.risk_term = out.final.objective - out.final.fixed_cost;
      out.final.gap = std::max(0.0, rel_gap);
      out.final.wall_time = timer.seconds();
      out.final.model_tag = risk.cvar ? "DRO-CVaR" : "DRO-E";
      LoopOutput lo{std::move(out), std::move(rho), delta_hat};
      return lo;
    }
    pool.push_back(sub.worst_d);
  }
  out.scenario_pool = pool;
  throw CcgNonConvergence(
      "column-and-constraint generation exceeded the iteration cap",
      std::move(out));
}

}  // namespace dro_detail

// Worst-case risk of a fixed schedule over the ambiguity set (expectation or
// CVaR); the master reduces to an LP so this doubles as the evaluation tool
// for robust objectives.
inline double worst_case_risk(const Instance& inst,
                              const FirstStageSolution& sol,
                              const DroRisk& risk, double epsilon = 1e-6,
                              DroOptions opts = {}) {
  opts.decompose = DecomposeMode::Off;
  opts.mean_value_cut = false;
  opts.sbc = SbcOptions::none();
  auto lo = dro_detail::ccg_loop(inst, risk, epsilon, opts, &sol);
  return lo.result.final.objective;
}

inline CcgResult ccg(const Instance& inst, const DroRisk& risk, double epsilon,
                     const DroOptions& opts = {}) {
  if (!(epsilon > 0.0)) throw UsageError("termination tolerance must be > 0");
  const bool decompose = opts.decompose != DecomposeMode::Off;
  const auto dec = decompose ? decompose_by_pool(inst) : PoolDecomposition{};
  if (!decompose || dec.parts.size() <= 1) {
    auto lo = dro_detail::ccg_loop(inst, risk, epsilon, opts, nullptr);
    return std::move(lo.result);
  }

  solver_detail::Timer timer;
  DroOptions part_opts = opts;
  part_opts.decompose = DecomposeMode::Off;
  CcgResult merged;
  merged.epsilon = epsilon;
  merged.converged = true;
  std::vector<FirstStageSolution> part_sols;
  double objective = 0.0, abs_gap = 0.0;
  for (const auto& part : dec.parts) {
    auto lo = dro_detail::ccg_loop(part.instance, risk, epsilon, part_opts, nullptr);
    const CcgResult& pr = lo.result;
    merged.converged = merged.converged && pr.converged;
    objective += pr.final.objective;
    abs_gap += pr.final.gap * std::fabs(pr.final.objective);
    part_sols.push_back(pr.final.first_stage);
    // Embed part-level scenarios at full width, mean elsewhere.
    for (const auto& d : pr.scenario_pool) {
      std::vector<double> full = inst.durations.mean;
      for (std::size_t li = 0; li < part.surgeries.size(); ++li)
        full[part.surgeries[li]] = d[li];
      merged.scenario_pool.push_back(std::move(full));
    }
    for (const auto& it : pr.iterations) {
      CcgIteration g = it;
      if (!it.added_scenario.empty()) {
        std::vector<double> full = inst.durations.mean;
        for (std::size_t li = 0; li < part.surgeries.size(); ++li)
          full[part.surgeries[li]] = it.added_scenario[li];
        g.added_scenario = std::move(full);
      }
      merged.iterations.push_back(std::move(g));
    }
    merged.parts.push_back(lo.result);
  }
  merged.final.first_stage = merge_part_solutions(inst, dec, part_sols);
  merged.final.objective = objective;
  merged.final.fixed_cost =
      solver_detail::fixed_cost_of(inst, merged.final.first_stage);
  merged.final.risk_term = objective - merged.final.fixed_cost;
  merged.final.gap = abs_gap / std::max(1e-9, std::fabs(objective));
  merged.final.wall_time = timer.seconds();
  merged.final.model_tag = risk.cvar ? "DRO-CVaR" : "DRO-E";
  return merged;
}

// Iteration trace in delimited form: iteration, lower bound, upper bound,
// relative gap, index of the added scenario.
inline std::string trace_table(const CcgResult& res) {
  std::ostringstream os;
  os << "iteration,lower_bound,upper_bound,gap,added_scenario\n";
  int added = 0;
  for (std::size_t k = 0; k < res.iterations.size(); ++k) {
    const auto& it = res.iterations[k];
    const double gap =
        (it.ub - it.lb) / std::max(1e-12, std::fabs(it.ub));
    os << (k + 1) << "," << it.lb << "," << it.ub << "," << gap << ",";
    if (!it.added_scenario.empty())
      os << "s" << ++added;
    os << "\n";
  }
  return os.str();
}

}  // namespace orasp
