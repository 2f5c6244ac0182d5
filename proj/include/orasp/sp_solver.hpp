#pragma once

// Sample-average-approximation solvers for the risk-neutral and CVaR models,
// with optional decomposition by anesthesiologist pool.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "orasp/common.hpp"
#include "orasp/instance.hpp"
#include "orasp/milp_adapter.hpp"
#include "orasp/model_core.hpp"
#include "orasp/scenario.hpp"

namespace orasp {

struct SolutionBundle {
  FirstStageSolution first_stage;
  double objective = 0.0;
  double fixed_cost = 0.0;
  double risk_term = 0.0;
  double gap = 0.0;
  double wall_time = 0.0;  // seconds
  std::string model_tag;
};

enum class DecomposeMode { Auto, On, Off };

// Risk measure applied to the second-stage cost: expectation, or CVaR at
// confidence level gamma.
struct RiskSpec {
  bool cvar = false;
  double gamma = 0.0;
};

struct SolverOptions {
  SbcOptions sbc;
  bool idle_vi = true;
  bool tightened_big_m = true;
  SolveParams params;
  DecomposeMode decompose = DecomposeMode::Auto;
};

namespace solver_detail {

inline double relative_gap(const SolveResult& res) {
  const double denom = std::max(1e-9, std::fabs(res.objective));
  return std::max(0.0, (res.objective - res.best_bound) / denom);
}

inline double fixed_cost_of(const Instance& inst, const FirstStageSolution& sol) {
  KahanSum s;
  for (std::size_t r = 0; r < inst.num_rooms(); ++r)
    if (sol.open[r]) s.add(inst.rooms[r].fixed_cost);
  for (std::size_t a = 0; a < inst.num_anes(); ++a)
    if (sol.called[a]) s.add(inst.anesthesiologists[a].call_in_cost);
  return s.value();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

}  // namespace solver_detail

// ---------------------------------------------------------------------------
// Decomposition by anesthesiologist pool.
// ---------------------------------------------------------------------------

struct PoolPart {
  Instance instance;
  std::vector<int> surgeries;  // global positions, ascending
  std::vector<int> rooms;
  std::vector<int> anes;
};

struct PoolDecomposition {
  std::vector<PoolPart> parts;
  std::vector<int> unused_rooms;  // no compatible surgery anywhere
  std::vector<int> unused_anes;
};

// One part per resource-sharing component.  Surgeries, rooms and
// anesthesiologists partition across parts (resources with no compatible
// surgery are reported separately; they are never opened or called in).
inline PoolDecomposition decompose_by_pool(const Instance& inst) {
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  PoolDecomposition dec;
  dec.parts.resize(sc.count);
  for (std::size_t i = 0; i < inst.num_surgeries(); ++i)
    dec.parts[sc.surgery_comp[i]].surgeries.push_back(static_cast<int>(i));
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    if (sc.room_comp[r] >= 0)
      dec.parts[sc.room_comp[r]].rooms.push_back(static_cast<int>(r));
    else
      dec.unused_rooms.push_back(static_cast<int>(r));
  }
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    if (sc.anes_comp[a] >= 0)
      dec.parts[sc.anes_comp[a]].anes.push_back(static_cast<int>(a));
    else
      dec.unused_anes.push_back(static_cast<int>(a));
  }
  for (auto& part : dec.parts) {
    Instance& pi = part.instance;
    for (int i : part.surgeries) {
      pi.surgeries.push_back(inst.surgeries[i]);
      pi.durations.mean.push_back(inst.durations.mean[i]);
      pi.durations.std.push_back(inst.durations.std[i]);
      pi.durations.lo.push_back(inst.durations.lo[i]);
      pi.durations.hi.push_back(inst.durations.hi[i]);
    }
    for (int r : part.rooms) pi.rooms.push_back(inst.rooms[r]);
    for (int a : part.anes) pi.anesthesiologists.push_back(inst.anesthesiologists[a]);
    pi.compat_anes.assign(part.surgeries.size(),
                          std::vector<char>(part.anes.size(), 0));
    pi.compat_room.assign(part.surgeries.size(),
                          std::vector<char>(part.rooms.size(), 0));
    for (std::size_t li = 0; li < part.surgeries.size(); ++li) {
      for (std::size_t la = 0; la < part.anes.size(); ++la)
        pi.compat_anes[li][la] = inst.compat_anes[part.surgeries[li]][part.anes[la]];
      for (std::size_t lr = 0; lr < part.rooms.size(); ++lr)
        pi.compat_room[li][lr] = inst.compat_room[part.surgeries[li]][part.rooms[lr]];
    }
  }
  return dec;
}

inline ScenarioSet slice_scenarios(const ScenarioSet& set,
                                   const std::vector<int>& surgeries) {
  ScenarioSet out;
  out.provenance = set.provenance;
  out.durations.reserve(set.size());
  for (const auto& row : set.durations) {
    std::vector<double> r;
    r.reserve(surgeries.size());
    for (int i : surgeries) r.push_back(row[i]);
    out.durations.push_back(std::move(r));
  }
  return out;
}

inline FirstStageSolution merge_part_solutions(
    const Instance& inst, const PoolDecomposition& dec,
    const std::vector<FirstStageSolution>& part_sols) {
  const int n = static_cast<int>(inst.num_surgeries());
  FirstStageSolution sol;
  sol.anes_of.assign(n, -1);
  sol.room_of.assign(n, -1);
  sol.called.assign(inst.num_anes(), 0);
  sol.open.assign(inst.num_rooms(), 0);
  sol.precedes.assign(n, std::vector<char>(n, 0));
  sol.start.assign(n, 0.0);
  for (std::size_t p = 0; p < dec.parts.size(); ++p) {
    const auto& part = dec.parts[p];
    const auto& ps = part_sols[p];
    for (std::size_t li = 0; li < part.surgeries.size(); ++li) {
      const int gi = part.surgeries[li];
      sol.anes_of[gi] = part.anes[ps.anes_of[li]];
      sol.room_of[gi] = part.rooms[ps.room_of[li]];
      sol.start[gi] = ps.start[li];
      for (std::size_t lj = 0; lj < part.surgeries.size(); ++lj)
        sol.precedes[gi][part.surgeries[lj]] = ps.precedes[li][lj];
    }
    for (std::size_t la = 0; la < part.anes.size(); ++la)
      sol.called[part.anes[la]] = ps.called[la];
    for (std::size_t lr = 0; lr < part.rooms.size(); ++lr)
      sol.open[part.rooms[lr]] = ps.open[lr];
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Extensive forms.
// ---------------------------------------------------------------------------

namespace solver_detail {

inline SolutionBundle solve_saa_monolithic(const Instance& inst,
                                           const ScenarioSet& scenarios,
                                           const RiskSpec& risk,
                                           const SolverOptions& opts) {
  Timer timer;
  const std::size_t n_scen = scenarios.size();
  if (n_scen == 0) throw UsageError("need at least one scenario");
  if (risk.cvar && !(risk.gamma >= 0.0 && risk.gamma < 1.0))
    throw UsageError("confidence level must lie in [0, 1)");

  FirstStageModel fsm = build_first_stage(inst);
  add_symmetry_breaking(fsm.frag, fsm.vars, inst, opts.sbc);
  const BigM mm = big_m_parameters(inst, opts.tightened_big_m);

  int tau = -1;
  if (risk.cvar) tau = fsm.frag.add_var("tau", -kInf, kInf, false);

  for (std::size_t k = 0; k < n_scen; ++k) {
    const auto& d = scenarios.durations[k];
    SecondStageVars ss =
        add_recourse_block(fsm.frag, inst, fsm.fx, fsm.sc, d, mm, &fsm.vars,
                           nullptr, "_" + std::to_string(k));
    if (opts.idle_vi)
      add_idle_nonneg_vi(fsm.frag, inst, fsm.fx, fsm.vars, ss, d);
    if (!risk.cvar) {
      for (const auto& [var, c] : ss.cost_terms)
        fsm.frag.add_objective(var, c / static_cast<double>(n_scen));
    } else {
      const int eta = fsm.frag.add_var("eta_" + std::to_string(k), 0.0, kInf, false);
      MilpRow row{{{eta, 1.0}, {tau, 1.0}}, RowSense::Ge, 0.0, ""};
      for (const auto& [var, c] : ss.cost_terms) row.terms.emplace_back(var, -c);
      fsm.frag.add_row(std::move(row));
      fsm.frag.add_objective(
          eta, 1.0 / (static_cast<double>(n_scen) * (1.0 - risk.gamma)));
    }
  }
  if (risk.cvar) fsm.frag.add_objective(tau, 1.0);

  HighsAdapter adapter;
  const auto res = adapter.solve(fsm.frag, opts.params);
  if (res.status == SolveStatus::Infeasible)
    throw ValidationError("extensive form is infeasible");
  if (!res.has_solution())
    throw BackendError("extensive form solve failed: " + res.message);

  SolutionBundle bundle;
  bundle.first_stage = extract_first_stage(inst, fsm.vars, res.values);
  bundle.objective = res.objective;
  bundle.fixed_cost = fixed_cost_of(inst, bundle.first_stage);
  bundle.risk_term = res.objective - bundle.fixed_cost;
  bundle.gap = relative_gap(res);
  bundle.wall_time = timer.seconds();
  bundle.model_tag = risk.cvar ? "SP-CVaR" : "SP-E";
  return bundle;
}

inline bool should_decompose(const Instance& inst, const RiskSpec& risk,
                             DecomposeMode mode) {
  switch (mode) {
    case DecomposeMode::On: return true;
    case DecomposeMode::Off: return false;
    case DecomposeMode::Auto:
      // Exact for the expectation objective; for CVaR it is the upper-bound
      // heuristic adopted for large instances only.
      return !risk.cvar || inst.num_surgeries() > 25;
  }
  return false;
}

inline SolutionBundle solve_saa(const Instance& inst,
                                const ScenarioSet& scenarios,
                                const RiskSpec& risk,
                                const SolverOptions& opts) {
  if (scenarios.width() != inst.num_surgeries())
    throw UsageError("scenario width does not match the instance");
  if (!should_decompose(inst, risk, opts.decompose))
    return solve_saa_monolithic(inst, scenarios, risk, opts);

  const auto dec = decompose_by_pool(inst);
  if (dec.parts.size() <= 1 && dec.unused_rooms.empty() && dec.unused_anes.empty())
    return solve_saa_monolithic(inst, scenarios, risk, opts);

  Timer timer;
  SolverOptions part_opts = opts;
  part_opts.decompose = DecomposeMode::Off;
  std::vector<FirstStageSolution> part_sols;
  double objective = 0.0, abs_gap = 0.0;
  for (const auto& part : dec.parts) {
    const auto part_scen = slice_scenarios(scenarios, part.surgeries);
    auto part_bundle = solve_saa_monolithic(part.instance, part_scen, risk, part_opts);
    objective += part_bundle.objective;
    abs_gap += part_bundle.gap * std::fabs(part_bundle.objective);
    part_sols.push_back(std::move(part_bundle.first_stage));
  }

  SolutionBundle bundle;
  bundle.first_stage = merge_part_solutions(inst, dec, part_sols);
  bundle.objective = objective;
  bundle.fixed_cost = fixed_cost_of(inst, bundle.first_stage);
  bundle.risk_term = objective - bundle.fixed_cost;
  bundle.gap = abs_gap / std::max(1e-9, std::fabs(objective));
  bundle.wall_time = timer.seconds();
  bundle.model_tag = risk.cvar ? "SP-CVaR" : "SP-E";
  return bundle;
}

}  // namespace solver_detail

inline SolutionBundle solve_sp_e(const Instance& inst,
                                 const ScenarioSet& scenarios,
                                 const SolverOptions& opts = {}) {
  return solver_detail::solve_saa(inst, scenarios, {false, 0.0}, opts);
}

inline SolutionBundle solve_sp_cvar(const Instance& inst,
                                    const ScenarioSet& scenarios, double gamma,
                                    const SolverOptions& opts = {}) {
  return solver_detail::solve_saa(inst, scenarios, {true, gamma}, opts);
}

inline nlohmann::json bundle_to_json(const Instance& inst,
                                     const SolutionBundle& b) {
  nlohmann::json j;
  j["model_tag"] = b.model_tag;
  j["objective"] = b.objective;
  j["fixed_cost"] = b.fixed_cost;
  j["risk_term"] = b.risk_term;
  j["gap"] = b.gap;
  j["wall_time"] = b.wall_time;
  j["first_stage"] = solution_to_json(inst, b.first_stage);
  return j;
}

inline SolutionBundle bundle_from_json(const Instance& inst,
                                       const nlohmann::json& j) {
  SolutionBundle b;
  b.model_tag = j.at("model_tag").get<std::string>();
  b.objective = j.at("objective").get<double>();
  b.fixed_cost = j.at("fixed_cost").get<double>();
  b.risk_term = j.at("risk_term").get<double>();
  b.gap = j.at("gap").get<double>();
  b.wall_time = j.at("wall_time").get<double>();
  b.first_stage = solution_from_json(inst, j.at("first_stage"));
  return b;
}

}  // namespace orasp
