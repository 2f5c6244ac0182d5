#pragma once

// Out-of-sample evaluation of fixed schedules, out-of-sample disappointment,
// the Monte-Carlo optimization gap procedure, and the exhaustive-enumeration
// optimum used as a test oracle.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "orasp/common.hpp"
#include "orasp/instance.hpp"
#include "orasp/model_core.hpp"
#include "orasp/scenario.hpp"
#include "orasp/sp_solver.hpp"

namespace orasp {

struct MetricsSummary {
  // Per-scenario totals, index-aligned with the scenario set.
  std::vector<double> waiting;
  std::vector<double> room_overtime;
  std::vector<double> anes_overtime;
  std::vector<double> room_idle;
  std::vector<double> anes_idle;
  std::vector<double> op_cost;     // second-stage objective
  std::vector<double> total_cost;  // fixed + op
  double fixed_cost = 0.0;

  double mean_waiting() const { return mean_of(waiting); }
  double mean_room_overtime() const { return mean_of(room_overtime); }
  double mean_anes_overtime() const { return mean_of(anes_overtime); }
  double mean_room_idle() const { return mean_of(room_idle); }
  double mean_anes_idle() const { return mean_of(anes_idle); }
  double mean_op_cost() const { return mean_of(op_cost); }
  double mean_total_cost() const { return mean_of(total_cost); }
};

inline MetricsSummary simulate(const Instance& inst,
                               const FirstStageSolution& sol,
                               const ScenarioSet& scenarios) {
  if (scenarios.width() != inst.num_surgeries())
    throw UsageError("scenario width does not match the instance");
  const auto rep = check_first_stage(inst, sol);
  if (!rep.ok())
    throw ValidationError("schedule rejected before simulation:\n" +
                          rep.to_string());

  MetricsSummary ms;
  ms.fixed_cost = solver_detail::fixed_cost_of(inst, sol);
  const std::size_t n = scenarios.size();
  ms.waiting.resize(n);
  ms.room_overtime.resize(n);
  ms.anes_overtime.resize(n);
  ms.room_idle.resize(n);
  ms.anes_idle.resize(n);
  ms.op_cost.resize(n);
  ms.total_cost.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const SecondStageOutcome out =
        evaluate_recourse(inst, sol, scenarios.durations[k]);
    ms.waiting[k] = kahan_total(out.waiting);
    ms.room_overtime[k] = kahan_total(out.room_overtime);
    ms.anes_overtime[k] = kahan_total(out.anes_overtime);
    ms.room_idle[k] = kahan_total(out.room_idle);
    ms.anes_idle[k] = kahan_total(out.anes_idle);
    ms.op_cost[k] = out.cost;
    ms.total_cost[k] = ms.fixed_cost + out.cost;
  }
  return ms;
}

// Relative excess of realized cost over the model's promised value, clamped
// at zero.
inline std::vector<double> disappointment(double v_opt,
                                          const std::vector<double>& total_costs) {
  if (!(v_opt > 0.0))
    throw UsageError("disappointment requires a positive optimal value");
  std::vector<double> out;
  out.reserve(total_costs.size());
  for (double v : total_costs)
    out.push_back(std::max(0.0, (v - v_opt) / v_opt));
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo optimization gap.
// ---------------------------------------------------------------------------

struct McoReport {
  double mu_hat = 0.0;                 // mean of the K SAA optima
  std::vector<double> mu_hat_k;        // per-replication evaluation means
  double sigma2_hat = 0.0;
  std::vector<double> sigma2_hat_k;
  std::vector<double> gap_k;           // mu_hat_k - mu_hat
  double aoi = 0.0;                    // |sum gap / sum mu_hat_k|
  std::vector<std::string> errors;     // per-replication failures, empty = ok
};

inline McoReport mco(const Instance& inst, int replications, int n_in,
                     int n_eval, std::uint64_t seed,
                     const SolverOptions& opts = {}) {
  if (replications < 2) throw UsageError("need at least two replications");
  if (n_in < 1 || n_eval < 2) throw UsageError("sample sizes too small");

  McoReport rep;
  rep.errors.assign(replications, "");
  std::vector<double> v_k;
  for (int k = 0; k < replications; ++k) {
    try {
      const auto in_sample = sample_in_sample(
          inst.durations, n_in, split_seed(seed, 2 * k));
      const auto bundle = solve_sp_e(inst, in_sample, opts);
      const auto eval = sample_in_sample(inst.durations, n_eval,
                                         split_seed(seed, 2 * k + 1));
      const auto ms = simulate(inst, bundle.first_stage, eval);
      v_k.push_back(bundle.objective);
      rep.mu_hat_k.push_back(ms.mean_total_cost());
      const double mk = rep.mu_hat_k.back();
      KahanSum var;
      for (double v : ms.total_cost) var.add((v - mk) * (v - mk));
      rep.sigma2_hat_k.push_back(
          var.value() / (static_cast<double>(n_eval) *
                         static_cast<double>(n_eval - 1)));
    } catch (const std::exception& e) {
      rep.errors[k] = e.what();
    }
  }
  const std::size_t done = v_k.size();
  if (done < 2)
    throw BackendError("too few successful replications for gap estimates");
  rep.mu_hat = mean_of(v_k);
  KahanSum var;
  for (double v : v_k) var.add((v - rep.mu_hat) * (v - rep.mu_hat));
  rep.sigma2_hat =
      var.value() / (static_cast<double>(done) * static_cast<double>(done - 1));
  double gap_sum = 0.0, upper_sum = 0.0;
  for (double mk : rep.mu_hat_k) {
    rep.gap_k.push_back(mk - rep.mu_hat);
    gap_sum += mk - rep.mu_hat;
    upper_sum += mk;
  }
  rep.aoi = std::fabs(gap_sum / upper_sum);
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle.
//
// Enumerates every compatible room/anesthesiologist assignment and every
// consistent per-resource order, then optimizes the scheduled starts and all
// scenario recourses jointly in one LP per combinatorial skeleton.  The
// enumeration ignores symmetry entirely, so it doubles as the reference for
// symmetry-breaking preservation.
// ---------------------------------------------------------------------------

namespace oracle_detail {

// Transitive closure of the per-resource successor chains; empty when the
// union has a cycle.
inline std::optional<std::vector<std::vector<char>>> close_orders(
    int n, const std::vector<std::vector<int>>& chains) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (const auto& chain : chains)
    for (std::size_t k = 1; k < chain.size(); ++k)
      reach[chain[k - 1]][chain[k]] = 1;
  for (int via = 0; via < n; ++via)
    for (int i = 0; i < n; ++i)
      if (reach[i][via])
        for (int j = 0; j < n; ++j)
          if (reach[via][j]) reach[i][j] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (reach[i][j] && reach[j][i]) return std::nullopt;
  return reach;
}

struct PermutationOdometer {
  std::vector<std::vector<int>> lists;  // each kept in sorted rotation
  bool first = true;

  explicit PermutationOdometer(std::vector<std::vector<int>> groups)
      : lists(std::move(groups)) {
    for (auto& l : lists) std::sort(l.begin(), l.end());
  }
  bool next() {
    if (first) {
      first = false;
      return true;
    }
    for (auto& l : lists) {
      if (std::next_permutation(l.begin(), l.end())) return true;
      // wrapped; carry to the next list
    }
    return false;
  }
};

}  // namespace oracle_detail

inline double brute_force_optimum(const Instance& inst,
                                  const ScenarioSet& scenarios,
                                  const RiskSpec& risk = {},
                                  bool tightened_big_m = true) {
  const int n = static_cast<int>(inst.num_surgeries());
  if (n > 7)
    throw UsageError("exhaustive enumeration is limited to 7 surgeries");
  if (scenarios.size() == 0) throw UsageError("need at least one scenario");
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  const BigM mm = big_m_parameters(inst, tightened_big_m);
  HighsAdapter adapter;
  SolveParams lp_params;
  lp_params.rel_gap = 0.0;

  std::vector<int> room_of(n), anes_of(n), room_idx(n, 0), anes_idx(n, 0);
  double best = kInf;

  // Odometer over compatible assignments.
  bool more_assignments = true;
  while (more_assignments) {
    for (int i = 0; i < n; ++i) {
      room_of[i] = fx.R_i[i][room_idx[i]];
      anes_of[i] = fx.A_i[i][anes_idx[i]];
    }
    // Per-resource surgery groups under this assignment.
    std::vector<std::vector<int>> groups;
    for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
      std::vector<int> g;
      for (int i = 0; i < n; ++i)
        if (room_of[i] == static_cast<int>(r)) g.push_back(i);
      if (g.size() >= 2) groups.push_back(std::move(g));
    }
    for (std::size_t a = 0; a < inst.num_anes(); ++a) {
      std::vector<int> g;
      for (int i = 0; i < n; ++i)
        if (anes_of[i] == static_cast<int>(a)) g.push_back(i);
      if (g.size() >= 2) groups.push_back(std::move(g));
    }

    oracle_detail::PermutationOdometer orders(std::move(groups));
    while (orders.next()) {
      const auto closure = oracle_detail::close_orders(n, orders.lists);
      if (!closure) continue;  // cyclic combination, not implementable

      FirstStageSolution sol;
      sol.anes_of = anes_of;
      sol.room_of = room_of;
      sol.called.assign(inst.num_anes(), 0);
      sol.open.assign(inst.num_rooms(), 0);
      sol.precedes = *closure;
      sol.start.assign(n, 0.0);
      for (int i = 0; i < n; ++i) {
        sol.open[room_of[i]] = 1;
        if (inst.anesthesiologists[anes_of[i]].is_on_call)
          sol.called[anes_of[i]] = 1;
      }

      ModelFragment f;
      double fixed = 0.0;
      for (std::size_t r = 0; r < inst.num_rooms(); ++r)
        if (sol.open[r]) fixed += inst.rooms[r].fixed_cost;
      for (std::size_t a = 0; a < inst.num_anes(); ++a)
        if (sol.called[a]) fixed += inst.anesthesiologists[a].call_in_cost;

      std::vector<int> s_vars(n);
      for (int i = 0; i < n; ++i)
        s_vars[i] = f.add_var("s_" + std::to_string(i),
                              inst.anesthesiologists[anes_of[i]].shift_start,
                              inst.day_horizon(), false);
      int tau = -1;
      if (risk.cvar) tau = f.add_var("tau", -kInf, kInf, false);
      const double n_scen = static_cast<double>(scenarios.size());
      for (std::size_t k = 0; k < scenarios.size(); ++k) {
        SecondStageVars ss = add_recourse_block(
            f, inst, fx, sc, scenarios.durations[k], mm, nullptr, &sol,
            "_" + std::to_string(k), &s_vars);
        if (!risk.cvar) {
          for (const auto& [var, c] : ss.cost_terms)
            f.add_objective(var, c / n_scen);
        } else {
          const int eta = f.add_var("eta_" + std::to_string(k), 0.0, kInf, false);
          MilpRow row{{{eta, 1.0}, {tau, 1.0}}, RowSense::Ge, 0.0, ""};
          for (const auto& [var, c] : ss.cost_terms) row.terms.emplace_back(var, -c);
          f.add_row(std::move(row));
          f.add_objective(eta, 1.0 / (n_scen * (1.0 - risk.gamma)));
        }
      }
      if (risk.cvar) f.add_objective(tau, 1.0);

      const auto res = adapter.solve(f, lp_params);
      if (res.status != SolveStatus::OptimalWithinGap)
        throw BackendError("oracle LP failed: " + res.message);
      best = std::min(best, fixed + res.objective);
    }

    // Advance the assignment odometer.
    more_assignments = false;
    for (int i = 0; i < n; ++i) {
      if (++anes_idx[i] < static_cast<int>(fx.A_i[i].size())) {
        more_assignments = true;
        break;
      }
      anes_idx[i] = 0;
      if (++room_idx[i] < static_cast<int>(fx.R_i[i].size())) {
        more_assignments = true;
        break;
      }
      room_idx[i] = 0;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Metric export.
// ---------------------------------------------------------------------------

inline std::string metrics_table(const MetricsSummary& ms) {
  std::ostringstream os;
  os << "scenario,waiting,room_overtime,anes_overtime,room_idle,anes_idle,"
        "op_cost,total_cost\n";
  for (std::size_t k = 0; k < ms.op_cost.size(); ++k)
    os << (k + 1) << "," << ms.waiting[k] << "," << ms.room_overtime[k] << ","
       << ms.anes_overtime[k] << "," << ms.room_idle[k] << ","
       << ms.anes_idle[k] << "," << ms.op_cost[k] << "," << ms.total_cost[k]
       << "\n";
  return os.str();
}

inline nlohmann::json metrics_summary_json(const MetricsSummary& ms) {
  return {{"fixed_cost", ms.fixed_cost},
          {"mean_waiting", ms.mean_waiting()},
          {"mean_room_overtime", ms.mean_room_overtime()},
          {"mean_anes_overtime", ms.mean_anes_overtime()},
          {"mean_room_idle", ms.mean_room_idle()},
          {"mean_anes_idle", ms.mean_anes_idle()},
          {"mean_op_cost", ms.mean_op_cost()},
          {"mean_total_cost", ms.mean_total_cost()},
          {"scenarios", ms.op_cost.size()}};
}

// Equal-width binned counts, ready for histogram plotting.
inline std::string histogram_table(const std::vector<double>& values,
                                   int bins = 20) {
  double lo = kInf, hi = -kInf;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ostringstream os;
  os << "bin_start,bin_end,count\n";
  if (values.empty() || !(hi > lo)) {
    if (!values.empty()) os << lo << "," << hi << "," << values.size() << "\n";
    return os.str();
  }
  const double width = (hi - lo) / bins;
  std::vector<int> counts(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  for (int b = 0; b < bins; ++b)
    os << lo + b * width << "," << lo + (b + 1) * width << "," << counts[b]
       << "\n";
  return os.str();
}

}  // namespace orasp
