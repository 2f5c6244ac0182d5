#pragma once

// Solver-agnostic model fragments for the ORASP: the first-stage
// allocation/assignment/sequencing system, per-scenario recourse blocks, the
// recourse dual, big-M parameters, symmetry-breaking constraints, and the
// idle-nonnegativity valid inequalities.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "orasp/common.hpp"
#include "orasp/instance.hpp"
#include "orasp/milp_adapter.hpp"

namespace orasp {

// Fragments are plain variable/row/objective containers; the adapter
// consumes them directly.
using ModelFragment = MilpModel;

struct BigM {
  double m_start = 0.0;  // activates the shift-start bound on s_i
  double m_seq = 0.0;    // precedence rows
  double m_anes = 0.0;   // anesthesiologist overtime rows
  double m_room = 0.0;   // room overtime rows
};

// Chain bound on the latest completion time.  The loose variant covers every
// feasible schedule; the tight variant uses the per-pool workload bound and
// is meant for optimization models (schedules that would exceed it are
// dominated).
inline BigM big_m_parameters(const Instance& inst, bool tightened = true) {
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  double sum_hi = 0.0;
  for (double h : inst.durations.hi) sum_hi += h;
  double max_start = 0.0, min_end = kInf;
  for (const auto& a : inst.anesthesiologists) {
    max_start = std::max(max_start, a.shift_start);
    min_end = std::min(min_end, a.shift_end);
  }
  if (inst.anesthesiologists.empty()) min_end = 0.0;
  double min_horizon = kInf;
  for (const auto& r : inst.rooms) min_horizon = std::min(min_horizon, r.horizon_end);
  if (inst.rooms.empty()) min_horizon = 0.0;

  BigM m;
  m.m_start = max_start;
  if (!tightened) {
    m.m_seq = inst.day_horizon() + sum_hi;
  } else {
    std::vector<double> comp_chain(sc.count, 0.0);
    for (std::size_t i = 0; i < inst.num_surgeries(); ++i)
      comp_chain[sc.surgery_comp[i]] += inst.durations.hi[i];
    double chain = 0.0;
    for (double c : comp_chain) chain = std::max(chain, c);
    m.m_seq = max_start + chain;
  }
  m.m_anes = std::max(0.0, m.m_seq - min_end);
  m.m_room = std::max(0.0, m.m_seq - min_horizon);
  return m;
}

// Valid for one fixed realization: completion times cannot exceed the day
// horizon plus the total realized workload.
inline BigM big_m_for_scenario(const Instance& inst,
                               const std::vector<double>& d) {
  double sum_d = 0.0;
  for (double v : d) sum_d += v;
  double max_start = 0.0, min_end = kInf;
  for (const auto& a : inst.anesthesiologists) {
    max_start = std::max(max_start, a.shift_start);
    min_end = std::min(min_end, a.shift_end);
  }
  if (inst.anesthesiologists.empty()) min_end = 0.0;
  double min_horizon = kInf;
  for (const auto& r : inst.rooms) min_horizon = std::min(min_horizon, r.horizon_end);
  if (inst.rooms.empty()) min_horizon = 0.0;

  BigM m;
  m.m_start = max_start;
  m.m_seq = inst.day_horizon() + sum_d;
  m.m_anes = std::max(0.0, m.m_seq - min_end);
  m.m_room = std::max(0.0, m.m_seq - min_horizon);
  return m;
}

// ---------------------------------------------------------------------------
// First-stage decisions.
// ---------------------------------------------------------------------------

// Compact encoding: the assignment constraints hold by construction, so a
// solution always carries exactly one anesthesiologist and room per surgery.
struct FirstStageSolution {
  std::vector<int> anes_of;            // per surgery
  std::vector<int> room_of;            // per surgery
  std::vector<char> called;            // y, per anesthesiologist
  std::vector<char> open;              // v, per room
  std::vector<std::vector<char>> precedes;  // u, n x n
  std::vector<double> start;           // s, per surgery

  bool x(int i, int a) const { return anes_of[i] == a; }
  bool z(int i, int r) const { return room_of[i] == r; }
  std::size_t size() const { return anes_of.size(); }
};

struct SecondStageOutcome {
  std::vector<double> actual_start;   // q
  std::vector<double> waiting;        // w
  std::vector<double> anes_overtime;  // o_a
  std::vector<double> anes_idle;      // g_a
  std::vector<double> room_overtime;  // o_r
  std::vector<double> room_idle;      // g_r
  double cost = 0.0;
};

// Variable handles into a fragment that contains the first stage.
struct FirstStageVars {
  std::map<std::pair<int, int>, int> x;          // (surgery, anesthesiologist)
  std::map<std::pair<int, int>, int> z;          // (surgery, room)
  std::vector<int> y;                            // per anesthesiologist
  std::vector<int> v;                            // per room
  std::vector<int> s;                            // per surgery
  std::map<std::pair<int, int>, int> u;          // same-component ordered pairs
  std::map<std::tuple<int, int, int>, int> alpha;  // (i, i', a)
  std::map<std::tuple<int, int, int>, int> beta;   // (i, i', r)
  std::vector<std::pair<int, int>> u_pairs;
};

// Forced assignments (special scheduling requests), applied as variable
// bounds on the fragment.
struct Fixings {
  std::vector<std::tuple<int, int, bool>> x;  // (surgery, anesthesiologist, val)
  std::vector<std::tuple<int, int, bool>> z;  // (surgery, room, val)
  std::vector<std::pair<int, bool>> y;
  std::vector<std::pair<int, bool>> v;
};

struct FirstStageModel {
  ModelFragment frag;
  FirstStageVars vars;
  FeasibilityIndex fx;
  SharingComponents sc;
};

inline FirstStageModel build_first_stage(const Instance& inst,
                                         const Fixings& fixings = {}) {
  FirstStageModel m;
  m.fx = derive_feasibility(inst);
  m.sc = sharing_components(inst, m.fx);
  ModelFragment& f = m.frag;
  FirstStageVars& vv = m.vars;
  const int n = static_cast<int>(inst.num_surgeries());
  const int na = static_cast<int>(inst.num_anes());
  const int nr = static_cast<int>(inst.num_rooms());
  const double horizon = inst.day_horizon();

  for (const auto& [i, a] : m.fx.F_A)
    vv.x[{i, a}] = f.add_binary("x_" + std::to_string(i) + "_" + std::to_string(a));
  for (const auto& [i, r] : m.fx.F_R)
    vv.z[{i, r}] = f.add_binary("z_" + std::to_string(i) + "_" + std::to_string(r));
  vv.y.resize(na);
  for (int a = 0; a < na; ++a) {
    vv.y[a] = f.add_binary("y_" + std::to_string(a));
    if (!inst.anesthesiologists[a].is_on_call)
      f.vars[vv.y[a]].ub = 0.0;  // y_a <= h_call
    f.add_objective(vv.y[a], inst.anesthesiologists[a].call_in_cost);
  }
  vv.v.resize(nr);
  for (int r = 0; r < nr; ++r) {
    vv.v[r] = f.add_binary("v_" + std::to_string(r));
    f.add_objective(vv.v[r], inst.rooms[r].fixed_cost);
  }
  vv.s.resize(n);
  for (int i = 0; i < n; ++i)
    vv.s[i] = f.add_var("s_" + std::to_string(i), 0.0, horizon, false);

  // Precedence variables only where two surgeries can ever share a resource.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && m.sc.surgery_comp[i] == m.sc.surgery_comp[j]) {
        vv.u[{i, j}] = f.add_binary("u_" + std::to_string(i) + "_" + std::to_string(j));
        vv.u_pairs.emplace_back(i, j);
      }
  for (int a = 0; a < na; ++a)
    for (int i : m.fx.I_a[a])
      for (int j : m.fx.I_a[a])
        if (i != j)
          vv.alpha[{i, j, a}] = f.add_binary("al_" + std::to_string(i) + "_" +
                                             std::to_string(j) + "_" + std::to_string(a));
  for (int r = 0; r < nr; ++r)
    for (int i : m.fx.I_r[r])
      for (int j : m.fx.I_r[r])
        if (i != j)
          vv.beta[{i, j, r}] = f.add_binary("be_" + std::to_string(i) + "_" +
                                            std::to_string(j) + "_" + std::to_string(r));

  // Every surgery gets exactly one anesthesiologist and one room.
  for (int i = 0; i < n; ++i) {
    MilpRow rx{{}, RowSense::Eq, 1.0, "assign_anes_" + std::to_string(i)};
    for (int a : m.fx.A_i[i]) rx.terms.emplace_back(vv.x[{i, a}], 1.0);
    f.add_row(std::move(rx));
    MilpRow rz{{}, RowSense::Eq, 1.0, "assign_room_" + std::to_string(i)};
    for (int r : m.fx.R_i[i]) rz.terms.emplace_back(vv.z[{i, r}], 1.0);
    f.add_row(std::move(rz));
  }
  // Surgeries only in open rooms; regular duty or called in.
  for (const auto& [i, r] : m.fx.F_R)
    f.add_row({{{vv.z[{i, r}], 1.0}, {vv.v[r], -1.0}}, RowSense::Le, 0.0, ""});
  for (const auto& [i, a] : m.fx.F_A) {
    const double h_reg = inst.anesthesiologists[a].is_regular ? 1.0 : 0.0;
    f.add_row({{{vv.x[{i, a}], 1.0}, {vv.y[a], -1.0}},
               RowSense::Le,
               h_reg,
               ""});
  }
  // Scheduled start respects the assigned shift start.
  double m_start = 0.0;
  for (const auto& a : inst.anesthesiologists)
    m_start = std::max(m_start, a.shift_start);
  for (const auto& [i, a] : m.fx.F_A) {
    const double t0 = inst.anesthesiologists[a].shift_start;
    if (t0 <= 0.0) continue;  // vacuous row
    f.add_row({{{vv.s[i], 1.0}, {vv.x[{i, a}], -m_start}},
               RowSense::Ge,
               t0 - m_start,
               ""});
  }

  // Precedence structure: alpha/beta imply u, u is an order, and surgeries
  // sharing an assigned resource are sequenced exactly once.
  for (const auto& [key, av] : vv.alpha) {
    const auto [i, j, a] = key;
    f.add_row({{{av, 1.0}, {vv.u[{i, j}], -1.0}}, RowSense::Le, 0.0, ""});
  }
  for (const auto& [key, bv] : vv.beta) {
    const auto [i, j, r] = key;
    f.add_row({{{bv, 1.0}, {vv.u[{i, j}], -1.0}}, RowSense::Le, 0.0, ""});
  }
  for (const auto& [i, j] : vv.u_pairs)
    if (i < j)
      f.add_row({{{vv.u[{i, j}], 1.0}, {vv.u[{j, i}], 1.0}}, RowSense::Le, 1.0, ""});
  {
    std::vector<std::vector<int>> comp_members(m.sc.count);
    for (int i = 0; i < n; ++i) comp_members[m.sc.surgery_comp[i]].push_back(i);
    for (const auto& members : comp_members)
      for (int i : members)
        for (int j : members) {
          if (i == j) continue;
          for (int k : members) {
            if (k == i || k == j) continue;
            // u_{i,k} >= u_{i,j} + u_{j,k} - 1
            f.add_row({{{vv.u[{i, k}], 1.0},
                        {vv.u[{i, j}], -1.0},
                        {vv.u[{j, k}], -1.0}},
                       RowSense::Ge,
                       -1.0,
                       ""});
          }
        }
  }
  auto pair_rows = [&f](int fwd, int rev, int x1, int x2) {
    f.add_row({{{fwd, 1.0}, {rev, 1.0}, {x1, -1.0}}, RowSense::Le, 0.0, ""});
    f.add_row({{{fwd, 1.0}, {rev, 1.0}, {x2, -1.0}}, RowSense::Le, 0.0, ""});
    f.add_row({{{fwd, 1.0}, {rev, 1.0}, {x1, -1.0}, {x2, -1.0}},
               RowSense::Ge,
               -1.0,
               ""});
  };
  for (const auto& [key, av] : vv.alpha) {
    const auto [i, j, a] = key;
    if (i < j) pair_rows(av, vv.alpha[{j, i, a}], vv.x[{i, a}], vv.x[{j, a}]);
  }
  for (const auto& [key, bv] : vv.beta) {
    const auto [i, j, r] = key;
    if (i < j) pair_rows(bv, vv.beta[{j, i, r}], vv.z[{i, r}], vv.z[{j, r}]);
  }
  // Cross-resource coupling: a room sequence forces the anesthesiologist
  // sequence of the shared pair, and vice versa.
  for (const auto& [key, av] : vv.alpha) {
    const auto [i, j, a] = key;
    for (int r : m.fx.R_i[i]) {
      auto itb = vv.beta.find({i, j, r});
      if (itb == vv.beta.end()) continue;
      f.add_row({{{av, 1.0},
                  {vv.x[{i, a}], -1.0},
                  {vv.x[{j, a}], -1.0},
                  {itb->second, -1.0}},
                 RowSense::Ge,
                 -2.0,
                 ""});
      f.add_row({{{itb->second, 1.0},
                  {vv.z[{i, r}], -1.0},
                  {vv.z[{j, r}], -1.0},
                  {av, -1.0}},
                 RowSense::Ge,
                 -2.0,
                 ""});
    }
  }

  // Special scheduling requests become bound fixings.
  auto fix_binary = [&f](int var, bool val) {
    f.vars[var].lb = val ? 1.0 : 0.0;
    f.vars[var].ub = val ? 1.0 : 0.0;
  };
  for (const auto& [i, a, val] : fixings.x) {
    auto it = vv.x.find({i, a});
    if (it == vv.x.end()) {
      if (val)
        throw ValidationError("cannot fix x: surgery " +
                              std::to_string(inst.surgeries[i].id) +
                              " is incompatible with anesthesiologist " +
                              std::to_string(inst.anesthesiologists[a].id));
      continue;
    }
    fix_binary(it->second, val);
  }
  for (const auto& [i, r, val] : fixings.z) {
    auto it = vv.z.find({i, r});
    if (it == vv.z.end()) {
      if (val)
        throw ValidationError("cannot fix z: surgery " +
                              std::to_string(inst.surgeries[i].id) +
                              " is incompatible with room " +
                              std::to_string(inst.rooms[r].id));
      continue;
    }
    fix_binary(it->second, val);
  }
  for (const auto& [a, val] : fixings.y) {
    if (val && !inst.anesthesiologists[a].is_on_call)
      throw ValidationError("cannot call in anesthesiologist " +
                            std::to_string(inst.anesthesiologists[a].id) +
                            ": not on call");
    fix_binary(vv.y[a], val);
  }
  for (const auto& [r, val] : fixings.v) fix_binary(vv.v[r], val);
  return m;
}

// ---------------------------------------------------------------------------
// Recourse blocks.
// ---------------------------------------------------------------------------

struct SecondStageVars {
  std::vector<int> q, w;       // per surgery
  std::vector<int> oa, ga;     // per anesthesiologist
  std::vector<int> orr, grr;   // per room
  // Objective coefficients of this block (idle/overtime/waiting weights).
  std::vector<std::pair<int, double>> cost_terms;
};

// Appends the recourse variables and rows for one duration vector.  In
// coupled mode the rows reference the first-stage variables in `coupled`;
// in fixed mode first-stage values come from `fixed` and fold into the rhs.
// `s_vars`, when given in fixed mode, keeps the scheduled starts symbolic
// (used when optimizing s jointly for a fixed combinatorial skeleton).
inline SecondStageVars add_recourse_block(
    ModelFragment& f, const Instance& inst, const FeasibilityIndex& fx,
    const SharingComponents& sc, const std::vector<double>& d, const BigM& mm,
    const FirstStageVars* coupled, const FirstStageSolution* fixed,
    const std::string& tag, const std::vector<int>* s_vars = nullptr) {
  const int n = static_cast<int>(inst.num_surgeries());
  const int na = static_cast<int>(inst.num_anes());
  const int nr = static_cast<int>(inst.num_rooms());
  SecondStageVars ss;
  ss.q.resize(n);
  ss.w.resize(n);
  ss.oa.resize(na);
  ss.ga.resize(na);
  ss.orr.resize(nr);
  ss.grr.resize(nr);
  for (int i = 0; i < n; ++i) {
    ss.q[i] = f.add_var("q" + tag + "_" + std::to_string(i), 0.0, kInf, false);
    ss.w[i] = f.add_var("w" + tag + "_" + std::to_string(i), 0.0, kInf, false);
    ss.cost_terms.emplace_back(ss.w[i], inst.surgeries[i].waiting_cost);
  }
  for (int a = 0; a < na; ++a) {
    ss.oa[a] = f.add_var("oa" + tag + "_" + std::to_string(a), 0.0, kInf, false);
    ss.ga[a] = f.add_var("ga" + tag + "_" + std::to_string(a), 0.0, kInf, false);
    ss.cost_terms.emplace_back(ss.oa[a], inst.anesthesiologists[a].overtime_cost);
    ss.cost_terms.emplace_back(ss.ga[a], inst.anesthesiologists[a].idle_cost);
  }
  for (int r = 0; r < nr; ++r) {
    ss.orr[r] = f.add_var("or" + tag + "_" + std::to_string(r), 0.0, kInf, false);
    ss.grr[r] = f.add_var("gr" + tag + "_" + std::to_string(r), 0.0, kInf, false);
    ss.cost_terms.emplace_back(ss.orr[r], inst.rooms[r].overtime_cost);
    ss.cost_terms.emplace_back(ss.grr[r], inst.rooms[r].idle_cost);
  }

  // Precedence: q_j >= q_i + d_i - M(1 - u_ij), same-component pairs only.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || sc.surgery_comp[i] != sc.surgery_comp[j]) continue;
      if (coupled) {
        f.add_row({{{ss.q[j], 1.0},
                    {ss.q[i], -1.0},
                    {coupled->u.at({i, j}), -mm.m_seq}},
                   RowSense::Ge,
                   d[i] - mm.m_seq,
                   ""});
      } else {
        const double u = fixed->precedes[i][j] ? 1.0 : 0.0;
        f.add_row({{{ss.q[j], 1.0}, {ss.q[i], -1.0}},
                   RowSense::Ge,
                   d[i] - mm.m_seq * (1.0 - u),
                   ""});
      }
    }
  // Actual start is no earlier than scheduled; waiting is the difference.
  for (int i = 0; i < n; ++i) {
    const int sym_s = coupled ? coupled->s[i] : (s_vars ? (*s_vars)[i] : -1);
    if (sym_s >= 0) {
      f.add_row({{{ss.q[i], 1.0}, {sym_s, -1.0}}, RowSense::Ge, 0.0, ""});
      f.add_row({{{ss.w[i], 1.0}, {ss.q[i], -1.0}, {sym_s, 1.0}},
                 RowSense::Ge,
                 0.0,
                 ""});
    } else {
      f.add_row({{{ss.q[i], 1.0}}, RowSense::Ge, fixed->start[i], ""});
      f.add_row({{{ss.w[i], 1.0}, {ss.q[i], -1.0}},
                 RowSense::Ge,
                 -fixed->start[i],
                 ""});
    }
  }
  // Overtime, relaxed for unassigned pairs, closed rooms and called-in
  // anesthesiologists.
  for (const auto& [i, a] : fx.F_A) {
    const double t_end = inst.anesthesiologists[a].shift_end;
    if (coupled) {
      f.add_row({{{ss.oa[a], 1.0},
                  {ss.q[i], -1.0},
                  {coupled->x.at({i, a}), -mm.m_anes},
                  {coupled->y[a], mm.m_anes}},
                 RowSense::Ge,
                 d[i] - t_end - mm.m_anes,
                 ""});
    } else {
      const double slack = 1.0 - (fixed->x(i, a) ? 1.0 : 0.0) +
                           (fixed->called[a] ? 1.0 : 0.0);
      f.add_row({{{ss.oa[a], 1.0}, {ss.q[i], -1.0}},
                 RowSense::Ge,
                 d[i] - t_end - mm.m_anes * slack,
                 ""});
    }
  }
  for (const auto& [i, r] : fx.F_R) {
    const double t_end = inst.rooms[r].horizon_end;
    if (coupled) {
      f.add_row({{{ss.orr[r], 1.0},
                  {ss.q[i], -1.0},
                  {coupled->z.at({i, r}), -mm.m_room}},
                 RowSense::Ge,
                 d[i] - t_end - mm.m_room,
                 ""});
    } else {
      const double slack = fixed->z(i, r) ? 0.0 : 1.0;
      f.add_row({{{ss.orr[r], 1.0}, {ss.q[i], -1.0}},
                 RowSense::Ge,
                 d[i] - t_end - mm.m_room * slack,
                 ""});
    }
  }
  // Idle time of regular anesthesiologists and open rooms.
  for (int a = 0; a < na; ++a) {
    const auto& an = inst.anesthesiologists[a];
    if (!an.is_regular) continue;  // idle of on-call staff is zero
    const double span = an.shift_end - an.shift_start;
    if (coupled) {
      MilpRow row{{{ss.ga[a], 1.0}, {ss.oa[a], -1.0}}, RowSense::Ge, span, ""};
      for (int i : fx.I_a[a]) row.terms.emplace_back(coupled->x.at({i, a}), d[i]);
      f.add_row(std::move(row));
    } else {
      double load = 0.0;
      for (int i : fx.I_a[a])
        if (fixed->x(i, a)) load += d[i];
      f.add_row({{{ss.ga[a], 1.0}, {ss.oa[a], -1.0}},
                 RowSense::Ge,
                 span - load,
                 ""});
    }
  }
  for (int r = 0; r < nr; ++r) {
    const double t_end = inst.rooms[r].horizon_end;
    if (coupled) {
      MilpRow row{{{ss.grr[r], 1.0}, {ss.orr[r], -1.0}, {coupled->v[r], -t_end}},
                  RowSense::Ge,
                  0.0,
                  ""};
      for (int i : fx.I_r[r]) row.terms.emplace_back(coupled->z.at({i, r}), d[i]);
      f.add_row(std::move(row));
    } else {
      double load = 0.0;
      for (int i : fx.I_r[r])
        if (fixed->z(i, r)) load += d[i];
      f.add_row({{{ss.grr[r], 1.0}, {ss.orr[r], -1.0}},
                 RowSense::Ge,
                 (fixed->open[r] ? t_end : 0.0) - load,
                 ""});
    }
  }
  return ss;
}

// Pure second-stage LP for a fixed first stage: the spec's recourse value
// function Q.  `mm` defaults to the scenario-valid chain bound.
inline std::pair<ModelFragment, SecondStageVars> build_second_stage(
    const Instance& inst, const FeasibilityIndex& fx,
    const SharingComponents& sc, const FirstStageSolution& sol,
    const std::vector<double>& d, std::optional<BigM> mm_opt = std::nullopt) {
  ModelFragment f;
  const BigM mm = mm_opt ? *mm_opt : big_m_for_scenario(inst, d);
  SecondStageVars ss =
      add_recourse_block(f, inst, fx, sc, d, mm, nullptr, &sol, "");
  for (const auto& [var, c] : ss.cost_terms) f.add_objective(var, c);
  return {std::move(f), std::move(ss)};
}

inline SecondStageOutcome evaluate_recourse(
    const Instance& inst, const FirstStageSolution& sol,
    const std::vector<double>& d, std::optional<BigM> mm_opt = std::nullopt) {
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  auto [frag, ss] = build_second_stage(inst, fx, sc, sol, d, mm_opt);
  HighsAdapter adapter;
  SolveParams lp_params;
  lp_params.rel_gap = 0.0;
  const auto res = adapter.solve(frag, lp_params);
  if (res.status != SolveStatus::OptimalWithinGap)
    throw BackendError("recourse LP did not solve to optimality: " + res.message);

  SecondStageOutcome out;
  auto grab = [&res](const std::vector<int>& idx) {
    std::vector<double> vals;
    vals.reserve(idx.size());
    for (int j : idx) vals.push_back(res.values[j]);
    return vals;
  };
  out.actual_start = grab(ss.q);
  out.waiting = grab(ss.w);
  out.anes_overtime = grab(ss.oa);
  out.anes_idle = grab(ss.ga);
  out.room_overtime = grab(ss.orr);
  out.room_idle = grab(ss.grr);
  KahanSum cost;
  for (const auto& [var, c] : ss.cost_terms) cost.add(c * res.values[var]);
  out.cost = cost.value();
  return out;
}

// ---------------------------------------------------------------------------
// Recourse dual.
// ---------------------------------------------------------------------------

struct DualBounds {
  std::vector<double> mu_bar;     // per anesthesiologist: c_g + c_o
  std::vector<double> theta_bar;  // per room: c_g + c_o
  double lambda_bar = 0.0;
};

// The lambda bound sums per-surgery waiting costs (dropping the smallest,
// which is never charged twice in the chain argument) plus all idle+overtime
// capacity; `tight=false` keeps the full waiting sum.
inline DualBounds dual_bounds(const Instance& inst, bool tight = true) {
  DualBounds b;
  double sum_w = 0.0, min_w = kInf;
  for (const auto& s : inst.surgeries) {
    sum_w += s.waiting_cost;
    min_w = std::min(min_w, s.waiting_cost);
  }
  if (inst.surgeries.empty()) min_w = 0.0;
  double cap = 0.0;
  for (const auto& a : inst.anesthesiologists) {
    b.mu_bar.push_back(a.idle_cost + a.overtime_cost);
    cap += a.idle_cost + a.overtime_cost;
  }
  for (const auto& r : inst.rooms) {
    b.theta_bar.push_back(r.idle_cost + r.overtime_cost);
    cap += r.idle_cost + r.overtime_cost;
  }
  b.lambda_bar = (tight ? sum_w - min_w : sum_w) + cap;
  return b;
}

struct DualEvaluation {
  double value = 0.0;
  std::map<std::pair<int, int>, double> lambda;  // same-component pairs
  std::map<std::pair<int, int>, double> mu;      // (i, a) in F_A
  std::map<std::pair<int, int>, double> theta;   // (i, r) in F_R
};

// Solves the dual of the recourse LP directly.  When `witness` names a
// precedence pair, a second solve maximizes that lambda over the optimal
// face (used to certify that the lambda bound is attained).
inline DualEvaluation evaluate_recourse_dual(
    const Instance& inst, const FirstStageSolution& sol,
    const std::vector<double>& d, const DualBounds& bounds,
    std::optional<BigM> mm_opt = std::nullopt,
    std::optional<std::pair<int, int>> witness = std::nullopt) {
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  const BigM mm = mm_opt ? *mm_opt : big_m_for_scenario(inst, d);
  const int n = static_cast<int>(inst.num_surgeries());

  ModelFragment f;
  std::map<std::pair<int, int>, int> lam, mu, th;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && sc.surgery_comp[i] == sc.surgery_comp[j])
        lam[{i, j}] = f.add_var("l_" + std::to_string(i) + "_" + std::to_string(j),
                                0.0, bounds.lambda_bar, false);
  for (const auto& [i, a] : fx.F_A)
    mu[{i, a}] = f.add_var("m_" + std::to_string(i) + "_" + std::to_string(a),
                           0.0, bounds.mu_bar[a], false);
  for (const auto& [i, r] : fx.F_R)
    th[{i, r}] = f.add_var("t_" + std::to_string(i) + "_" + std::to_string(r),
                           0.0, bounds.theta_bar[r], false);

  // Capacity rows: per-resource dual mass is bounded by idle + overtime.
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
  // Flow rows: net outgoing lambda plus incident mu/theta covers -c_w.
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

  // Dual objective, negated for the minimizing adapter.
  double constant = 0.0;
  for (const auto& a : inst.anesthesiologists)
    if (a.is_regular) constant += a.idle_cost * (a.shift_end - a.shift_start);
  for (std::size_t r = 0; r < inst.num_rooms(); ++r)
    if (sol.open[r]) constant += inst.rooms[r].idle_cost * inst.rooms[r].horizon_end;

  std::vector<double> obj(f.vars.size(), 0.0);
  for (const auto& [key, var] : lam) {
    const auto [i, j] = key;
    const double u = sol.precedes[i][j] ? 1.0 : 0.0;
    obj[var] += sol.start[i] - sol.start[j] - mm.m_seq * (1.0 - u) + d[i];
  }
  for (const auto& [key, var] : mu) {
    const auto [i, a] = key;
    const double slack = 1.0 - (sol.x(i, a) ? 1.0 : 0.0) + (sol.called[a] ? 1.0 : 0.0);
    obj[var] += sol.start[i] -
                (inst.anesthesiologists[a].shift_end + mm.m_anes * slack) + d[i];
  }
  for (const auto& [key, var] : th) {
    const auto [i, r] = key;
    const double slack = sol.z(i, r) ? 0.0 : 1.0;
    obj[var] +=
        sol.start[i] - (inst.rooms[r].horizon_end + mm.m_room * slack) + d[i];
  }
  for (int i = 0; i < n; ++i) {
    // d-coefficients of the idle rows carried by assignments.
    const int a = sol.anes_of[i];
    if (inst.anesthesiologists[a].is_regular)
      constant -= inst.anesthesiologists[a].idle_cost * d[i];
    constant -= inst.rooms[sol.room_of[i]].idle_cost * d[i];
  }
  for (std::size_t j = 0; j < obj.size(); ++j) f.add_objective(static_cast<int>(j), -obj[j]);
  f.objective_offset = -constant;

  HighsAdapter adapter;
  SolveParams lp_params;
  lp_params.rel_gap = 0.0;
  auto res = adapter.solve(f, lp_params);
  if (res.status != SolveStatus::OptimalWithinGap)
    throw BackendError("recourse dual LP failed: " + res.message);
  const double value = -res.objective;

  if (witness) {
    // Pin the objective to its optimum, then maximize the chosen lambda.
    MilpRow pin{{}, RowSense::Ge, 0.0, "opt_face"};
    for (std::size_t j = 0; j < obj.size(); ++j)
      if (obj[j] != 0.0) pin.terms.emplace_back(static_cast<int>(j), obj[j]);
    pin.rhs = value - constant - 1e-7 * std::max(1.0, std::fabs(value));
    f.add_row(std::move(pin));
    f.objective = {};
    f.objective_offset = 0.0;
    f.add_objective(lam.at(*witness), -1.0);
    res = adapter.solve(f, lp_params);
    if (res.status != SolveStatus::OptimalWithinGap)
      throw BackendError("dual witness LP failed: " + res.message);
  }

  DualEvaluation ev;
  ev.value = value;
  for (const auto& [key, var] : lam) ev.lambda[key] = res.values[var];
  for (const auto& [key, var] : mu) ev.mu[key] = res.values[var];
  for (const auto& [key, var] : th) ev.theta[key] = res.values[var];
  return ev;
}

// ---------------------------------------------------------------------------
// First-stage invariant checking.
// ---------------------------------------------------------------------------

inline ValidationReport check_first_stage(const Instance& inst,
                                          const FirstStageSolution& sol) {
  ValidationReport rep;
  auto flag = [&rep](const std::string& m) { rep.findings.push_back(m); };
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  const int n = static_cast<int>(inst.num_surgeries());
  const double horizon = inst.day_horizon();
  const double eps = 1e-6;

  if (static_cast<int>(sol.anes_of.size()) != n ||
      static_cast<int>(sol.room_of.size()) != n ||
      static_cast<int>(sol.start.size()) != n ||
      static_cast<int>(sol.precedes.size()) != n) {
    flag("solution arrays sized inconsistently with the instance");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    if (!inst.compat_anes[i][sol.anes_of[i]])
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " assigned to incompatible anesthesiologist");
    if (!inst.compat_room[i][sol.room_of[i]])
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " assigned to incompatible room");
    if (!sol.open[sol.room_of[i]])
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " scheduled in a closed room");
    const auto& an = inst.anesthesiologists[sol.anes_of[i]];
    if (!an.is_regular && !sol.called[sol.anes_of[i]])
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " assigned to an on-call anesthesiologist who was not called in");
    if (sol.start[i] < an.shift_start - eps || sol.start[i] > horizon + eps ||
        sol.start[i] < -eps)
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " scheduled start outside the permitted window");
  }
  for (std::size_t a = 0; a < inst.num_anes(); ++a)
    if (sol.called[a] && !inst.anesthesiologists[a].is_on_call)
      flag("anesthesiologist " + std::to_string(inst.anesthesiologists[a].id) +
           " marked called in but not on call");

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool same_comp = sc.surgery_comp[i] == sc.surgery_comp[j];
      if (!same_comp && sol.precedes[i][j])
        flag("precedence set across independent pools (" + std::to_string(i) +
             "," + std::to_string(j) + ")");
      if (i < j && sol.precedes[i][j] && sol.precedes[j][i])
        flag("two-cycle in precedence (" + std::to_string(i) + "," +
             std::to_string(j) + ")");
      if (i < j && same_comp) {
        const bool share = sol.anes_of[i] == sol.anes_of[j] ||
                           sol.room_of[i] == sol.room_of[j];
        if (share && !(sol.precedes[i][j] || sol.precedes[j][i]))
          flag("surgeries " + std::to_string(i) + "," + std::to_string(j) +
               " share a resource but are unsequenced");
      }
    }
  // Transitivity, then acyclicity via Kahn's algorithm.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        if (sc.surgery_comp[i] != sc.surgery_comp[j] ||
            sc.surgery_comp[j] != sc.surgery_comp[k])
          continue;
        if (sol.precedes[i][j] && sol.precedes[j][k] && !sol.precedes[i][k])
          flag("transitivity violated on (" + std::to_string(i) + "," +
               std::to_string(j) + "," + std::to_string(k) + ")");
      }
  {
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && sol.precedes[i][j]) ++indeg[j];
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
      if (indeg[i] == 0) queue.push_back(i);
    int seen = 0;
    while (!queue.empty()) {
      const int i = queue.back();
      queue.pop_back();
      ++seen;
      for (int j = 0; j < n; ++j)
        if (i != j && sol.precedes[i][j] && --indeg[j] == 0) queue.push_back(j);
    }
    if (seen != n) flag("precedence graph contains a cycle");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Idle-nonnegativity valid inequalities (per scenario).
// ---------------------------------------------------------------------------

inline void add_idle_nonneg_vi(ModelFragment& f, const Instance& inst,
                               const FeasibilityIndex& fx,
                               const FirstStageVars& fsv,
                               const SecondStageVars& ssv,
                               const std::vector<double>& d) {
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    const auto& an = inst.anesthesiologists[a];
    if (!an.is_regular) continue;
    MilpRow row{{{ssv.oa[a], 1.0}}, RowSense::Ge,
                -(an.shift_end - an.shift_start), ""};
    for (int i : fx.I_a[a]) row.terms.emplace_back(fsv.x.at({i, static_cast<int>(a)}), -d[i]);
    f.add_row(std::move(row));
  }
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    MilpRow row{{{ssv.orr[r], 1.0}, {fsv.v[r], inst.rooms[r].horizon_end}},
                RowSense::Ge, 0.0, ""};
    for (int i : fx.I_r[r]) row.terms.emplace_back(fsv.z.at({i, static_cast<int>(r)}), -d[i]);
    f.add_row(std::move(row));
  }
}

// ---------------------------------------------------------------------------
// Symmetry breaking.
// ---------------------------------------------------------------------------

struct SbcOptions {
  bool surgery_room_order = true;     // staircase on surgery/room indices
  bool in_room_index_sequencing = true;  // ascending order inside a room
  bool room_load_order = true;        // larger loads in smaller room indices
  bool room_open_order = true;        // open rooms take smaller indices
  bool room_assignment_fixing = true; // surgery j never in room k > j
  bool first_surgery_anchor = true;   // first surgery on first regular
  bool on_call_order = true;
  bool lex_anes_order = false;        // full lexicographic ordering; hurts
                                      // solver performance in practice
  static SbcOptions none() {
    SbcOptions o;
    o.surgery_room_order = o.in_room_index_sequencing = o.room_load_order =
        o.room_open_order = o.room_assignment_fixing = o.first_surgery_anchor =
            o.on_call_order = o.lex_anes_order = false;
    return o;
  }
};

namespace sbc_detail {

struct TypeGroup {
  std::string type;
  std::vector<int> surgeries;  // ascending positions
  std::vector<int> rooms;      // ascending positions
};

inline std::vector<TypeGroup> type_groups(const Instance& inst) {
  std::vector<TypeGroup> groups;
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < inst.num_surgeries(); ++i) {
    const auto& t = inst.surgeries[i].surgery_type;
    auto [it, fresh] = idx.try_emplace(t, static_cast<int>(groups.size()));
    if (fresh) groups.push_back({t, {}, {}});
    groups[it->second].surgeries.push_back(static_cast<int>(i));
  }
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    auto it = idx.find(inst.rooms[r].room_type);
    if (it != idx.end()) groups[it->second].rooms.push_back(static_cast<int>(r));
  }
  return groups;
}

inline void require_contiguous(const std::vector<int>& xs,
                               const std::string& what) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] != xs[k - 1] + 1)
      throw ValidationError(what + " must be indexed contiguously ascending "
                            "for symmetry breaking");
}

inline bool surgeries_uniform(const Instance& inst, const std::vector<int>& is) {
  for (std::size_t k = 1; k < is.size(); ++k) {
    const int i = is[k], j = is[0];
    if (inst.surgeries[i].waiting_cost != inst.surgeries[j].waiting_cost ||
        inst.durations.mean[i] != inst.durations.mean[j] ||
        inst.durations.std[i] != inst.durations.std[j] ||
        inst.durations.lo[i] != inst.durations.lo[j] ||
        inst.durations.hi[i] != inst.durations.hi[j])
      return false;
  }
  return true;
}

inline bool rooms_uniform(const Instance& inst, const std::vector<int>& rs) {
  for (std::size_t k = 1; k < rs.size(); ++k) {
    const auto& a = inst.rooms[rs[k]];
    const auto& b = inst.rooms[rs[0]];
    if (a.fixed_cost != b.fixed_cost || a.overtime_cost != b.overtime_cost ||
        a.idle_cost != b.idle_cost || a.horizon_end != b.horizon_end)
      return false;
  }
  return true;
}

inline bool anes_uniform(const Instance& inst, const std::vector<int>& as) {
  for (std::size_t k = 1; k < as.size(); ++k) {
    const auto& a = inst.anesthesiologists[as[k]];
    const auto& b = inst.anesthesiologists[as[0]];
    if (a.shift_start != b.shift_start || a.shift_end != b.shift_end ||
        a.call_in_cost != b.call_in_cost ||
        a.overtime_cost != b.overtime_cost || a.idle_cost != b.idle_cost)
      return false;
  }
  return true;
}

// Anesthesiologist groups keyed by coverage set, in order of appearance.
struct AnesGroup {
  std::set<std::string> coverage;
  std::vector<int> regulars;
  std::vector<int> on_calls;
};

inline std::vector<AnesGroup> anes_groups(const Instance& inst) {
  std::vector<AnesGroup> groups;
  std::map<std::set<std::string>, int> idx;
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    const auto& an = inst.anesthesiologists[a];
    auto [it, fresh] = idx.try_emplace(an.covered_types, static_cast<int>(groups.size()));
    if (fresh) groups.push_back({an.covered_types, {}, {}});
    auto& g = groups[it->second];
    (an.is_regular ? g.regulars : g.on_calls).push_back(static_cast<int>(a));
  }
  return groups;
}

// Sub-lists per declared subtype, preserving index order.
inline std::vector<std::vector<int>> subtype_lists(const Instance& inst,
                                                   const std::vector<int>& is) {
  std::vector<std::vector<int>> lists;
  std::map<std::string, int> idx;
  for (int i : is) {
    const auto& st = inst.surgeries[i].subtype;
    auto [it, fresh] = idx.try_emplace(st, static_cast<int>(lists.size()));
    if (fresh) lists.emplace_back();
    lists[it->second].push_back(i);
  }
  return lists;
}

}  // namespace sbc_detail

// Adds the enabled symmetry-breaking constraints to a fragment holding the
// first stage.  Each family is guarded by the interchangeability it needs,
// so heterogeneous instances silently skip the families that do not apply.
inline void add_symmetry_breaking(ModelFragment& f, FirstStageVars& vv,
                                  const Instance& inst,
                                  const SbcOptions& opt = {}) {
  using namespace sbc_detail;
  const auto groups = type_groups(inst);

  for (const auto& g : groups) {
    if (g.surgeries.size() < 2 && g.rooms.size() < 2) continue;
    require_contiguous(g.surgeries, "surgeries of type " + g.type);
    require_contiguous(g.rooms, "rooms of type " + g.type);
    const bool room_ok = rooms_uniform(inst, g.rooms);
    bool any_subtype = false;
    for (int i : g.surgeries)
      if (!inst.surgeries[i].subtype.empty()) any_subtype = true;
    const bool surg_ok = !any_subtype && surgeries_uniform(inst, g.surgeries);

    const auto& is = g.surgeries;
    const auto& rs = g.rooms;
    const int J = static_cast<int>(is.size());
    const int K = static_cast<int>(rs.size());

    if (opt.surgery_room_order && surg_ok && room_ok && J >= 2 && K >= 1) {
      for (int j = 1; j < J; ++j)
        for (int k = 0; k < K; ++k) {
          // z[i_j, r_k] <= z[i_{j-1}, r_{k-1}] + z[i_{j-1}, r_k]
          MilpRow up{{{vv.z.at({is[j], rs[k]}), 1.0},
                      {vv.z.at({is[j - 1], rs[k]}), -1.0}},
                     RowSense::Le,
                     0.0,
                     "sbc_stair_prev_" + g.type + "_" + std::to_string(j) +
                         "_" + std::to_string(k)};
          if (k > 0) up.terms.emplace_back(vv.z.at({is[j - 1], rs[k - 1]}), -1.0);
          f.add_row(std::move(up));
          // z[i_{j-1}, r_k] <= z[i_j, r_k] + z[i_j, r_{k+1}]
          MilpRow dn{{{vv.z.at({is[j - 1], rs[k]}), 1.0},
                      {vv.z.at({is[j], rs[k]}), -1.0}},
                     RowSense::Le,
                     0.0,
                     "sbc_stair_next_" + g.type + "_" + std::to_string(j) +
                         "_" + std::to_string(k)};
          if (k + 1 < K) dn.terms.emplace_back(vv.z.at({is[j], rs[k + 1]}), -1.0);
          f.add_row(std::move(dn));
        }
    }
    if (opt.in_room_index_sequencing && surg_ok && room_ok && J >= 2) {
      for (int j = 1; j < J; ++j)
        for (int k = 0; k < K; ++k)
          f.add_row({{{vv.u.at({is[j - 1], is[j]}), 1.0},
                      {vv.z.at({is[j - 1], rs[k]}), -1.0},
                      {vv.z.at({is[j], rs[k]}), -1.0}},
                     RowSense::Ge,
                     -1.0,
                     ""});
    }
    if (opt.surgery_room_order && any_subtype && room_ok) {
      // Sub-type staircase: same shape, summed over admissible room ranges.
      for (const auto& sub : subtype_lists(inst, is)) {
        if (sub.size() < 2 || !surgeries_uniform(inst, sub)) continue;
        for (std::size_t j = 1; j < sub.size(); ++j)
          for (int k = 0; k < K; ++k) {
            MilpRow up{{{vv.z.at({sub[j], rs[k]}), 1.0}}, RowSense::Le, 0.0, ""};
            for (int k2 = 0; k2 <= k; ++k2)
              up.terms.emplace_back(vv.z.at({sub[j - 1], rs[k2]}), -1.0);
            f.add_row(std::move(up));
            MilpRow dn{{{vv.z.at({sub[j - 1], rs[k]}), 1.0}}, RowSense::Le, 0.0, ""};
            for (int k2 = k; k2 < K; ++k2)
              dn.terms.emplace_back(vv.z.at({sub[j], rs[k2]}), -1.0);
            f.add_row(std::move(dn));
            if (opt.in_room_index_sequencing)
              f.add_row({{{vv.u.at({sub[j - 1], sub[j]}), 1.0},
                          {vv.z.at({sub[j - 1], rs[k]}), -1.0},
                          {vv.z.at({sub[j], rs[k]}), -1.0}},
                         RowSense::Ge,
                         -1.0,
                         ""});
          }
      }
    }
    if (opt.room_load_order && room_ok && K >= 2) {
      for (int k = 1; k < K; ++k) {
        MilpRow row{{}, RowSense::Ge, 0.0,
                    "sbc_load_" + g.type + "_" + std::to_string(k)};
        for (int i : is) {
          row.terms.emplace_back(vv.z.at({i, rs[k - 1]}), 1.0);
          row.terms.emplace_back(vv.z.at({i, rs[k]}), -1.0);
        }
        f.add_row(std::move(row));
      }
    }
    if (opt.room_open_order && room_ok && K >= 2) {
      for (int k = 1; k < K; ++k)
        f.add_row({{{vv.v[rs[k - 1]], 1.0}, {vv.v[rs[k]], -1.0}},
                   RowSense::Ge,
                   0.0,
                   ""});
    }
    if (opt.room_assignment_fixing && surg_ok && room_ok) {
      for (int j = 0; j < std::min(J, K); ++j)
        for (int k = j + 1; k < K; ++k) {
          const int var = vv.z.at({is[j], rs[k]});
          f.vars[var].ub = 0.0;
        }
    }
  }

  const auto agroups = anes_groups(inst);
  for (const auto& g : agroups) {
    // First surgery coverable by this group, by index.
    int first_surgery = -1;
    for (std::size_t i = 0; i < inst.num_surgeries() && first_surgery < 0; ++i)
      if (g.coverage.count(inst.surgeries[i].surgery_type)) first_surgery = static_cast<int>(i);
    if (first_surgery < 0) continue;

    if (opt.first_surgery_anchor && !g.regulars.empty() &&
        anes_uniform(inst, g.regulars)) {
      auto it = vv.x.find({first_surgery, g.regulars[0]});
      if (it != vv.x.end()) f.vars[it->second].lb = 1.0;
    }
    if (opt.on_call_order && g.on_calls.size() >= 2 &&
        anes_uniform(inst, g.on_calls)) {
      for (std::size_t k = 1; k < g.on_calls.size(); ++k)
        f.add_row({{{vv.y[g.on_calls[k - 1]], 1.0}, {vv.y[g.on_calls[k]], -1.0}},
                   RowSense::Le,
                   0.0,
                   ""});
    }
    if (opt.lex_anes_order && g.regulars.size() >= 2 &&
        anes_uniform(inst, g.regulars)) {
      // Descending lexicographic order of assignment vectors, per shift.
      std::vector<int> surgeries;
      for (std::size_t i = 0; i < inst.num_surgeries(); ++i)
        if (g.coverage.count(inst.surgeries[i].surgery_type))
          surgeries.push_back(static_cast<int>(i));
      if (surgeries.size() <= 50) {
        for (std::size_t k = 1; k < g.regulars.size(); ++k) {
          MilpRow row{{}, RowSense::Ge, 0.0, ""};
          for (std::size_t j = 0; j < surgeries.size(); ++j) {
            const double w = std::ldexp(1.0, static_cast<int>(surgeries.size() - 1 - j));
            row.terms.emplace_back(vv.x.at({surgeries[j], g.regulars[k - 1]}), w);
            row.terms.emplace_back(vv.x.at({surgeries[j], g.regulars[k]}), -w);
          }
          f.add_row(std::move(row));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Solution extraction and serialization.
// ---------------------------------------------------------------------------

inline FirstStageSolution extract_first_stage(const Instance& inst,
                                              const FirstStageVars& vv,
                                              const std::vector<double>& values) {
  const int n = static_cast<int>(inst.num_surgeries());
  FirstStageSolution sol;
  sol.anes_of.assign(n, -1);
  sol.room_of.assign(n, -1);
  sol.called.assign(inst.num_anes(), 0);
  sol.open.assign(inst.num_rooms(), 0);
  sol.precedes.assign(n, std::vector<char>(n, 0));
  sol.start.assign(n, 0.0);
  auto bin = [&values](int var) { return values[var] > 0.5; };
  for (const auto& [key, var] : vv.x)
    if (bin(var)) sol.anes_of[key.first] = key.second;
  for (const auto& [key, var] : vv.z)
    if (bin(var)) sol.room_of[key.first] = key.second;
  for (std::size_t a = 0; a < inst.num_anes(); ++a)
    sol.called[a] = bin(vv.y[a]) ? 1 : 0;
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) sol.open[r] = bin(vv.v[r]) ? 1 : 0;
  for (const auto& [key, var] : vv.u)
    sol.precedes[key.first][key.second] = bin(var) ? 1 : 0;
  for (int i = 0; i < n; ++i) sol.start[i] = std::max(0.0, values[vv.s[i]]);
  for (int i = 0; i < n; ++i)
    if (sol.anes_of[i] < 0 || sol.room_of[i] < 0)
      throw BackendError("solver returned an incomplete assignment");
  return sol;
}

inline nlohmann::json solution_to_json(const Instance& inst,
                                       const FirstStageSolution& sol) {
  nlohmann::json j;
  for (std::size_t i = 0; i < sol.size(); ++i)
    j["assignments"].push_back(
        {{"surgery", inst.surgeries[i].id},
         {"anesthesiologist", inst.anesthesiologists[sol.anes_of[i]].id},
         {"room", inst.rooms[sol.room_of[i]].id},
         {"scheduled_start", sol.start[i]}});
  j["called_in"] = nlohmann::json::array();
  for (std::size_t a = 0; a < sol.called.size(); ++a)
    if (sol.called[a]) j["called_in"].push_back(inst.anesthesiologists[a].id);
  j["open_rooms"] = nlohmann::json::array();
  for (std::size_t r = 0; r < sol.open.size(); ++r)
    if (sol.open[r]) j["open_rooms"].push_back(inst.rooms[r].id);
  j["precedes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < sol.size(); ++i)
    for (std::size_t k = 0; k < sol.size(); ++k)
      if (sol.precedes[i][k])
        j["precedes"].push_back(
            {inst.surgeries[i].id, inst.surgeries[k].id});
  return j;
}

inline FirstStageSolution solution_from_json(const Instance& inst,
                                             const nlohmann::json& j) {
  const int n = static_cast<int>(inst.num_surgeries());
  std::map<int, int> surgery_pos, anes_pos, room_pos;
  for (int i = 0; i < n; ++i) surgery_pos[inst.surgeries[i].id] = i;
  for (std::size_t a = 0; a < inst.num_anes(); ++a)
    anes_pos[inst.anesthesiologists[a].id] = static_cast<int>(a);
  for (std::size_t r = 0; r < inst.num_rooms(); ++r)
    room_pos[inst.rooms[r].id] = static_cast<int>(r);

  FirstStageSolution sol;
  sol.anes_of.assign(n, -1);
  sol.room_of.assign(n, -1);
  sol.called.assign(inst.num_anes(), 0);
  sol.open.assign(inst.num_rooms(), 0);
  sol.precedes.assign(n, std::vector<char>(n, 0));
  sol.start.assign(n, 0.0);
  for (const auto& e : j.at("assignments")) {
    const int i = surgery_pos.at(e.at("surgery").get<int>());
    sol.anes_of[i] = anes_pos.at(e.at("anesthesiologist").get<int>());
    sol.room_of[i] = room_pos.at(e.at("room").get<int>());
    sol.start[i] = e.at("scheduled_start").get<double>();
  }
  for (const auto& id : j.at("called_in")) sol.called[anes_pos.at(id.get<int>())] = 1;
  for (const auto& id : j.at("open_rooms")) sol.open[room_pos.at(id.get<int>())] = 1;
  for (const auto& e : j.at("precedes"))
    sol.precedes[surgery_pos.at(e[0].get<int>())]
                [surgery_pos.at(e[1].get<int>())] = 1;
  return sol;
}

inline nlohmann::json outcome_to_json(const Instance& inst,
                                      const SecondStageOutcome& out) {
  nlohmann::json j;
  for (std::size_t i = 0; i < out.actual_start.size(); ++i)
    j["surgeries"].push_back({{"surgery", inst.surgeries[i].id},
                              {"actual_start", out.actual_start[i]},
                              {"waiting", out.waiting[i]}});
  for (std::size_t a = 0; a < out.anes_overtime.size(); ++a)
    j["anesthesiologists"].push_back(
        {{"anesthesiologist", inst.anesthesiologists[a].id},
         {"overtime", out.anes_overtime[a]},
         {"idle", out.anes_idle[a]}});
  for (std::size_t r = 0; r < out.room_overtime.size(); ++r)
    j["rooms"].push_back({{"room", inst.rooms[r].id},
                          {"overtime", out.room_overtime[r]},
                          {"idle", out.room_idle[r]}});
  j["cost"] = out.cost;
  return j;
}

// Gantt-ready table: surgery, room, anesthesiologist, scheduled start,
// actual start, end.
inline std::string schedule_table(const Instance& inst,
                                  const FirstStageSolution& sol,
                                  const SecondStageOutcome& out,
                                  const std::vector<double>& d) {
  std::ostringstream os;
  os << "surgery,room,anesthesiologist,scheduled_start,actual_start,end\n";
  for (std::size_t i = 0; i < sol.size(); ++i)
    os << inst.surgeries[i].id << "," << inst.rooms[sol.room_of[i]].id << ","
       << inst.anesthesiologists[sol.anes_of[i]].id << "," << sol.start[i]
       << "," << out.actual_start[i] << "," << out.actual_start[i] + d[i]
       << "\n";
  return os.str();
}

}  // namespace orasp
