#pragma once

// Shared fixtures and independent oracles for the test suites.  Everything
// here deliberately avoids the library's LP-based recourse path so that
// comparisons are meaningful.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "orasp/instance.hpp"
#include "orasp/model_core.hpp"
#include "orasp/scenario.hpp"

namespace orasp::testing {

struct UniformSpec {
  int surgeries = 2;
  int rooms = 1;
  int regulars = 1;
  int on_calls = 0;
  double waiting_cost = 200;
  double room_fixed = 900;
  double room_overtime = 450;
  double room_idle = 0;
  double anes_overtime = 150;
  double anes_idle = 0;
  double call_in = 1000;
  double horizon = 480;
  double shift_start = 0;
  double shift_end = 480;
  double mean = 60, std = 20, lo = 30, hi = 90;
  std::string type = "T";
};

// Single-type instance with interchangeable surgeries, rooms, and staff.
inline Instance uniform_instance(const UniformSpec& sp) {
  Instance inst;
  for (int i = 0; i < sp.surgeries; ++i) {
    inst.surgeries.push_back({i + 1, sp.type, sp.waiting_cost, ""});
    inst.durations.mean.push_back(sp.mean);
    inst.durations.std.push_back(sp.std);
    inst.durations.lo.push_back(sp.lo);
    inst.durations.hi.push_back(sp.hi);
  }
  for (int r = 0; r < sp.rooms; ++r)
    inst.rooms.push_back({r + 1, sp.type, sp.horizon, sp.room_fixed,
                          sp.room_overtime, sp.room_idle});
  int id = 1;
  for (int a = 0; a < sp.regulars; ++a) {
    Anesthesiologist an;
    an.id = id++;
    an.shift_start = sp.shift_start;
    an.shift_end = sp.shift_end;
    an.is_regular = true;
    an.overtime_cost = sp.anes_overtime;
    an.idle_cost = sp.anes_idle;
    an.covered_types = {sp.type};
    inst.anesthesiologists.push_back(an);
  }
  for (int a = 0; a < sp.on_calls; ++a) {
    Anesthesiologist an;
    an.id = id++;
    an.shift_start = sp.shift_start;
    an.shift_end = sp.shift_end;
    an.is_on_call = true;
    an.call_in_cost = sp.call_in;
    an.overtime_cost = sp.anes_overtime;
    an.idle_cost = sp.anes_idle;
    an.covered_types = {sp.type};
    inst.anesthesiologists.push_back(an);
  }
  const int n = sp.surgeries;
  inst.compat_anes.assign(n, std::vector<char>(inst.num_anes(), 1));
  inst.compat_room.assign(n, std::vector<char>(inst.num_rooms(), 1));
  return inst;
}

// Two-pool desk instance: a dedicated specialty plus a shared pool covering
// two types, with one on-call anesthesiologist in the pool.
inline Instance two_pool_instance(int cost_structure = 1) {
  const double room_idle = cost_structure >= 2 ? 300 : 0;
  const double anes_idle = cost_structure == 3 ? 100 : 0;
  Instance inst;
  auto add_surgery = [&](const std::string& type, double mean, double std,
                         double lo, double hi) {
    inst.surgeries.push_back(
        {static_cast<int>(inst.surgeries.size()) + 1, type, 200.0, ""});
    inst.durations.mean.push_back(mean);
    inst.durations.std.push_back(std);
    inst.durations.lo.push_back(lo);
    inst.durations.hi.push_back(hi);
  };
  add_surgery("A", 99, 53, 54, 143);
  add_surgery("A", 99, 53, 54, 143);
  add_surgery("B", 75, 42, 37, 111);
  add_surgery("C", 132, 76, 66, 194);
  inst.rooms.push_back({1, "A", 480, 900, 450, room_idle});
  inst.rooms.push_back({2, "B", 480, 900, 450, room_idle});
  inst.rooms.push_back({3, "C", 480, 900, 450, room_idle});
  Anesthesiologist a1;
  a1.id = 1;
  a1.shift_start = 0;
  a1.shift_end = 480;
  a1.is_regular = true;
  a1.overtime_cost = 150;
  a1.idle_cost = anes_idle;
  a1.covered_types = {"A"};
  Anesthesiologist a2 = a1;
  a2.id = 2;
  a2.covered_types = {"B", "C"};
  Anesthesiologist a3 = a2;
  a3.id = 3;
  a3.is_regular = false;
  a3.is_on_call = true;
  a3.call_in_cost = 1000;
  inst.anesthesiologists = {a1, a2, a3};
  const int n = 4;
  inst.compat_anes.assign(n, std::vector<char>(3, 0));
  inst.compat_room.assign(n, std::vector<char>(3, 0));
  for (int i = 0; i < n; ++i) {
    const auto& t = inst.surgeries[i].surgery_type;
    for (int a = 0; a < 3; ++a)
      inst.compat_anes[i][a] =
          inst.anesthesiologists[a].covered_types.count(t) ? 1 : 0;
    for (int r = 0; r < 3; ++r)
      inst.compat_room[i][r] = inst.rooms[r].room_type == t ? 1 : 0;
  }
  return inst;
}

// Scenario matrix with identical columns for same-type surgeries, which
// makes them exactly interchangeable even at finite sample size.
inline ScenarioSet typed_scenarios(const Instance& inst, std::size_t n,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScenarioSet set;
  set.provenance = "typed test scenarios";
  std::set<std::string> types;
  for (const auto& s : inst.surgeries) types.insert(s.surgery_type);
  for (std::size_t k = 0; k < n; ++k) {
    std::map<std::string, double> by_type;
    for (const auto& t : types) {
      // Pick the duration model of the first surgery of this type.
      for (std::size_t i = 0; i < inst.num_surgeries(); ++i)
        if (inst.surgeries[i].surgery_type == t) {
          std::uniform_real_distribution<double> unif(inst.durations.lo[i],
                                                      inst.durations.hi[i]);
          by_type[t] = unif(rng);
          break;
        }
    }
    std::vector<double> row;
    for (const auto& s : inst.surgeries) row.push_back(by_type[s.surgery_type]);
    set.durations.push_back(std::move(row));
  }
  return set;
}

inline ScenarioSet heterogeneous_scenarios(const Instance& inst, std::size_t n,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScenarioSet set;
  set.provenance = "heterogeneous test scenarios";
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> row;
    for (std::size_t i = 0; i < inst.num_surgeries(); ++i) {
      std::uniform_real_distribution<double> unif(inst.durations.lo[i],
                                                  inst.durations.hi[i]);
      row.push_back(unif(rng));
    }
    set.durations.push_back(std::move(row));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Independent recourse oracle.
//
// Earliest-start recursion: every cost term is nondecreasing in the actual
// start times, so propagating q_i = max(s_i, max over predecessors of
// completion) and reading the overtime/idle/waiting formulas is exact.
// ---------------------------------------------------------------------------

struct RecursionOutcome {
  std::vector<double> q, w, oa, ga, orr, gr;
  double cost = 0.0;
};

inline RecursionOutcome recourse_by_recursion(const Instance& inst,
                                              const FirstStageSolution& sol,
                                              const std::vector<double>& d) {
  const int n = static_cast<int>(inst.num_surgeries());
  RecursionOutcome out;
  out.q = sol.start;
  for (int pass = 0; pass < n; ++pass)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j && sol.precedes[i][j])
          out.q[j] = std::max(out.q[j], out.q[i] + d[i]);
  out.w.resize(n);
  for (int i = 0; i < n; ++i) out.w[i] = out.q[i] - sol.start[i];

  out.oa.assign(inst.num_anes(), 0.0);
  out.ga.assign(inst.num_anes(), 0.0);
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    const auto& an = inst.anesthesiologists[a];
    if (sol.called[a]) continue;  // overtime rows are relaxed when called in
    if (!an.is_regular) continue;
    for (int i = 0; i < n; ++i)
      if (sol.anes_of[i] == static_cast<int>(a))
        out.oa[a] = std::max(out.oa[a], out.q[i] + d[i] - an.shift_end);
  }
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    const auto& an = inst.anesthesiologists[a];
    if (!an.is_regular) continue;
    double load = 0.0;
    for (int i = 0; i < n; ++i)
      if (sol.anes_of[i] == static_cast<int>(a)) load += d[i];
    out.ga[a] =
        std::max(0.0, an.shift_end - an.shift_start - load + out.oa[a]);
  }
  out.orr.assign(inst.num_rooms(), 0.0);
  out.gr.assign(inst.num_rooms(), 0.0);
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    const auto& room = inst.rooms[r];
    double load = 0.0;
    for (int i = 0; i < n; ++i)
      if (sol.room_of[i] == static_cast<int>(r)) {
        out.orr[r] = std::max(out.orr[r], out.q[i] + d[i] - room.horizon_end);
        load += d[i];
      }
    if (sol.open[r])
      out.gr[r] = std::max(0.0, room.horizon_end - load + out.orr[r]);
  }

  KahanSum cost;
  for (int i = 0; i < n; ++i) cost.add(inst.surgeries[i].waiting_cost * out.w[i]);
  for (std::size_t a = 0; a < inst.num_anes(); ++a) {
    cost.add(inst.anesthesiologists[a].overtime_cost * out.oa[a]);
    cost.add(inst.anesthesiologists[a].idle_cost * out.ga[a]);
  }
  for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
    cost.add(inst.rooms[r].overtime_cost * out.orr[r]);
    cost.add(inst.rooms[r].idle_cost * out.gr[r]);
  }
  out.cost = cost.value();
  return out;
}

// Random feasible first stage: random compatible assignments, a random
// topological order for every resource-sharing pool, random starts.
inline FirstStageSolution random_first_stage(const Instance& inst,
                                             std::mt19937_64& rng) {
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  const int n = static_cast<int>(inst.num_surgeries());
  FirstStageSolution sol;
  sol.anes_of.resize(n);
  sol.room_of.resize(n);
  sol.called.assign(inst.num_anes(), 0);
  sol.open.assign(inst.num_rooms(), 0);
  sol.precedes.assign(n, std::vector<char>(n, 0));
  sol.start.resize(n);
  for (int i = 0; i < n; ++i) {
    sol.anes_of[i] = fx.A_i[i][rng() % fx.A_i[i].size()];
    sol.room_of[i] = fx.R_i[i][rng() % fx.R_i[i].size()];
    sol.open[sol.room_of[i]] = 1;
    if (inst.anesthesiologists[sol.anes_of[i]].is_on_call)
      sol.called[sol.anes_of[i]] = 1;
  }
  // Global shuffle induces a consistent order inside every pool.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> position(n);
  for (int k = 0; k < n; ++k) position[order[k]] = k;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && sc.surgery_comp[i] == sc.surgery_comp[j] &&
          position[i] < position[j])
        sol.precedes[i][j] = 1;
  for (int i = 0; i < n; ++i) {
    const double lo = inst.anesthesiologists[sol.anes_of[i]].shift_start;
    std::uniform_real_distribution<double> unif(lo, inst.day_horizon());
    sol.start[i] = unif(rng);
  }
  return sol;
}

// First-stage decisions of the worked dual example: one anesthesiologist
// covering five surgeries in reverse index order, rooms split {5,4,3} and
// {2,1}, with descending scheduled starts.
inline Instance dual_example_instance() {
  Instance inst;
  for (int i = 0; i < 5; ++i) {
    inst.surgeries.push_back({i + 1, "T", 100.0, ""});
    inst.durations.mean.push_back(150 + 10 * i);
    inst.durations.std.push_back(0);
    inst.durations.lo.push_back(150 + 10 * i);
    inst.durations.hi.push_back(150 + 10 * i);
  }
  inst.rooms.push_back({1, "T", 480, 0, 450, 20});
  inst.rooms.push_back({2, "T", 480, 0, 450, 20});
  Anesthesiologist a;
  a.id = 1;
  a.shift_start = 0;
  a.shift_end = 480;
  a.is_regular = true;
  a.overtime_cost = 150;
  a.idle_cost = 30;
  a.covered_types = {"T"};
  inst.anesthesiologists = {a};
  inst.compat_anes.assign(5, std::vector<char>(1, 1));
  inst.compat_room.assign(5, std::vector<char>(2, 1));
  return inst;
}

inline FirstStageSolution dual_example_solution() {
  FirstStageSolution sol;
  sol.anes_of = {0, 0, 0, 0, 0};
  sol.room_of = {1, 1, 0, 0, 0};  // rooms: {3,4,5} in 1, {1,2} in 2 (0-based)
  sol.called = {0};
  sol.open = {1, 1};
  sol.precedes.assign(5, std::vector<char>(5, 0));
  // Anesthesiologist order 5 -> 4 -> 3 -> 2 -> 1 gives the full chain.
  for (int i = 4; i >= 0; --i)
    for (int j = i - 1; j >= 0; --j) sol.precedes[i][j] = 1;
  sol.start = {400, 300, 200, 100, 0};
  return sol;
}

inline std::vector<double> dual_example_durations() {
  return {150, 160, 170, 180, 190};
}

}  // namespace orasp::testing
