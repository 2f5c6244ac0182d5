#pragma once

// ORASP data model: surgeries, operating rooms, anesthesiologists, the
// per-surgery duration statistics, derived feasibility index sets, and the
// six-instance benchmark catalog.

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orasp/common.hpp"

namespace orasp {

struct Surgery {
  int id = 0;
  std::string surgery_type;
  double waiting_cost = 0.0;  // per minute of realized delay past s_i
  std::string subtype;        // optional; enables sub-type symmetry breaking
};

struct OperatingRoom {
  int id = 0;
  std::string room_type;
  double horizon_end = 0.0;  // service hours are [0, horizon_end]
  double fixed_cost = 0.0;
  double overtime_cost = 0.0;
  double idle_cost = 0.0;
};

struct Anesthesiologist {
  int id = 0;
  double shift_start = 0.0;
  double shift_end = 0.0;
  bool is_regular = false;
  bool is_on_call = false;
  double call_in_cost = 0.0;
  double overtime_cost = 0.0;
  double idle_cost = 0.0;
  std::set<std::string> covered_types;
};

// Per-surgery duration statistics with hard support bounds.  The mean must
// lie inside [lo, hi]; samplers and the ambiguity set both rely on that.
struct DurationModel {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const { return mean.size(); }
};

struct Instance {
  std::vector<Surgery> surgeries;
  std::vector<OperatingRoom> rooms;
  std::vector<Anesthesiologist> anesthesiologists;
  // compat_anes[i][a] == 1 iff anesthesiologist a can cover surgery i;
  // compat_room[i][r] == 1 iff surgery i can run in room r.
  std::vector<std::vector<char>> compat_anes;
  std::vector<std::vector<char>> compat_room;
  DurationModel durations;

  std::size_t num_surgeries() const { return surgeries.size(); }
  std::size_t num_rooms() const { return rooms.size(); }
  std::size_t num_anes() const { return anesthesiologists.size(); }

  double day_horizon() const {
    double h = 0.0;
    for (const auto& r : rooms) h = std::max(h, r.horizon_end);
    return h;
  }
};

// Index sets derived from the compatibility matrices.  (i,a) in F_A iff
// a in A_i iff i in I_a, and likewise for rooms.
struct FeasibilityIndex {
  std::vector<std::vector<int>> A_i;  // per surgery: feasible anesthesiologists
  std::vector<std::vector<int>> R_i;  // per surgery: feasible rooms
  std::vector<std::vector<int>> I_a;  // per anesthesiologist: coverable surgeries
  std::vector<std::vector<int>> I_r;  // per room: hostable surgeries
  std::vector<std::pair<int, int>> F_A;
  std::vector<std::pair<int, int>> F_R;
};

struct ValidationReport {
  std::vector<std::string> findings;
  bool ok() const { return findings.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& f : findings) {
      out += f;
      out += '\n';
    }
    return out;
  }
};

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto flag = [&rep](const std::string& msg) { rep.findings.push_back(msg); };

  const std::size_t n = inst.num_surgeries();
  {
    std::set<int> seen;
    for (const auto& s : inst.surgeries) {
      if (!seen.insert(s.id).second)
        flag("duplicate surgery id " + std::to_string(s.id));
      if (s.waiting_cost < 0)
        flag("surgery " + std::to_string(s.id) + ": negative waiting_cost");
      if (s.surgery_type.empty())
        flag("surgery " + std::to_string(s.id) + ": empty surgery_type");
    }
  }
  {
    std::set<int> seen;
    for (const auto& r : inst.rooms) {
      if (!seen.insert(r.id).second)
        flag("duplicate room id " + std::to_string(r.id));
      if (r.horizon_end <= 0)
        flag("room " + std::to_string(r.id) + ": horizon_end must be > 0");
      if (r.fixed_cost < 0 || r.overtime_cost < 0 || r.idle_cost < 0)
        flag("room " + std::to_string(r.id) + ": negative cost");
    }
  }
  const double horizon = inst.day_horizon();
  {
    std::set<int> seen;
    for (const auto& a : inst.anesthesiologists) {
      if (!seen.insert(a.id).second)
        flag("duplicate anesthesiologist id " + std::to_string(a.id));
      if (a.is_regular == a.is_on_call)
        flag("anesthesiologist " + std::to_string(a.id) +
             ": exactly one of is_regular/is_on_call must be set");
      if (!(a.shift_start >= 0 && a.shift_start < a.shift_end &&
            a.shift_end <= horizon))
        flag("anesthesiologist " + std::to_string(a.id) +
             ": shift must satisfy 0 <= start < end <= day horizon");
      if (a.call_in_cost < 0 || a.overtime_cost < 0 || a.idle_cost < 0)
        flag("anesthesiologist " + std::to_string(a.id) + ": negative cost");
    }
  }
  if (inst.durations.mean.size() != n || inst.durations.std.size() != n ||
      inst.durations.lo.size() != n || inst.durations.hi.size() != n) {
    flag("duration model arrays must have one entry per surgery");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = inst.durations;
      if (!(d.lo[i] > 0))
        flag("surgery " + std::to_string(inst.surgeries[i].id) +
             ": duration lower bound must be positive");
      if (!(d.lo[i] <= d.mean[i] && d.mean[i] <= d.hi[i]))
        flag("surgery " + std::to_string(inst.surgeries[i].id) +
             ": duration mean outside support [lo, hi]");
      if (d.std[i] < 0)
        flag("surgery " + std::to_string(inst.surgeries[i].id) +
             ": negative duration std");
    }
  }

  if (inst.compat_anes.size() != n || inst.compat_room.size() != n) {
    flag("compatibility matrices must have one row per surgery");
    return rep;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.compat_anes[i].size() != inst.num_anes() ||
        inst.compat_room[i].size() != inst.num_rooms()) {
      flag("compatibility row " + std::to_string(i) + " has wrong width");
      return rep;
    }
  }

  // Matrices must agree with the type labels: a room hosts exactly its own
  // type, an anesthesiologist covers exactly the listed types.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& type = inst.surgeries[i].surgery_type;
    bool any_room = false, any_anes = false;
    for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
      const bool expect = inst.rooms[r].room_type == type;
      if (static_cast<bool>(inst.compat_room[i][r]) != expect)
        flag("compat_room[" + std::to_string(inst.surgeries[i].id) + "][" +
             std::to_string(inst.rooms[r].id) + "] inconsistent with types");
      any_room = any_room || inst.compat_room[i][r];
    }
    for (std::size_t a = 0; a < inst.num_anes(); ++a) {
      const bool expect =
          inst.anesthesiologists[a].covered_types.count(type) > 0;
      if (static_cast<bool>(inst.compat_anes[i][a]) != expect)
        flag("compat_anes[" + std::to_string(inst.surgeries[i].id) + "][" +
             std::to_string(inst.anesthesiologists[a].id) +
             "] inconsistent with covered_types");
      any_anes = any_anes || inst.compat_anes[i][a];
    }
    if (!any_room)
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " has no compatible room");
    if (!any_anes)
      flag("surgery " + std::to_string(inst.surgeries[i].id) +
           " has no compatible anesthesiologist");
  }
  return rep;
}

// Pure function of the compatibility matrices.  Throws ValidationError when
// some surgery has an empty feasible set (the assignment constraints would
// be structurally infeasible).
inline FeasibilityIndex derive_feasibility(const Instance& inst) {
  FeasibilityIndex fx;
  const std::size_t n = inst.num_surgeries();
  fx.A_i.resize(n);
  fx.R_i.resize(n);
  fx.I_a.resize(inst.num_anes());
  fx.I_r.resize(inst.num_rooms());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < inst.num_anes(); ++a) {
      if (inst.compat_anes[i][a]) {
        fx.A_i[i].push_back(static_cast<int>(a));
        fx.I_a[a].push_back(static_cast<int>(i));
        fx.F_A.emplace_back(static_cast<int>(i), static_cast<int>(a));
      }
    }
    for (std::size_t r = 0; r < inst.num_rooms(); ++r) {
      if (inst.compat_room[i][r]) {
        fx.R_i[i].push_back(static_cast<int>(r));
        fx.I_r[r].push_back(static_cast<int>(i));
        fx.F_R.emplace_back(static_cast<int>(i), static_cast<int>(r));
      }
    }
    if (fx.A_i[i].empty())
      throw ValidationError("surgery " + std::to_string(inst.surgeries[i].id) +
                            " has no feasible anesthesiologist");
    if (fx.R_i[i].empty())
      throw ValidationError("surgery " + std::to_string(inst.surgeries[i].id) +
                            " has no feasible room");
  }
  return fx;
}

// Partition of surgeries into resource-sharing components: two surgeries are
// linked when they can share an anesthesiologist or a room.  Precedence
// between different components never matters, and each component can be
// solved as an independent sub-problem.
struct SharingComponents {
  int count = 0;
  std::vector<int> surgery_comp;  // per surgery
  std::vector<int> room_comp;     // per room, -1 when no compatible surgery
  std::vector<int> anes_comp;     // per anesthesiologist, -1 when unused
};

inline SharingComponents sharing_components(const Instance& inst,
                                            const FeasibilityIndex& fx) {
  const int n = static_cast<int>(inst.num_surgeries());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  for (const auto& list : fx.I_a)
    for (std::size_t k = 1; k < list.size(); ++k) unite(list[0], list[k]);
  for (const auto& list : fx.I_r)
    for (std::size_t k = 1; k < list.size(); ++k) unite(list[0], list[k]);

  SharingComponents sc;
  sc.surgery_comp.assign(n, -1);
  std::map<int, int> label;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    auto [it, fresh] = label.try_emplace(root, sc.count);
    if (fresh) ++sc.count;
    sc.surgery_comp[i] = it->second;
  }
  sc.room_comp.assign(inst.num_rooms(), -1);
  for (std::size_t r = 0; r < inst.num_rooms(); ++r)
    if (!fx.I_r[r].empty()) sc.room_comp[r] = sc.surgery_comp[fx.I_r[r][0]];
  sc.anes_comp.assign(inst.num_anes(), -1);
  for (std::size_t a = 0; a < inst.num_anes(); ++a)
    if (!fx.I_a[a].empty()) sc.anes_comp[a] = sc.surgery_comp[fx.I_a[a][0]];
  return sc;
}

// ---------------------------------------------------------------------------
// Benchmark catalog.
//
// Six instances assembled from published per-specialty duration statistics.
// CARD/ORTH/GYN have dedicated anesthesiologist groups; MED, GASTRO and URO
// share one pool.  All rooms run a single specialty.
// ---------------------------------------------------------------------------

namespace catalog_detail {

struct TypeStats {
  const char* name;
  double mean, std, lo, hi;
};

inline const std::vector<TypeStats>& type_stats() {
  static const std::vector<TypeStats> stats = {
      {"CARD", 99, 53, 54, 143},  {"ORTH", 142, 58, 87, 188},
      {"GYN", 78, 52, 31, 121},   {"MED", 75, 42, 37, 111},
      {"GASTRO", 132, 76, 66, 194}, {"URO", 72, 38, 44, 94},
  };
  return stats;
}

inline const TypeStats& stats_for(const std::string& type) {
  for (const auto& t : type_stats())
    if (type == t.name) return t;
  throw UsageError("unknown surgery type: " + type);
}

struct TypeRow {
  const char* type;
  int surgeries;
  int rooms;
  int regular;  // dedicated regulars; pooled types carry the pool on the
                // first pooled row and zero on the rest
  int on_call;
  bool pooled;  // belongs to the shared MED/GASTRO/URO pool
};

inline std::vector<TypeRow> catalog_rows(int id) {
  switch (id) {
    case 1:
      return {{"CARD", 3, 1, 1, 0, false},
              {"ORTH", 4, 2, 1, 0, false},
              {"MED", 5, 2, 2, 1, true},
              {"GASTRO", 3, 2, 0, 0, true}};
    case 2:
      return {{"CARD", 5, 2, 2, 1, false},
              {"ORTH", 6, 2, 2, 1, false},
              {"MED", 7, 2, 2, 1, true},
              {"GASTRO", 2, 2, 0, 0, true}};
    case 3:
      return {{"CARD", 7, 2, 2, 1, false},
              {"ORTH", 4, 1, 2, 1, false},
              {"GYN", 2, 1, 1, 0, false},
              {"MED", 4, 1, 2, 1, true},
              {"GASTRO", 3, 1, 0, 0, true},
              {"URO", 5, 2, 0, 0, true}};
    case 4:
      return {{"CARD", 6, 2, 2, 1, false},
              {"ORTH", 7, 2, 2, 1, false},
              {"GYN", 11, 2, 2, 1, false},
              {"MED", 3, 1, 6, 1, true},
              {"GASTRO", 7, 2, 0, 0, true},
              {"URO", 6, 2, 0, 0, true}};
    case 5:
      return {{"CARD", 8, 3, 4, 0, false},
              {"ORTH", 10, 4, 4, 0, false},
              {"GYN", 15, 5, 6, 0, false},
              {"MED", 4, 1, 10, 0, true},
              {"GASTRO", 10, 4, 0, 0, true},
              {"URO", 8, 3, 0, 0, true}};
    case 6:
      return {{"CARD", 12, 5, 6, 0, false},
              {"ORTH", 14, 6, 7, 0, false},
              {"GYN", 22, 8, 11, 0, false},
              {"MED", 4, 1, 16, 0, true},
              {"GASTRO", 14, 6, 0, 0, true},
              {"URO", 14, 6, 0, 0, true}};
    default:
      throw UsageError("catalog instance id must be in 1..6, got " +
                       std::to_string(id));
  }
}

}  // namespace catalog_detail

// Idle costs per cost structure; the remaining coefficients are shared:
// room overtime 450, anesthesiologist overtime 150, room fixed 900, call-in
// 1000, waiting 200, horizon 480 minutes.
inline Instance build_catalog_instance(int id, int cost_structure) {
  using namespace catalog_detail;
  if (cost_structure < 1 || cost_structure > 3)
    throw UsageError("cost structure must be in 1..3, got " +
                     std::to_string(cost_structure));
  const auto rows = catalog_rows(id);

  const double room_idle = (cost_structure >= 2) ? 300.0 : 0.0;
  const double anes_idle = (cost_structure == 3) ? 100.0 : 0.0;
  const double horizon = 480.0;

  Instance inst;
  int next_surgery = 1, next_room = 1, next_anes = 1;
  std::set<std::string> pooled_types;
  for (const auto& row : rows)
    if (row.pooled) pooled_types.insert(row.type);

  for (const auto& row : rows) {
    const auto& st = stats_for(row.type);
    for (int k = 0; k < row.surgeries; ++k) {
      inst.surgeries.push_back({next_surgery++, row.type, 200.0, ""});
      inst.durations.mean.push_back(st.mean);
      inst.durations.std.push_back(st.std);
      inst.durations.lo.push_back(st.lo);
      inst.durations.hi.push_back(st.hi);
    }
    for (int k = 0; k < row.rooms; ++k)
      inst.rooms.push_back(
          {next_room++, row.type, horizon, 900.0, 450.0, room_idle});

    const std::set<std::string> covered =
        row.pooled ? pooled_types : std::set<std::string>{row.type};
    for (int k = 0; k < row.regular; ++k) {
      Anesthesiologist a;
      a.id = next_anes++;
      a.shift_start = 0.0;
      a.shift_end = horizon;
      a.is_regular = true;
      a.overtime_cost = 150.0;
      a.idle_cost = anes_idle;
      a.covered_types = covered;
      inst.anesthesiologists.push_back(std::move(a));
    }
    for (int k = 0; k < row.on_call; ++k) {
      Anesthesiologist a;
      a.id = next_anes++;
      a.shift_start = 0.0;
      a.shift_end = horizon;
      a.is_on_call = true;
      a.call_in_cost = 1000.0;
      a.overtime_cost = 150.0;
      a.idle_cost = anes_idle;
      a.covered_types = covered;
      inst.anesthesiologists.push_back(std::move(a));
    }
  }

  const std::size_t n = inst.num_surgeries();
  inst.compat_anes.assign(n, std::vector<char>(inst.num_anes(), 0));
  inst.compat_room.assign(n, std::vector<char>(inst.num_rooms(), 0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& type = inst.surgeries[i].surgery_type;
    for (std::size_t a = 0; a < inst.num_anes(); ++a)
      inst.compat_anes[i][a] =
          inst.anesthesiologists[a].covered_types.count(type) ? 1 : 0;
    for (std::size_t r = 0; r < inst.num_rooms(); ++r)
      inst.compat_room[i][r] = (inst.rooms[r].room_type == type) ? 1 : 0;
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Instance file format (JSON).  Field names mirror the struct members; the
// compatibility matrices are optional and derived from type labels when
// absent.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  for (const auto& s : inst.surgeries) {
    nlohmann::json js{{"id", s.id},
                      {"surgery_type", s.surgery_type},
                      {"waiting_cost", s.waiting_cost}};
    if (!s.subtype.empty()) js["subtype"] = s.subtype;
    j["surgeries"].push_back(std::move(js));
  }
  for (const auto& r : inst.rooms)
    j["rooms"].push_back({{"id", r.id},
                          {"room_type", r.room_type},
                          {"horizon_end", r.horizon_end},
                          {"fixed_cost", r.fixed_cost},
                          {"overtime_cost", r.overtime_cost},
                          {"idle_cost", r.idle_cost}});
  for (const auto& a : inst.anesthesiologists)
    j["anesthesiologists"].push_back(
        {{"id", a.id},
         {"shift_start", a.shift_start},
         {"shift_end", a.shift_end},
         {"is_regular", a.is_regular},
         {"is_on_call", a.is_on_call},
         {"call_in_cost", a.call_in_cost},
         {"overtime_cost", a.overtime_cost},
         {"idle_cost", a.idle_cost},
         {"covered_types", a.covered_types}});
  j["durations"] = {{"mean", inst.durations.mean},
                    {"std", inst.durations.std},
                    {"lo", inst.durations.lo},
                    {"hi", inst.durations.hi}};
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  for (const auto& js : j.at("surgeries")) {
    Surgery s;
    s.id = js.at("id").get<int>();
    s.surgery_type = js.at("surgery_type").get<std::string>();
    s.waiting_cost = js.at("waiting_cost").get<double>();
    if (js.contains("subtype")) s.subtype = js.at("subtype").get<std::string>();
    inst.surgeries.push_back(std::move(s));
  }
  for (const auto& jr : j.at("rooms")) {
    OperatingRoom r;
    r.id = jr.at("id").get<int>();
    r.room_type = jr.at("room_type").get<std::string>();
    r.horizon_end = jr.at("horizon_end").get<double>();
    r.fixed_cost = jr.at("fixed_cost").get<double>();
    r.overtime_cost = jr.at("overtime_cost").get<double>();
    r.idle_cost = jr.at("idle_cost").get<double>();
    inst.rooms.push_back(std::move(r));
  }
  for (const auto& ja : j.at("anesthesiologists")) {
    Anesthesiologist a;
    a.id = ja.at("id").get<int>();
    a.shift_start = ja.at("shift_start").get<double>();
    a.shift_end = ja.at("shift_end").get<double>();
    a.is_regular = ja.at("is_regular").get<bool>();
    a.is_on_call = ja.at("is_on_call").get<bool>();
    a.call_in_cost = ja.at("call_in_cost").get<double>();
    a.overtime_cost = ja.at("overtime_cost").get<double>();
    a.idle_cost = ja.at("idle_cost").get<double>();
    for (const auto& t : ja.at("covered_types"))
      a.covered_types.insert(t.get<std::string>());
    inst.anesthesiologists.push_back(std::move(a));
  }
  const auto& jd = j.at("durations");
  inst.durations.mean = jd.at("mean").get<std::vector<double>>();
  inst.durations.std = jd.at("std").get<std::vector<double>>();
  inst.durations.lo = jd.at("lo").get<std::vector<double>>();
  inst.durations.hi = jd.at("hi").get<std::vector<double>>();

  const std::size_t n = inst.num_surgeries();
  if (j.contains("compat_anes")) {
    for (const auto& row : j.at("compat_anes")) {
      std::vector<char> r;
      for (const auto& v : row) r.push_back(v.get<int>() ? 1 : 0);
      inst.compat_anes.push_back(std::move(r));
    }
    for (const auto& row : j.at("compat_room")) {
      std::vector<char> r;
      for (const auto& v : row) r.push_back(v.get<int>() ? 1 : 0);
      inst.compat_room.push_back(std::move(r));
    }
  } else {
    inst.compat_anes.assign(n, std::vector<char>(inst.num_anes(), 0));
    inst.compat_room.assign(n, std::vector<char>(inst.num_rooms(), 0));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& type = inst.surgeries[i].surgery_type;
      for (std::size_t a = 0; a < inst.num_anes(); ++a)
        inst.compat_anes[i][a] =
            inst.anesthesiologists[a].covered_types.count(type) ? 1 : 0;
      for (std::size_t r = 0; r < inst.num_rooms(); ++r)
        inst.compat_room[i][r] = (inst.rooms[r].room_type == type) ? 1 : 0;
    }
  }
  return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << to_json(inst).dump(2) << "\n";
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open instance file " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

}  // namespace orasp
