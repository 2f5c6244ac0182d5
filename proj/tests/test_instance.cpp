#include "orasp/instance.hpp"

#include <gtest/gtest.h>

#include <cstdio>

namespace orasp {
namespace {

int count_type(const Instance& inst, const std::string& type) {
  int c = 0;
  for (const auto& s : inst.surgeries)
    if (s.surgery_type == type) ++c;
  return c;
}

TEST(Catalog, Instance1Sizes) {
  const Instance inst = build_catalog_instance(1, 1);
  EXPECT_EQ(inst.num_surgeries(), 15u);
  EXPECT_EQ(inst.num_rooms(), 7u);
  EXPECT_EQ(inst.num_anes(), 5u);
  EXPECT_EQ(count_type(inst, "CARD"), 3);
  int card_rooms = 0;
  for (const auto& r : inst.rooms)
    if (r.room_type == "CARD") ++card_rooms;
  EXPECT_EQ(card_rooms, 1);
  int card_regular = 0;
  for (const auto& a : inst.anesthesiologists)
    if (a.is_regular && a.covered_types == std::set<std::string>{"CARD"})
      ++card_regular;
  EXPECT_EQ(card_regular, 1);
}

TEST(Catalog, Instance6Cost3) {
  const Instance inst = build_catalog_instance(6, 3);
  EXPECT_EQ(inst.num_surgeries(), 80u);
  EXPECT_EQ(inst.num_rooms(), 32u);
  EXPECT_EQ(inst.num_anes(), 40u);
  for (const auto& r : inst.rooms) EXPECT_DOUBLE_EQ(r.idle_cost, 300.0);
  for (const auto& a : inst.anesthesiologists)
    EXPECT_DOUBLE_EQ(a.idle_cost, 100.0);
}

TEST(Catalog, PerTypeCountsSumToTotals) {
  const std::size_t totals[6][3] = {{15, 7, 5},  {20, 8, 9},   {25, 8, 10},
                                    {40, 11, 16}, {55, 20, 24}, {80, 32, 40}};
  for (int id = 1; id <= 6; ++id) {
    const Instance inst = build_catalog_instance(id, 1);
    EXPECT_EQ(inst.num_surgeries(), totals[id - 1][0]) << "instance " << id;
    EXPECT_EQ(inst.num_rooms(), totals[id - 1][1]) << "instance " << id;
    EXPECT_EQ(inst.num_anes(), totals[id - 1][2]) << "instance " << id;
    EXPECT_TRUE(validate_instance(inst).ok()) << "instance " << id;
  }
}

TEST(Catalog, CostStructures) {
  const Instance c1 = build_catalog_instance(1, 1);
  EXPECT_DOUBLE_EQ(c1.rooms[0].idle_cost, 0.0);
  EXPECT_DOUBLE_EQ(c1.anesthesiologists[0].idle_cost, 0.0);
  EXPECT_DOUBLE_EQ(c1.rooms[0].overtime_cost, 450.0);
  EXPECT_DOUBLE_EQ(c1.rooms[0].fixed_cost, 900.0);
  EXPECT_DOUBLE_EQ(c1.anesthesiologists[0].overtime_cost, 150.0);
  EXPECT_DOUBLE_EQ(c1.surgeries[0].waiting_cost, 200.0);
  EXPECT_DOUBLE_EQ(c1.rooms[0].horizon_end, 480.0);
  const Instance c2 = build_catalog_instance(1, 2);
  EXPECT_DOUBLE_EQ(c2.rooms[0].idle_cost, 300.0);
  EXPECT_DOUBLE_EQ(c2.anesthesiologists[0].idle_cost, 0.0);
}

TEST(Catalog, RejectsBadArguments) {
  EXPECT_THROW(build_catalog_instance(0, 1), UsageError);
  EXPECT_THROW(build_catalog_instance(7, 1), UsageError);
  EXPECT_THROW(build_catalog_instance(1, 4), UsageError);
}

Instance tiny_instance() {
  Instance inst;
  inst.surgeries = {{1, "T", 200.0, ""}};
  inst.rooms = {{1, "T", 480.0, 900.0, 450.0, 0.0}};
  Anesthesiologist a;
  a.id = 1;
  a.shift_start = 0;
  a.shift_end = 480;
  a.is_regular = true;
  a.overtime_cost = 150;
  a.covered_types = {"T"};
  inst.anesthesiologists = {a};
  inst.compat_anes = {{1}};
  inst.compat_room = {{1}};
  inst.durations = {{60}, {10}, {30}, {90}};
  return inst;
}

TEST(Feasibility, SingletonSets) {
  const Instance inst = tiny_instance();
  const auto fx = derive_feasibility(inst);
  EXPECT_EQ(fx.A_i[0], std::vector<int>{0});
  EXPECT_EQ(fx.R_i[0], std::vector<int>{0});
  EXPECT_EQ(fx.I_a[0], std::vector<int>{0});
  EXPECT_EQ(fx.F_A.size(), 1u);
}

TEST(Feasibility, SharedPoolInCatalog1) {
  const Instance inst = build_catalog_instance(1, 1);
  const auto fx = derive_feasibility(inst);
  std::vector<int> pool_set;
  for (std::size_t i = 0; i < inst.num_surgeries(); ++i) {
    const auto& t = inst.surgeries[i].surgery_type;
    if (t == "MED" || t == "GASTRO") {
      if (pool_set.empty()) pool_set = fx.A_i[i];
      EXPECT_EQ(fx.A_i[i], pool_set);
      EXPECT_EQ(fx.A_i[i].size(), 3u);
    }
  }
}

TEST(Feasibility, EmptyRoomSetRejected) {
  Instance inst = tiny_instance();
  inst.compat_room = {{0}};
  EXPECT_THROW(derive_feasibility(inst), ValidationError);
}

TEST(Feasibility, PureFunction) {
  const Instance inst = build_catalog_instance(2, 1);
  const auto a = derive_feasibility(inst);
  const auto b = derive_feasibility(inst);
  EXPECT_EQ(a.F_A, b.F_A);
  EXPECT_EQ(a.F_R, b.F_R);
}

TEST(Validation, CleanCatalogInstance) {
  EXPECT_TRUE(validate_instance(build_catalog_instance(2, 1)).ok());
}

TEST(Validation, FlagExclusivity) {
  Instance inst = tiny_instance();
  inst.anesthesiologists[0].is_on_call = true;  // both flags now set
  const auto rep = validate_instance(inst);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.to_string().find("is_regular/is_on_call"), std::string::npos);
}

TEST(Validation, MeanOutsideSupport) {
  Instance inst = tiny_instance();
  inst.durations.mean[0] = 100.0;  // above hi = 90
  const auto rep = validate_instance(inst);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.to_string().find("mean outside support"), std::string::npos);
}

TEST(Validation, CompatInconsistentWithTypes) {
  Instance inst = tiny_instance();
  inst.rooms[0].room_type = "OTHER";
  EXPECT_FALSE(validate_instance(inst).ok());
}

TEST(Components, Catalog1HasThreePools) {
  const Instance inst = build_catalog_instance(1, 1);
  const auto fx = derive_feasibility(inst);
  const auto sc = sharing_components(inst, fx);
  EXPECT_EQ(sc.count, 3);
  // MED and GASTRO surgeries share one component.
  std::set<int> med_gastro;
  for (std::size_t i = 0; i < inst.num_surgeries(); ++i) {
    const auto& t = inst.surgeries[i].surgery_type;
    if (t == "MED" || t == "GASTRO") med_gastro.insert(sc.surgery_comp[i]);
  }
  EXPECT_EQ(med_gastro.size(), 1u);
}

TEST(Serialization, RoundTrip) {
  const Instance inst = build_catalog_instance(3, 2);
  const std::string path = "/tmp/orasp_instance_roundtrip.json";
  save_instance(inst, path);
  const Instance back = load_instance(path);
  std::remove(path.c_str());
  EXPECT_EQ(to_json(inst), to_json(back));
  EXPECT_EQ(back.compat_anes, inst.compat_anes);
  EXPECT_EQ(back.compat_room, inst.compat_room);
  EXPECT_TRUE(validate_instance(back).ok());
}

TEST(Serialization, DurationStatsMatchPublishedTable) {
  const Instance inst = build_catalog_instance(1, 1);
  // First surgery is CARD.
  EXPECT_DOUBLE_EQ(inst.durations.mean[0], 99.0);
  EXPECT_DOUBLE_EQ(inst.durations.std[0], 53.0);
  EXPECT_DOUBLE_EQ(inst.durations.lo[0], 54.0);
  EXPECT_DOUBLE_EQ(inst.durations.hi[0], 143.0);
}

}  // namespace
}  // namespace orasp
