#include "orasp/milp_adapter.hpp"

#include <gtest/gtest.h>

#include <cstdio>

namespace orasp {
namespace {

TEST(MilpAdapter, IntegerMinimum) {
  MilpModel m;
  const int x = m.add_var("x", 0, kInf, true);
  m.add_row({{{x, 1.0}}, RowSense::Ge, 3.0, "lb"});
  m.add_objective(x, 1.0);

  HighsAdapter adapter;
  const auto res = adapter.solve(m, {});
  ASSERT_EQ(res.status, SolveStatus::OptimalWithinGap);
  EXPECT_NEAR(res.objective, 3.0, 1e-9);
  EXPECT_NEAR(res.values[x], 3.0, 1e-6);
}

TEST(MilpAdapter, InfeasiblePair) {
  MilpModel m;
  const int x = m.add_var("x", -kInf, kInf, false);
  m.add_row({{{x, 1.0}}, RowSense::Le, 0.0, "le"});
  m.add_row({{{x, 1.0}}, RowSense::Ge, 1.0, "ge"});

  HighsAdapter adapter;
  EXPECT_EQ(adapter.solve(m, {}).status, SolveStatus::Infeasible);
}

// min 2u + 3w s.t. u + w >= 4, u - w <= 2, u,w >= 0.  The optimal vertex is
// the intersection of u + w = 4 with u - w = 2: (3, 1), value 9.
TEST(MilpAdapter, PureLpVertex) {
  MilpModel m;
  const int u = m.add_var("u", 0, kInf, false);
  const int w = m.add_var("w", 0, kInf, false);
  m.add_row({{{u, 1.0}, {w, 1.0}}, RowSense::Ge, 4.0, "cover"});
  m.add_row({{{u, 1.0}, {w, -1.0}}, RowSense::Le, 2.0, "skew"});
  m.add_objective(u, 2.0);
  m.add_objective(w, 3.0);

  HighsAdapter adapter;
  const auto res = adapter.solve(m, {});
  ASSERT_EQ(res.status, SolveStatus::OptimalWithinGap);
  EXPECT_NEAR(res.objective, 9.0, 1e-9);
  EXPECT_NEAR(res.values[u], 3.0, 1e-7);
  EXPECT_NEAR(res.values[w], 1.0, 1e-7);
}

TEST(MilpAdapter, UnboundedDetected) {
  MilpModel m;
  const int x = m.add_var("x", -kInf, kInf, false);
  m.add_objective(x, 1.0);
  HighsAdapter adapter;
  EXPECT_EQ(adapter.solve(m, {}).status, SolveStatus::Unbounded);
}

TEST(MilpAdapter, GapReportedWithinTolerance) {
  // Small knapsack; with the default 2% tolerance the incumbent must still
  // satisfy objective >= best_bound - gap * |objective|.
  MilpModel m;
  std::vector<int> xs;
  const double values[] = {10, 13, 7, 4, 9, 12};
  const double weights[] = {3, 4, 2, 1, 3, 4};
  MilpRow cap{{}, RowSense::Le, 8.0, "cap"};
  for (int j = 0; j < 6; ++j) {
    xs.push_back(m.add_binary("x" + std::to_string(j)));
    m.add_objective(xs.back(), -values[j]);  // maximize value
    cap.terms.emplace_back(xs[j], weights[j]);
  }
  m.add_row(cap);

  HighsAdapter adapter;
  const auto res = adapter.solve(m, {});
  ASSERT_EQ(res.status, SolveStatus::OptimalWithinGap);
  EXPECT_GE(res.objective,
            res.best_bound - 0.02 * std::fabs(res.objective) - 1e-9);
}

TEST(MilpAdapter, UnknownBackendRejected) {
  setenv("ORASP_BACKEND", "cplex", 1);
  MilpModel m;
  m.add_var("x", 0, 1, false);
  HighsAdapter adapter;
  EXPECT_THROW(adapter.solve(m, {}), BackendError);
  unsetenv("ORASP_BACKEND");
}

TEST(MilpAdapter, ModelDump) {
  MilpModel m;
  const int x = m.add_var("x", 0, kInf, true);
  m.add_row({{{x, 1.0}}, RowSense::Ge, 3.0, "lb"});
  m.add_objective(x, 1.0);
  HighsAdapter adapter;
  const std::string path = "/tmp/orasp_dump_test.lp";
  adapter.write_model(m, path);
  FILE* f = std::fopen(path.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::fclose(f);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace orasp
