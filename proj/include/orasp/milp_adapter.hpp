#pragma once

// Thin interface to the mixed-integer solver.  Every solver in this project
// talks to the backend exclusively through MilpModel/solve(); nothing above
// this layer sees backend structures.

#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Highs.h>

#include "orasp/common.hpp"

namespace orasp {

enum class RowSense { Le, Ge, Eq };

struct MilpVar {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  bool integer = false;
};

struct MilpRow {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  RowSense sense = RowSense::Le;
  double rhs = 0.0;
  std::string name;
};

// Minimization-only model; builders that want to maximize negate the
// objective and the reported value.
struct MilpModel {
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  std::vector<std::pair<int, double>> objective;  // (variable index, coeff)
  double objective_offset = 0.0;

  int add_var(std::string name, double lb, double ub, bool integer) {
    vars.push_back({std::move(name), lb, ub, integer});
    return static_cast<int>(vars.size()) - 1;
  }
  int add_binary(std::string name) { return add_var(std::move(name), 0, 1, true); }
  void add_row(MilpRow row) { rows.push_back(std::move(row)); }
  void add_objective(int var, double coeff) {
    if (coeff != 0.0) objective.emplace_back(var, coeff);
  }
};

struct SolveParams {
  double rel_gap = 0.02;
  std::optional<double> time_limit;  // seconds
  std::optional<int> threads;
  std::optional<int> seed;
};

enum class SolveStatus {
  OptimalWithinGap,
  FeasibleTimeLimit,
  Infeasible,
  Unbounded,
  Error,
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  double best_bound = -kInf;
  std::vector<double> values;
  std::string message;

  bool has_solution() const {
    return status == SolveStatus::OptimalWithinGap ||
           status == SolveStatus::FeasibleTimeLimit;
  }
};

namespace adapter_detail {

constexpr double kFeasTol = 1e-6;

// Independent feasibility check on the returned point; loose backend
// tolerances surface here instead of deep inside a solver loop.
inline std::optional<std::string> check_solution(const MilpModel& model,
                                                 const std::vector<double>& x) {
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const auto& v = model.vars[j];
    const double scale = std::max({1.0, std::fabs(v.lb), std::fabs(v.ub)});
    if (x[j] < v.lb - kFeasTol * scale || x[j] > v.ub + kFeasTol * scale)
      return "variable " + v.name + " out of bounds";
    if (v.integer && std::fabs(x[j] - std::round(x[j])) > kFeasTol)
      return "variable " + v.name + " not integral";
  }
  for (const auto& row : model.rows) {
    double activity = 0.0, norm = std::fabs(row.rhs);
    for (const auto& [j, c] : row.terms) {
      activity += c * x[j];
      norm = std::max(norm, std::fabs(c * x[j]));
    }
    const double tol = kFeasTol * std::max(1.0, norm);
    const double diff = activity - row.rhs;
    const bool bad = (row.sense == RowSense::Le && diff > tol) ||
                     (row.sense == RowSense::Ge && diff < -tol) ||
                     (row.sense == RowSense::Eq && std::fabs(diff) > tol);
    if (bad) return "row " + row.name + " violated by " + std::to_string(diff);
  }
  return std::nullopt;
}

}  // namespace adapter_detail

class HighsAdapter {
 public:
  // Backend selection hook; "highs" is the only backend compiled in.
  static void require_backend() {
    const char* env = std::getenv("ORASP_BACKEND");
    if (env && std::string(env) != "highs")
      throw BackendError(std::string("backend '") + env +
                         "' is not available in this build");
  }

  SolveResult solve(const MilpModel& model, const SolveParams& params) {
    require_backend();
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("mip_rel_gap", params.rel_gap);
    if (params.time_limit) highs.setOptionValue("time_limit", *params.time_limit);
    if (params.threads) highs.setOptionValue("threads", *params.threads);
    if (params.seed) highs.setOptionValue("random_seed", *params.seed);

    highs.passModel(to_highs(model));
    const HighsStatus run_status = highs.run();

    SolveResult res;
    if (run_status == HighsStatus::kError) {
      res.message = "backend error: " +
                    highs.modelStatusToString(highs.getModelStatus());
      return res;
    }
    const HighsModelStatus ms = highs.getModelStatus();
    const bool have_point =
        highs.getSolution().value_valid &&
        static_cast<int>(highs.getSolution().col_value.size()) ==
            static_cast<int>(model.vars.size());

    switch (ms) {
      case HighsModelStatus::kOptimal:
        res.status = SolveStatus::OptimalWithinGap;
        break;
      case HighsModelStatus::kInfeasible:
        res.status = SolveStatus::Infeasible;
        return res;
      case HighsModelStatus::kUnbounded:
      case HighsModelStatus::kUnboundedOrInfeasible:
        res.status = SolveStatus::Unbounded;
        return res;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
        if (have_point) {
          res.status = SolveStatus::FeasibleTimeLimit;
          break;
        }
        res.message = "stopped without a feasible point";
        return res;
      default:
        res.message = "backend status: " + highs.modelStatusToString(ms);
        return res;
    }

    if (!have_point) {
      res.status = SolveStatus::Error;
      res.message = "backend reported optimality without a solution vector";
      return res;
    }
    res.values = highs.getSolution().col_value;
    res.objective = highs.getObjectiveValue() + model.objective_offset;
    const bool is_mip = highs.getModel().isMip();
    res.best_bound = is_mip
                         ? highs.getInfo().mip_dual_bound + model.objective_offset
                         : res.objective;

    if (auto bad = adapter_detail::check_solution(model, res.values)) {
      res.status = SolveStatus::Error;
      res.message = "solution failed independent feasibility check: " + *bad;
    }
    return res;
  }

  // Debug dump in LP interchange format.
  void write_model(const MilpModel& model, const std::string& path) {
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.passModel(to_highs(model));
    highs.writeModel(path);
  }

 private:
  static HighsModel to_highs(const MilpModel& model) {
    HighsModel hm;
    HighsLp& lp = hm.lp_;
    lp.num_col_ = static_cast<HighsInt>(model.vars.size());
    lp.num_row_ = static_cast<HighsInt>(model.rows.size());
    lp.sense_ = ObjSense::kMinimize;
    lp.col_cost_.assign(lp.num_col_, 0.0);
    for (const auto& [j, c] : model.objective) lp.col_cost_[j] += c;
    lp.col_lower_.reserve(lp.num_col_);
    lp.col_upper_.reserve(lp.num_col_);
    bool any_int = false;
    for (const auto& v : model.vars) {
      lp.col_lower_.push_back(v.lb);
      lp.col_upper_.push_back(v.ub);
      any_int = any_int || v.integer;
    }
    if (any_int) {
      lp.integrality_.reserve(lp.num_col_);
      for (const auto& v : model.vars)
        lp.integrality_.push_back(v.integer ? HighsVarType::kInteger
                                            : HighsVarType::kContinuous);
    }
    lp.row_lower_.reserve(lp.num_row_);
    lp.row_upper_.reserve(lp.num_row_);
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.start_.clear();
    lp.a_matrix_.start_.push_back(0);
    for (const auto& row : model.rows) {
      switch (row.sense) {
        case RowSense::Le:
          lp.row_lower_.push_back(-kHighsInf);
          lp.row_upper_.push_back(row.rhs);
          break;
        case RowSense::Ge:
          lp.row_lower_.push_back(row.rhs);
          lp.row_upper_.push_back(kHighsInf);
          break;
        case RowSense::Eq:
          lp.row_lower_.push_back(row.rhs);
          lp.row_upper_.push_back(row.rhs);
          break;
      }
      for (const auto& [j, c] : row.terms) {
        lp.a_matrix_.index_.push_back(j);
        lp.a_matrix_.value_.push_back(c);
      }
      lp.a_matrix_.start_.push_back(
          static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    }
    return hm;
  }
};

}  // namespace orasp
