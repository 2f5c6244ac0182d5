#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace orasp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Error categories map onto CLI exit codes: usage (1), validation /
// infeasibility (2), solver backend (3).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compensated summation so that parallel per-scenario aggregation stays
// reproducible once the inputs are fixed.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double kahan_total(const std::vector<double>& xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return kahan_total(xs) / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator).
inline double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(xs.size() - 1));
}

inline bool nearly_equal(double a, double b, double rel = 1e-9,
                         double abs_tol = 1e-9) {
  const double diff = std::fabs(a - b);
  if (diff <= abs_tol) return true;
  return diff <= rel * std::max(std::fabs(a), std::fabs(b));
}

// Stateless mix for deriving independent seed streams.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace orasp
