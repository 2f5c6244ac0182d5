#pragma once

// Surgery-duration sampling: the in-sample generator used by the SAA
// solvers and the four out-of-sample families used for schedule evaluation.
// Every sampler is a pure function of (model, setting, n, seed).

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "orasp/common.hpp"
#include "orasp/instance.hpp"

namespace orasp {

struct ScenarioSet {
  std::vector<std::vector<double>> durations;  // n rows, one column per surgery
  std::string provenance;

  std::size_t size() const { return durations.size(); }
  std::size_t width() const {
    return durations.empty() ? 0 : durations[0].size();
  }
};

enum class OosFamily { I, II, III, IV };

struct OosSetting {
  OosFamily family = OosFamily::I;
  double delta = 0.0;  // support perturbation; meaningful for II and III only
};

// Parses "I", "IIa".."IIc", "IIIa".."IIIc", "IV"; the letter encodes
// delta in {0, 0.25, 0.5}.
inline OosSetting parse_oos_setting(const std::string& name) {
  auto delta_of = [&](char c) -> double {
    switch (c) {
      case 'a': return 0.0;
      case 'b': return 0.25;
      case 'c': return 0.5;
      default:
        throw UsageError("bad out-of-sample setting suffix in '" + name + "'");
    }
  };
  if (name == "I") return {OosFamily::I, 0.0};
  if (name == "IV") return {OosFamily::IV, 0.0};
  if (name.size() == 3 && name.compare(0, 2, "II") == 0 && name[2] != 'I')
    return {OosFamily::II, delta_of(name[2])};
  if (name.size() == 4 && name.compare(0, 3, "III") == 0)
    return {OosFamily::III, delta_of(name[3])};
  throw UsageError("unknown out-of-sample setting '" + name + "'");
}

inline std::string to_string(const OosSetting& s) {
  auto suffix = [](double d) {
    return d == 0.0 ? "a" : (d == 0.25 ? "b" : "c");
  };
  switch (s.family) {
    case OosFamily::I: return "I";
    case OosFamily::II: return std::string("II") + suffix(s.delta);
    case OosFamily::III: return std::string("III") + suffix(s.delta);
    case OosFamily::IV: return "IV";
  }
  return "?";
}

namespace sampling_detail {

// Lognormal matched to (mean, variance), then clamped to the support.  The
// clamp puts an atom of probability at each bound; that is the intended
// reading of clipping.
inline double lognormal_clipped(double mean, double std, double lo, double hi,
                                std::mt19937_64& rng) {
  if (std == 0.0) return std::clamp(mean, lo, hi);
  const double s2 = std::log1p((std * std) / (mean * mean));
  const double mu = std::log(mean) - 0.5 * s2;
  std::normal_distribution<double> normal(mu, std::sqrt(s2));
  return std::clamp(std::exp(normal(rng)), lo, hi);
}

// Exact inverse-CDF truncation keeps the draw count per scenario fixed, so
// streams stay reproducible.
inline double truncated_normal(double mean, double std, double lo, double hi,
                               std::mt19937_64& rng) {
  if (std == 0.0) return std::clamp(mean, lo, hi);
  boost::math::normal_distribution<double> dist(mean, std);
  const double plo = boost::math::cdf(dist, lo);
  const double phi = boost::math::cdf(dist, hi);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double p = plo + unif(rng) * (phi - plo);
  const double clamped = std::clamp(p, 1e-15, 1.0 - 1e-15);
  return std::clamp(boost::math::quantile(dist, clamped), lo, hi);
}

struct BetaShapes {
  double alpha, beta;
};

// Method-of-moments shapes for a beta on [lo, hi] with the given mean and
// variance.  Throws when the variance is not attainable on that interval.
inline BetaShapes beta_shapes(double mean, double std, double lo, double hi,
                              int surgery_id) {
  const double span = hi - lo;
  const double m = (mean - lo) / span;
  const double v = (std * std) / (span * span);
  if (!(m > 0.0 && m < 1.0))
    throw ValidationError("surgery " + std::to_string(surgery_id) +
                          ": beta family needs mean strictly inside support");
  if (!(v > 0.0) || v >= m * (1.0 - m))
    throw ValidationError("surgery " + std::to_string(surgery_id) +
                          ": (mean, variance) not attainable by a beta on the "
                          "stated interval");
  const double nu = m * (1.0 - m) / v - 1.0;
  return {m * nu, (1.0 - m) * nu};
}

inline double scaled_beta(const BetaShapes& sh, double lo, double hi,
                          std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(sh.alpha, 1.0);
  std::gamma_distribution<double> gb(sh.beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return lo + (hi - lo) * (x / (x + y));
}

}  // namespace sampling_detail

inline ScenarioSet sample_in_sample(const DurationModel& dm, std::size_t n,
                                    std::uint64_t seed) {
  if (n < 1) throw UsageError("scenario count must be >= 1");
  for (std::size_t i = 0; i < dm.size(); ++i) {
    if (dm.std[i] < 0)
      throw ValidationError("surgery column " + std::to_string(i) +
                            ": negative std");
  }
  ScenarioSet set;
  set.durations.assign(n, std::vector<double>(dm.size()));
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < dm.size(); ++i)
      set.durations[k][i] = sampling_detail::lognormal_clipped(
          dm.mean[i], dm.std[i], dm.lo[i], dm.hi[i], rng);
  set.provenance =
      "in-sample lognormal n=" + std::to_string(n) + " seed=" + std::to_string(seed);
  return set;
}

inline ScenarioSet sample_out_of_sample(const DurationModel& dm,
                                        const OosSetting& setting,
                                        std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("scenario count must be >= 1");
  using namespace sampling_detail;

  ScenarioSet set;
  set.durations.assign(n, std::vector<double>(dm.size()));
  std::mt19937_64 rng(seed);

  // Family IV shape parameters fail loudly before any sampling happens.
  std::vector<BetaShapes> shapes;
  if (setting.family == OosFamily::IV) {
    shapes.reserve(dm.size());
    for (std::size_t i = 0; i < dm.size(); ++i) {
      if (dm.std[i] == 0.0) {
        shapes.push_back({0.0, 0.0});  // degenerate; handled below
      } else {
        shapes.push_back(beta_shapes(dm.mean[i], dm.std[i], 0.5 * dm.lo[i],
                                     1.5 * dm.hi[i], static_cast<int>(i) + 1));
      }
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < dm.size(); ++i) {
      double d = 0.0;
      switch (setting.family) {
        case OosFamily::I:
          d = lognormal_clipped(dm.mean[i], dm.std[i], dm.lo[i], dm.hi[i], rng);
          break;
        case OosFamily::II:
          d = truncated_normal(dm.mean[i], dm.std[i],
                               (1.0 - setting.delta) * dm.lo[i],
                               (1.0 + setting.delta) * dm.hi[i], rng);
          break;
        case OosFamily::III: {
          std::uniform_real_distribution<double> unif(
              (1.0 - setting.delta) * dm.lo[i],
              (1.0 + setting.delta) * dm.hi[i]);
          d = unif(rng);
          break;
        }
        case OosFamily::IV:
          d = dm.std[i] == 0.0
                  ? dm.mean[i]
                  : scaled_beta(shapes[i], 0.5 * dm.lo[i], 1.5 * dm.hi[i], rng);
          break;
      }
      set.durations[k][i] = d;
    }
  }
  set.provenance = "out-of-sample " + to_string(setting) +
                   " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
  return set;
}

// ---------------------------------------------------------------------------
// Delimited text export/import: header row of surgery ids, one row per
// scenario.
// ---------------------------------------------------------------------------

inline void save_scenarios(const ScenarioSet& set,
                           const std::vector<int>& surgery_ids,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out.precision(17);
  for (std::size_t i = 0; i < surgery_ids.size(); ++i)
    out << (i ? "," : "") << surgery_ids[i];
  out << "\n";
  for (const auto& row : set.durations) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

inline ScenarioSet load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scenario file " + path);
  ScenarioSet set;
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("scenario file " + path + " is empty");
  std::size_t width = 1 + std::count(line.begin(), line.end(), ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != width)
      throw ValidationError("scenario file " + path +
                            ": row width mismatch with header");
    set.durations.push_back(std::move(row));
  }
  set.provenance = "file:" + path;
  return set;
}

}  // namespace orasp
