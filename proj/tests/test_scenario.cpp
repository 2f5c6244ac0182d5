#include "orasp/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

namespace orasp {
namespace {

DurationModel card_model() { return {{99}, {53}, {54}, {143}}; }

TEST(InSample, ClippedWithinBoundsAndAtoms) {
  const auto set = sample_in_sample(card_model(), 100000, 17);
  double lo = kInf, hi = -kInf;
  int at_lo = 0, at_hi = 0;
  for (const auto& row : set.durations) {
    lo = std::min(lo, row[0]);
    hi = std::max(hi, row[0]);
    if (row[0] == 54.0) ++at_lo;
    if (row[0] == 143.0) ++at_hi;
  }
  EXPECT_GE(lo, 54.0);
  EXPECT_LE(hi, 143.0);
  // Clamping concentrates mass exactly at the bounds.
  EXPECT_GT(at_lo, 0);
  EXPECT_GT(at_hi, 0);
}

TEST(InSample, ZeroVarianceDegenerates) {
  const auto set = sample_in_sample({{99}, {0}, {54}, {143}}, 50, 3);
  for (const auto& row : set.durations) EXPECT_DOUBLE_EQ(row[0], 99.0);
}

TEST(InSample, DeterministicGivenSeed) {
  const auto a = sample_in_sample(card_model(), 512, 11);
  const auto b = sample_in_sample(card_model(), 512, 11);
  EXPECT_EQ(a.durations, b.durations);
  const auto c = sample_in_sample(card_model(), 512, 12);
  EXPECT_NE(a.durations, c.durations);
}

TEST(InSample, NegativeStdRejected) {
  EXPECT_THROW(sample_in_sample({{99}, {-1}, {54}, {143}}, 10, 1),
               ValidationError);
}

TEST(OutOfSample, SettingNamesParse) {
  EXPECT_EQ(parse_oos_setting("I").family, OosFamily::I);
  EXPECT_EQ(parse_oos_setting("IIb").family, OosFamily::II);
  EXPECT_DOUBLE_EQ(parse_oos_setting("IIb").delta, 0.25);
  EXPECT_EQ(parse_oos_setting("IIIc").family, OosFamily::III);
  EXPECT_DOUBLE_EQ(parse_oos_setting("IIIc").delta, 0.5);
  EXPECT_EQ(parse_oos_setting("IV").family, OosFamily::IV);
  EXPECT_THROW(parse_oos_setting("V"), UsageError);
  EXPECT_THROW(parse_oos_setting("IId"), UsageError);
}

TEST(OutOfSample, UniformMeanMatchesClosedForm) {
  const std::size_t n = 200000;
  const auto set =
      sample_out_of_sample(card_model(), {OosFamily::III, 0.0}, n, 23);
  KahanSum sum;
  for (const auto& row : set.durations) {
    EXPECT_GE(row[0], 54.0);
    EXPECT_LE(row[0], 143.0);
    sum.add(row[0]);
  }
  const double mean = sum.value() / n;
  const double sigma = (143.0 - 54.0) / std::sqrt(12.0);
  EXPECT_NEAR(mean, (54.0 + 143.0) / 2.0, 3.0 * sigma / std::sqrt(double(n)));
}

TEST(OutOfSample, TruncatedNormalSupportScalesWithDelta) {
  const auto set =
      sample_out_of_sample(card_model(), {OosFamily::II, 0.5}, 20000, 5);
  for (const auto& row : set.durations) {
    EXPECT_GE(row[0], 27.0);
    EXPECT_LE(row[0], 214.5);
  }
}

// With inverse-CDF sampling, the sub-threshold mass must match the
// truncated analytic CDF.
TEST(OutOfSample, TruncatedNormalMassBelowThreshold) {
  const std::size_t n = 200000;
  const auto set =
      sample_out_of_sample(card_model(), {OosFamily::II, 0.0}, n, 29);
  const double threshold = 99.0;
  std::size_t below = 0;
  for (const auto& row : set.durations)
    if (row[0] <= threshold) ++below;
  boost::math::normal_distribution<double> dist(99.0, 53.0);
  const double plo = boost::math::cdf(dist, 54.0);
  const double phi = boost::math::cdf(dist, 143.0);
  const double expected =
      (boost::math::cdf(dist, threshold) - plo) / (phi - plo);
  const double se = std::sqrt(expected * (1 - expected) / n);
  EXPECT_NEAR(static_cast<double>(below) / n, expected, 4.0 * se);
}

TEST(OutOfSample, BetaMatchesMoments) {
  const std::size_t n = 300000;
  const auto set =
      sample_out_of_sample(card_model(), {OosFamily::IV, 0.0}, n, 31);
  KahanSum sum;
  for (const auto& row : set.durations) {
    EXPECT_GE(row[0], 27.0);
    EXPECT_LE(row[0], 214.5);
    sum.add(row[0]);
  }
  const double mean = sum.value() / n;
  EXPECT_NEAR(mean, 99.0, 3.0 * 53.0 / std::sqrt(double(n)));
  KahanSum var;
  for (const auto& row : set.durations) var.add((row[0] - mean) * (row[0] - mean));
  EXPECT_NEAR(var.value() / (n - 1), 53.0 * 53.0, 0.02 * 53.0 * 53.0);
}

TEST(OutOfSample, BetaInfeasibleMomentsRejected) {
  // Variance far above what the interval supports.
  DurationModel dm{{99}, {500}, {54}, {143}};
  try {
    sample_out_of_sample(dm, {OosFamily::IV, 0.0}, 10, 1);
    FAIL() << "expected a parameterization error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("surgery 1"), std::string::npos);
  }
}

TEST(OutOfSample, FamilyIMatchesInSampleSampler) {
  const auto a = sample_in_sample(card_model(), 64, 7);
  const auto b = sample_out_of_sample(card_model(), {OosFamily::I, 0.0}, 64, 7);
  EXPECT_EQ(a.durations, b.durations);
}

TEST(ScenarioIo, RoundTrip) {
  const auto set = sample_in_sample({{99, 142}, {53, 58}, {54, 87}, {143, 188}},
                                    25, 99);
  const std::string path = "/tmp/orasp_scen_roundtrip.csv";
  save_scenarios(set, {1, 2}, path);
  const auto back = load_scenarios(path);
  std::remove(path.c_str());
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t k = 0; k < set.size(); ++k)
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_DOUBLE_EQ(back.durations[k][i], set.durations[k][i]);
}

}  // namespace
}  // namespace orasp
