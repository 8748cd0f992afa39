#include <gtest/gtest.h>

#include <sstream>

#include "cna/experiment.hpp"
#include "cna/fixtures.hpp"
#include "support.hpp"

using namespace cna;

namespace {

SchmidtFrameChain fixture_frame(const std::string& name) {
  const auto* f = fixtures::find_state(name);
  return to_schmidt_frame(build_chain(f->scenario, f->state()));
}

struct Calibration {
  double mean_fraction;
  double sample_sd;
  double mean_abs_error;
  int covered;
};

Calibration calibrate(const SchmidtFrameChain& frame, double truth, std::uint64_t pairs, int seeds) {
  Calibration c{0.0, 0.0, 0.0, 0};
  std::vector<double> values;
  for (int s = 0; s < seeds; ++s) {
    const auto e = estimate(simulate_coincidences(frame, pairs, 1000 + static_cast<std::uint64_t>(s)), frame.scenario);
    values.push_back(e.fraction);
    c.mean_abs_error += std::abs(e.fraction - truth) / seeds;
    c.covered += std::abs(e.fraction - truth) <= 3.0 * e.fraction_err;
  }
  for (double v : values) c.mean_fraction += v / seeds;
  for (double v : values) c.sample_sd += (v - c.mean_fraction) * (v - c.mean_fraction) / (seeds - 1);
  c.sample_sd = std::sqrt(c.sample_sd);
  return c;
}

}  // namespace

TEST(OamLabels, Defaults) {
  EXPECT_EQ(default_oam_labels(2), (std::vector<int>{1, -1}));
  EXPECT_EQ(default_oam_labels(3), (std::vector<int>{0, 1, -1}));
  EXPECT_EQ(default_oam_labels(4), (std::vector<int>{0, 1, -1, 2}));
}

TEST(SchmidtFrame, DiagonalStateLeavesBasesAlone) {
  const auto st = StateMatrix::diagonal({0.8, 0.6});
  const auto chain = build_chain(Scenario::make(3, 2, 2), st);
  const auto frame = to_schmidt_frame(chain);
  for (int i = 1; i <= 6; ++i) {
    EXPECT_LE(test::row_phase_distance(frame.at(i).rows, chain.at(i).rows), 1e-12);
  }
}

TEST(SchmidtFrame, QutritLambdas) {
  const auto frame = fixture_frame("H_2_3_1");
  const double want[] = {0.802376, 0.456065, 0.384963};
  for (int g = 0; g < 3; ++g) EXPECT_NEAR(frame.lambdas[static_cast<std::size_t>(g)], want[g], 1e-5);
}

TEST(SchmidtFrame, PropertyFrameInvariance) {
  auto check = [](const MeasurementChain& chain, const std::string& label) {
    const auto frame = to_schmidt_frame(chain);
    const auto st = frame.state();
    for (const auto& b : frame.bases) EXPECT_TRUE(is_unitary(b.rows, 1e-9)) << label;
    const int n = chain.scenario.chain_length();
    for (int i = 1; i < n; ++i) {
      EXPECT_NEAR(probability_gt(st, frame.at(i), frame.at(i + 1)), chain.edge_gt(i), 1e-10) << label;
    }
    const double p1 = probability_gt(st, frame.at(1), frame.at(n));
    const double f_frame = p1 - probability_gt(st, frame.at(chain.scenario.J), frame.at(chain.scenario.J + 1));
    EXPECT_NEAR(f_frame, cabello_fraction(chain).fraction, 1e-10) << label;
  };
  for (const auto& f : fixtures::states()) check(build_chain(f.scenario, f.state()), f.name);
  for (int c = 0; c < 100; ++c) {
    auto rng = test::rng_for(static_cast<std::uint64_t>(c), 102);
    const int k = 2 + c % 3, d = 2 + c % 3;
    check(build_chain(Scenario::make(k, d, 1 + c % (2 * k - 1)), test::random_state(rng, d)),
          "random " + std::to_string(c));
  }
}

TEST(Procrustean, Examples) {
  SourceSpectrum two{{{1, 0.8}, {-1, 0.6}}};
  const auto m = procrustean_mask(two, {0.707107, 0.707107}, {1, -1});
  ASSERT_EQ(m.eta.size(), 2u);
  EXPECT_NEAR(m.eta[0], 0.75, 1e-12);
  EXPECT_NEAR(m.eta[1], 1.0, 1e-12);

  const auto same = procrustean_mask(two, {0.8, 0.6}, {1, -1});
  EXPECT_NEAR(same.eta[0], 1.0, 1e-12);
  EXPECT_NEAR(same.eta[1], 1.0, 1e-12);

  SourceSpectrum sparse{{{0, 0.9}, {1, 0.1}, {-1, 0.0}}};
  EXPECT_THROW(procrustean_mask(sparse, {0.6, 0.6, 0.52915}, {0, 1, -1}), InfeasibleConcentrationError);
  EXPECT_THROW(procrustean_mask(sparse, {0.6, 0.8}, {0, 7}), InfeasibleConcentrationError);
  EXPECT_THROW(procrustean_mask(sparse, {0.6, 0.8}, {0}), DimensionError);
}

TEST(Procrustean, PropertyMaskReproducesTarget) {
  for (int c = 0; c < 200; ++c) {
    auto rng = test::rng_for(static_cast<std::uint64_t>(c), 103);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const int d = 2 + c % 5;
    const auto labels = default_oam_labels(d);
    const auto source = SourceSpectrum::geometric(u(rng), 3);
    std::vector<double> target;
    double n2 = 0.0;
    for (int g = 0; g < d; ++g) {
      target.push_back(u(rng));
      n2 += target.back() * target.back();
    }
    for (double& t : target) t /= std::sqrt(n2);
    const auto mask = procrustean_mask(source, target, labels);
    EXPECT_NEAR(*std::max_element(mask.eta.begin(), mask.eta.end()), 1.0, 1e-12);
    for (double e : mask.eta) {
      EXPECT_GT(e, 0.0);
      EXPECT_LE(e, 1.0 + 1e-12);
    }
    const auto out = apply_mask(source, mask, labels);
    for (int g = 0; g < d; ++g) EXPECT_NEAR(out[static_cast<std::size_t>(g)], target[static_cast<std::size_t>(g)], 1e-12);
  }
}

TEST(Spectrum, GeometricIsNormalized) {
  const auto s = SourceSpectrum::geometric(0.8, 3);
  double n2 = 0.0;
  for (const auto& [l, c] : s.amplitudes) n2 += c * c;
  EXPECT_NEAR(n2, 1.0, 1e-12);
  EXPECT_EQ(s.amplitudes.size(), 7u);
  EXPECT_NEAR(s.at(2) / s.at(1), 0.8, 1e-12);
  EXPECT_EQ(s.at(9), 0.0);
  EXPECT_THROW(SourceSpectrum::geometric(0.0, 3), InvalidArgument);
}

TEST(Simulation, RejectsZeroPairs) {
  EXPECT_THROW(simulate_coincidences(fixture_frame("H_2_2_1"), 0, 1), InvalidArgument);
}

TEST(Simulation, SeedDeterminism) {
  const auto frame = fixture_frame("H_3_2_1");
  const auto a = simulate_coincidences(frame, 5000, 17);
  const auto b = simulate_coincidences(frame, 5000, 17);
  const auto c = simulate_coincidences(frame, 5000, 18);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
  EXPECT_EQ(a.counts.size(), 6u * 4u);
}

TEST(Simulation, DiagonalStateOnlyHitsEqualOutcomes) {
  const auto chain = build_chain(Scenario::make(2, 3, 1), StateMatrix::diagonal({0.7, 0.5, 0.5099019513592785}));
  const auto data = simulate_coincidences(to_schmidt_frame(chain), 20000, 3);
  std::uint64_t total = 0;
  for (const auto& [key, n] : data.counts) {
    if (key.outcome_s != key.outcome_t) { EXPECT_EQ(n, 0u); }
    total += n;
  }
  EXPECT_GT(total, 0u);
}

TEST(Simulation, TwoQubitCalibration) {
  const auto c = calibrate(fixture_frame("H_2_2_1"), 0.125, 100000, 100);
  EXPECT_LE(std::abs(c.mean_fraction - 0.125), 3.0 * c.sample_sd / 10.0);
  EXPECT_GE(c.covered, 95);
}

TEST(Simulation, SixSettingSingleRun) {
  const auto frame = fixture_frame("H_6_2_1");
  const auto e = estimate(simulate_coincidences(frame, 10000, 42), frame.scenario);
  EXPECT_LE(std::abs(e.fraction - 0.321900), 3.0 * e.fraction_err);
  EXPECT_EQ(e.edges.size(), 12u);
}

TEST(Estimator, PropertyConsistencyAndCoverage) {
  const auto* f = fixtures::find_state("H_2_3_1");
  const auto frame = fixture_frame("H_2_3_1");
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t n : {1000ull, 10000ull, 100000ull}) {
    const auto c = calibrate(frame, cabello_fraction(build_chain(f->scenario, f->state())).fraction, n, 200);
    EXPECT_LT(c.mean_abs_error, prev) << "N=" << n;
    EXPECT_GE(c.covered, 190) << "N=" << n;
    prev = c.mean_abs_error;
  }
}

TEST(Estimator, NoiselessLimit) {
  const auto* f = fixtures::find_state("H_2_4_1");
  const auto chain = build_chain(f->scenario, f->state());
  const auto frame = to_schmidt_frame(chain);
  const double big = 1e15;
  CoincidenceDataset data;
  data.pairs_per_setting = static_cast<std::uint64_t>(big);
  for (auto [i, j] : measured_settings(f->scenario)) {
    const auto p = frame.joint(i, j);
    for (int s = 1; s <= 4; ++s)
      for (int t = 1; t <= 4; ++t)
        data.counts[{i, j, s, t}] = static_cast<std::uint64_t>(std::llround(p(s - 1, t - 1) * big));
  }
  const auto e = estimate(data, f->scenario);
  const auto r = cabello_fraction(chain);
  EXPECT_NEAR(e.fraction, r.fraction, 1e-12);
  EXPECT_NEAR(e.bell, r.s_ideal, 1e-12);
  const double want_p1_err = std::sqrt(r.p1 * (1 - r.p1) / static_cast<double>(e.edges.back().total));
  EXPECT_NEAR(e.p1_err, want_p1_err, 1e-20);
  EXPECT_NEAR(e.fraction_err, std::hypot(e.p1_err, e.p2_err), 1e-22);
  for (const auto& edge : e.edges) {
    EXPECT_GE(edge.std_error, 0.0);
    EXPECT_GE(edge.p_greater, 0.0);
    EXPECT_LE(edge.p_greater, 1.0);
  }
}

TEST(Estimator, MissingSettingPair) {
  const auto frame = fixture_frame("H_2_2_1");
  auto data = simulate_coincidences(frame, 1000, 5);
  for (auto it = data.counts.begin(); it != data.counts.end();) {
    it = it->first.setting_i == 2 && it->first.setting_j == 3 ? data.counts.erase(it) : std::next(it);
  }
  EXPECT_THROW(estimate(data, frame.scenario), InsufficientDataError);
}

TEST(Csv, RoundTripAndValidation) {
  const auto frame = fixture_frame("H_2_3_1");
  const auto data = simulate_coincidences(frame, 3000, 9);
  std::stringstream ss;
  write_csv(ss, data);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "setting_i,setting_j,outcome_s,outcome_t,count");
  const auto back = read_csv(ss);
  EXPECT_EQ(back.counts, data.counts);

  std::istringstream bad_header("a,b,c,d,e\n1,2,1,1,4\n");
  EXPECT_THROW(read_csv(bad_header), InvalidArgument);
  std::istringstream bad_field("setting_i,setting_j,outcome_s,outcome_t,count\n1,2,1,x,4\n");
  EXPECT_THROW(read_csv(bad_field), InvalidArgument);
  std::istringstream negative("setting_i,setting_j,outcome_s,outcome_t,count\n1,2,1,1,-4\n");
  EXPECT_THROW(read_csv(negative), InvalidArgument);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), InsufficientDataError);
}
