#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "tonal/error.h"
#include "tonal/metrics.h"

using namespace tonal;

namespace {

const Chord kC{Pitch::C, Pitch::E, Pitch::G};
const Chord kF{Pitch::F, Pitch::A, Pitch::C};
const Chord kG{Pitch::G, Pitch::B, Pitch::D};

double spearman_no_ties(const std::vector<double>& a, const std::vector<double>& b) {
  const auto rank = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      r[i] = 1.0;
      for (double w : v) r[i] += w < v[i] ? 1.0 : 0.0;
    }
    return r;
  };
  const auto ra = rank(a);
  const auto rb = rank(b);
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const double n = static_cast<double>(a.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST(Metrics, CoverageAndEntropyByHand) {
  const std::vector<Chord> seq = {kC, kF, kG, kC};
  EXPECT_DOUBLE_EQ(mean_cc(seq), 3.0 / 4.0);
  EXPECT_NEAR(che(seq), -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25)), 1e-12);
  const std::vector<Chord> same = {kC, kC, kC};
  EXPECT_DOUBLE_EQ(mean_cc(same), 1.0 / 3.0);
  EXPECT_EQ(che(same), 0.0);
  // Spelling does not matter: sets are pitch classes.
  const std::vector<Chord> respelled = {Chord{Pitch::G, Pitch::E, Pitch::C}, kC};
  EXPECT_DOUBLE_EQ(mean_cc(respelled), 0.5);
}

TEST(Metrics, MctdByHand) {
  // C over C-E-G spelled [0, 4, 1]: the C is left out of the center.
  const std::vector<MelodyNote> melody = {{72, 1.0, 1.0}};
  const std::vector<Chord> chords = {kC};
  const std::vector<std::vector<int>> sp = {{0, 4, 1}};
  const double expected = oracle::dist(oracle::P(0), oracle::center({4, 1}));
  EXPECT_NEAR(mctd(melody, chords, sp), expected, 1e-12);
  // Lone chord tone equal to the melody keeps itself as the center.
  const std::vector<Chord> unison = {Chord{Pitch::C}};
  const std::vector<std::vector<int>> usp = {{0}};
  EXPECT_NEAR(mctd(melody, unison, usp), 0.0, 1e-15);
}

TEST(Metrics, MctdWeightsAndRests) {
  const std::vector<Chord> chords = {kC, kG};
  const std::vector<std::vector<int>> sp = {{0, 4, 1}, {1, 5, 2}};
  const double d0 = oracle::dist(oracle::P(0), oracle::center({4, 1}));
  // F# over G-B-D: candidates 6 and -6; 6 is nearer that center.
  const double d1 = oracle::dist(oracle::P(6), oracle::center({1, 5, 2}));
  const std::vector<MelodyNote> melody = {{60, 1.0, 1.0}, {66, 3.0, 1.0}};
  EXPECT_NEAR(mctd(melody, chords, sp), (d0 + 3.0 * d1) / 4.0, 1e-12);
  const std::vector<MelodyNote> rested = {{60, 1.0, 1.0}, {kRest, 3.0, 1.0}};
  EXPECT_NEAR(mctd(rested, chords, sp), d0, 1e-12);
  const std::vector<MelodyNote> silent = {{kRest, 1.0, 1.0}, {kRest, 1.0, 1.0}};
  EXPECT_EQ(mctd(silent, chords, sp), 0.0);
  EXPECT_THROW(mctd(std::span<const MelodyNote>(melody.data(), 1), chords, sp), InputError);
}

TEST(Metrics, MctdTranspositionInvariant) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> pc(0, 11);
  const std::vector<Chord> chords = {kC, kF, kG, kC, Chord{Pitch::A, Pitch::C, Pitch::E}};
  std::vector<MelodyNote> melody;
  for (std::size_t i = 0; i < chords.size(); ++i) melody.push_back({60 + pc(rng), 1.0, 1.0});
  const auto spell = [](const std::vector<Chord>& cs) {
    std::vector<std::vector<int>> out;
    for (const auto& s : spell_sequence(cs)) out.push_back(s.indices);
    return out;
  };
  const double base = mctd(melody, chords, spell(chords));
  for (int s : {1, 2, 5, 7}) {
    std::vector<Chord> tc;
    std::vector<MelodyNote> tm = melody;
    for (const auto& c : chords) tc.push_back(c.transposed(s));
    for (auto& n : tm) n.midi += s;
    EXPECT_NEAR(mctd(tm, tc, spell(tc)), base, 1e-9) << s;
  }
}

TEST(Metrics, SrccMatchesClosedFormWithoutTies) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(3 + trial % 20), b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    EXPECT_NEAR(srcc(a, b), spearman_no_ties(a, b), 1e-12);
  }
}

TEST(Metrics, SrccTiesAndErrors) {
  EXPECT_EQ(average_ranks(std::vector<double>{3.0, 1.0, 3.0, 2.0}), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
  const std::vector<double> a = {1, 2, 2, 3};
  const std::vector<double> b = {10, 20, 20, 30};
  EXPECT_NEAR(srcc(a, b), 1.0, 1e-12);
  const std::vector<double> rev = {3, 2, 2, 1};
  EXPECT_NEAR(srcc(a, rev), -1.0, 1e-12);
  EXPECT_THROW(srcc(std::vector<double>{1.0}, std::vector<double>{2.0}), InputError);
  EXPECT_THROW(srcc(a, std::vector<double>{1, 2, 3}), InputError);
  EXPECT_THROW(srcc(a, std::vector<double>{1, 1, 1, 1}), InputError);
}

TEST(Metrics, ConfidenceInterval) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  const auto ci = confidence_interval_95(v);
  const double half = 2.776445 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_DOUBLE_EQ(ci.mean, 3.0);
  EXPECT_NEAR(ci.hi - ci.mean, half, 1e-6);
  EXPECT_NEAR(ci.mean - ci.lo, half, 1e-6);
  const auto one = confidence_interval_95(std::vector<double>{0.7});
  EXPECT_EQ(one.lo, 0.7);
  EXPECT_EQ(one.hi, 0.7);
  EXPECT_THROW(confidence_interval_95({}), InputError);
}

TEST(Metrics, PieceMetricsAndFeatureSrcc) {
  const std::vector<Chord> chords = {kC, kF, kG, kC};
  std::vector<std::vector<int>> sp;
  for (const auto& s : spell_sequence(chords)) sp.push_back(s.indices);
  const auto no_melody = piece_metrics(chords, sp, {});
  EXPECT_DOUBLE_EQ(no_melody.cc, 0.75);
  EXPECT_FALSE(no_melody.mctd);
  const std::vector<MelodyNote> melody = {{64, 1, 1}, {65, 1, 1}, {62, 1, 1}, {60, 1, 1}};
  EXPECT_TRUE(piece_metrics(chords, sp, melody).mctd);

  const auto f = extract_features(chords);
  const auto s = feature_srcc(f, f);
  EXPECT_NEAR(*s.distance, 1.0, 1e-12);
  EXPECT_NEAR(*s.strain, 1.0, 1e-12);
  // All-major triads share one diameter.
  EXPECT_FALSE(s.tension);
}
