#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "tonal/error.h"
#include "tonal/recovery.h"

using namespace tonal;

namespace {

const ChordLibrary& library() {
  static const ChordLibrary lib = ChordLibrary::build();
  return lib;
}

const ChordLibrary& triads() {
  static const ChordLibrary lib = ChordLibrary::build(LibraryFilter::parse("min=3,max=3"));
  return lib;
}

std::vector<Chord> random_progression(std::mt19937_64& rng, const ChordLibrary& lib, std::size_t t) {
  std::uniform_int_distribution<std::size_t> pick(0, lib.size() - 1);
  std::vector<Chord> out;
  for (std::size_t i = 0; i < t; ++i) out.push_back(lib.entries()[pick(rng)].chord);
  return out;
}

// Beam width 1 over every tonic placement, written out directly.
double greedy_cost(const FeatureSequence& target, const ChordLibrary& lib, const RecoveryConfig& cfg) {
  std::vector<int> tonics = {canonical_tonic_index(cfg.tonality)};
  for (int k : label_candidates(pitch_from_class(cfg.tonality.tonic_pc()))) {
    if (k != tonics[0]) tonics.push_back(k);
  }
  const bool minor = cfg.tonality.mode() == Mode::kMinor;
  double best = std::numeric_limits<double>::infinity();
  for (int tonic : tonics) {
    const oracle::Vec key = minor ? oracle::minor_key(tonic) : oracle::major_key(tonic);
    double total = 0.0;
    oracle::Vec prev{};
    for (std::size_t t = 0; t < target.length(); ++t) {
      const auto w = effective_weights(cfg, t == 0);
      double step_best = std::numeric_limits<double>::infinity();
      oracle::Vec step_center{};
      for (const auto& e : lib.entries()) {
        for (const auto& s : e.spellings) {
          const oracle::Vec c = oracle::center(s.indices);
          double cost = w.alpha * std::abs(oracle::diameter(s.indices) - target.tension[t]) +
                        w.gamma * std::abs(oracle::dist(c, key) - target.strain[t]);
          if (t > 0) cost += w.beta * std::abs(oracle::dist(c, prev) - target.distance[t]);
          if (cost < step_best - 1e-12) {
            step_best = cost;
            step_center = c;
          }
        }
      }
      total += step_best;
      prev = step_center;
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace

TEST(Recovery, ExactTargetsRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::vector<std::vector<double>> rds;
  for (int trial = 0; trial < 60; ++trial) {
    const auto chords = random_progression(rng, library(), len(rng));
    const auto target = extract_features(chords);
    RecoveryConfig cfg;
    cfg.tonality = target.tonality;
    const auto r = recover(target, library(), cfg);
    ASSERT_EQ(r.chords.size(), chords.size());
    EXPECT_NEAR(r.total_cost, 0.0, 1e-9) << "trial " << trial;
    rds.push_back(r.per_step_rd);
  }
  EXPECT_LT(mrda(rds), 1e-9);
}

TEST(Recovery, AchievedFeaturesAreConsistent) {
  std::mt19937_64 rng(32);
  const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 10, 7, Tonality::from_index(14));
  const auto r = recover(target, library(), RecoveryConfig{.tonality = Tonality::from_index(14)});
  ASSERT_EQ(r.spellings.size(), 10u);
  const auto key = key_coordinate(r.tonic_k, Mode::kMinor);
  EXPECT_EQ(pitch_class(label_of(r.tonic_k)), 2);
  for (std::size_t t = 0; t < 10; ++t) {
    const auto s = make_spelling(r.spellings[t]);
    EXPECT_NEAR(r.achieved.tension[t], s.diameter, 1e-12);
    EXPECT_NEAR(r.achieved.strain[t], distance(s.center, key), 1e-12);
    std::vector<Pitch> labels;
    for (int k : r.spellings[t]) labels.push_back(label_of(k));
    EXPECT_EQ(Chord(labels), r.chords[t]);
  }
  EXPECT_EQ(r.achieved.distance[0], 0.0);
  EXPECT_EQ(r.per_step_rd, recovery_deviation(r.achieved, target));
}

TEST(Recovery, BeamOneMatchesGreedyOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 6, seed, Tonality::from_index(9));
    RecoveryConfig cfg{.alpha = 0.5, .beta = 0.3, .gamma = 0.2, .beam_width = 1, .tonality = target.tonality};
    EXPECT_NEAR(recover(target, triads(), cfg).total_cost, greedy_cost(target, triads(), cfg), 1e-9);
  }
}

TEST(Recovery, WiderBeamNeverCostsMore) {
  const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 12, 99, Tonality::from_index(3));
  double prev = std::numeric_limits<double>::infinity();
  for (int w : {1, 2, 4, 8, 16}) {
    RecoveryConfig cfg{.beam_width = w, .tonality = target.tonality};
    const double c = recover(target, library(), cfg).total_cost;
    EXPECT_LE(c, prev + 1e-12) << w;
    prev = c;
  }
}

TEST(Recovery, ThreadCountDoesNotChangeResult) {
  const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 16, 5, Tonality::from_index(20));
  RecoveryConfig one{.tonality = target.tonality};
  RecoveryConfig many = one;
  many.threads = 4;
  const auto a = recover(target, library(), one);
  const auto b = recover(target, library(), many);
  EXPECT_EQ(a.chords, b.chords);
  EXPECT_EQ(a.spellings, b.spellings);
  EXPECT_EQ(a.total_cost, b.total_cost);
  EXPECT_EQ(a.per_step_rd, b.per_step_rd);
}

TEST(Recovery, TensionOnlyWeightsPickNearestDiameters) {
  const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 8, 17, Tonality{});
  RecoveryConfig cfg{.alpha = 1.0, .beta = 0.0, .gamma = 0.0};
  const auto r = recover(target, library(), cfg);
  double expected = 0.0;
  for (double t : target.tension) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : library().entries()) best = std::min(best, std::abs(e.min_diameter - t));
    expected += best;
  }
  EXPECT_NEAR(r.total_cost, expected, 1e-9);
}

TEST(Recovery, EffectiveWeights) {
  RecoveryConfig cfg{.alpha = 2.0, .beta = 1.0, .gamma = 1.0};
  const auto first = effective_weights(cfg, true);
  EXPECT_NEAR(first.alpha, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(first.beta, 0.0);
  EXPECT_NEAR(first.gamma, 1.0 / 3.0, 1e-15);
  const auto later = effective_weights(cfg, false);
  EXPECT_NEAR(later.alpha + later.beta + later.gamma, 1.0, 1e-15);
  EXPECT_NEAR(later.alpha, 0.5, 1e-15);
  // Distance-only weights leave nothing to score at step one.
  const auto d = effective_weights(RecoveryConfig{.alpha = 0.0, .beta = 1.0, .gamma = 0.0}, true);
  EXPECT_EQ(d.alpha + d.beta + d.gamma, 0.0);
}

TEST(Recovery, NormalizedTargetsAreDenormalized) {
  const std::vector<Chord> chords = {Chord{Pitch::C, Pitch::E, Pitch::G}, Chord{Pitch::F, Pitch::A, Pitch::C},
                                     Chord{Pitch::G, Pitch::B, Pitch::D}, Chord{Pitch::C, Pitch::E, Pitch::G}};
  const auto raw = extract_features(chords);
  const auto z = normalize(raw, NormStats{{2.0, 0.5}, {1.0, 0.4}, {1.0, 0.3}});
  const auto r = recover(z, library(), RecoveryConfig{.tonality = raw.tonality});
  EXPECT_NEAR(r.total_cost, 0.0, 1e-9);
  auto bare = z;
  bare.norm_stats.reset();
  EXPECT_THROW(recover(bare, library()), InputError);
}

TEST(Recovery, Errors) {
  const auto target = random_features({{1, 4}, {0, 3}, {0.5, 2.5}}, 4, 1);
  const auto empty = ChordLibrary::build(LibraryFilter::parse("min=5,max=5,quality=maj"));
  ASSERT_TRUE(empty.empty());
  EXPECT_THROW(recover(target, empty), ConfigError);
  EXPECT_THROW(recover(target, triads(), RecoveryConfig{.beam_width = 0}), ConfigError);
  EXPECT_THROW(recover(target, triads(), RecoveryConfig{.alpha = -1.0}), ConfigError);
  EXPECT_THROW(recover(target, triads(), RecoveryConfig{.alpha = 0, .beta = 0, .gamma = 0}), ConfigError);
  EXPECT_THROW(recover(target, triads(), RecoveryConfig{.threads = 0}), ConfigError);
  FeatureSequence bad = target;
  bad.strain.pop_back();
  EXPECT_THROW(recover(bad, triads()), InputError);
}

TEST(Recovery, Mrda) {
  const std::vector<std::vector<double>> rd = {{1.0, 3.0}, {0.5}};
  EXPECT_DOUBLE_EQ(mrda(rd), (2.0 + 0.5) / 2.0);
  EXPECT_THROW(mrda({}), InputError);
  const std::vector<std::vector<double>> hole = {{}};
  EXPECT_THROW(mrda(hole), InputError);
}

TEST(Recovery, DeviationSkipsFirstDistance) {
  FeatureSequence a;
  a.tension = {1.0, 1.0};
  a.distance = {0.0, 1.0};
  a.strain = {1.0, 1.0};
  FeatureSequence b = a;
  b.distance = {5.0, 2.0};
  b.tension = {1.5, 1.0};
  EXPECT_EQ(recovery_deviation(a, b), (std::vector<double>{0.5, 1.0}));
}

TEST(Recovery, RandomFeatures) {
  const FeatureRanges ranges{{1, 2}, {0.5, 0.75}, {3, 3}};
  const auto f = random_features(ranges, 50, 42, Tonality::from_index(5));
  EXPECT_EQ(f, random_features(ranges, 50, 42, Tonality::from_index(5)));
  EXPECT_NE(f.tension, random_features(ranges, 50, 43).tension);
  EXPECT_EQ(f.distance[0], 0.0);
  for (std::size_t t = 0; t < 50; ++t) {
    EXPECT_GE(f.tension[t], 1.0);
    EXPECT_LE(f.tension[t], 2.0);
    if (t > 0) EXPECT_GE(f.distance[t], 0.5);
    EXPECT_EQ(f.strain[t], 3.0);
  }
  EXPECT_NO_THROW(f.validate());
  EXPECT_THROW(random_features(ranges, 0, 1), InputError);
  EXPECT_THROW(random_features({{2, 1}, {0, 1}, {0, 1}}, 3, 1), InputError);
}
