#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "tonal/error.h"
#include "tonal/spelling.h"

using namespace tonal;

namespace {

Chord chord_of(const std::vector<int>& pcs) {
  std::vector<Pitch> labels;
  for (int pc : pcs) labels.push_back(pitch_from_class(pc));
  return Chord(labels);
}

std::vector<int> random_pcs(std::mt19937_64& rng, int max_size) {
  std::uniform_int_distribution<int> size(1, max_size);
  std::vector<int> all(12);
  for (int i = 0; i < 12; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size(rng));
  return all;
}

}  // namespace

TEST(Spelling, ReferenceDiameters) {
  EXPECT_NEAR(make_spelling({6, 3, 0}).diameter, 3.1241, 1e-3);
  EXPECT_NEAR(make_spelling({-6, 3, 0}).diameter, 3.8678, 1e-3);
  EXPECT_NEAR(make_spelling({-6, 3, 0, 4}).diameter, 4.472, 1e-3);
  EXPECT_NEAR(make_spelling({6, 3, 0, -1}).diameter, 3.1369, 1e-3);
}

TEST(Spelling, CMajorHasSingleMinimalRow) {
  const auto m = chord_min_diameter_assignments(Chord{Pitch::C, Pitch::E, Pitch::G});
  ASSERT_EQ(m.rows.size(), 1u);
  EXPECT_EQ(m.rows[0], (std::vector<int>{0, 4, 1}));
  EXPECT_NEAR(m.diameter, 1.8547, 1e-4);
}

TEST(Spelling, IsolatedGbAC) {
  const std::vector<Chord> seq = {Chord{Pitch::Gb, Pitch::A, Pitch::C}};
  const auto s = spell_sequence(seq);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].indices, (std::vector<int>{6, 3, 0}));
}

TEST(Spelling, MinimalRowsMatchExhaustiveSearch) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const auto pcs = random_pcs(rng, 5);
    double d = 0.0;
    auto expected = oracle::minimal_rows(pcs, &d);
    const auto m = chord_min_diameter_assignments(chord_of(pcs));
    EXPECT_NEAR(m.diameter, d, 1e-12);
    auto got = m.rows;
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(got, expected);
    // First row wins the tie-break against every other.
    for (std::size_t i = 1; i < m.rows.size(); ++i) {
      EXPECT_TRUE(spelling_precedes(chord_of(pcs), m.rows[0], m.rows[i]));
    }
  }
}

TEST(Spelling, SequenceMatchesBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<int>> pcs;
    std::vector<Chord> chords;
    const int t = len(rng);
    for (int i = 0; i < t; ++i) {
      pcs.push_back(random_pcs(rng, 4));
      chords.push_back(chord_of(pcs.back()));
    }
    double cost = 0.0;
    const auto expected = oracle::brute_spell(pcs, &cost);
    const auto got = spell_sequence(chords);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].indices, expected[i]) << "trial " << trial;
    EXPECT_NEAR(path_travel(got), cost, 1e-9);
  }
}

TEST(Spelling, WiderBeamNeverCostsMore) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Chord> chords;
    for (int i = 0; i < 12; ++i) chords.push_back(chord_of(random_pcs(rng, 5)));
    double prev = std::numeric_limits<double>::infinity();
    for (int w : {1, 2, 4, 8, 32}) {
      const double c = path_travel(spell_sequence(chords, BeamConfig{w}));
      EXPECT_LE(c, prev + 1e-9);
      prev = c;
    }
  }
}

TEST(Spelling, SingleChordSequenceHasZeroTravel) {
  const std::vector<Chord> seq = {Chord{Pitch::D, Pitch::Gb, Pitch::A}};
  const auto s = spell_sequence(seq);
  EXPECT_EQ(path_travel(s), 0.0);
  EXPECT_EQ(s[0].indices, (std::vector<int>{2, 6, 3}));
}

TEST(Spelling, ChordDedupAndBounds) {
  const Chord c{Pitch::C, Pitch::E, Pitch::C, Pitch::G, Pitch::E};
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.labels(), (std::vector<Pitch>{Pitch::C, Pitch::E, Pitch::G}));
  EXPECT_EQ(c.pitch_class_set(), (std::vector<int>{0, 4, 7}));
  EXPECT_THROW(Chord(std::vector<Pitch>{}), InputError);
  EXPECT_THROW((Chord{Pitch::C, Pitch::D, Pitch::E, Pitch::F, Pitch::G, Pitch::A}), InputError);
  EXPECT_EQ((Chord{Pitch::C, Pitch::E, Pitch::G}).transposed(2).pitch_class_set(), (std::vector<int>{2, 6, 9}));
}

TEST(Spelling, ErrorsAndConfig) {
  EXPECT_THROW(spell_sequence({}), InputError);
  const std::vector<Chord> seq = {Chord{Pitch::C}};
  EXPECT_THROW(spell_sequence(seq, BeamConfig{0}), ConfigError);
  EXPECT_EQ(spell_sequence(seq)[0].indices, (std::vector<int>{0}));
}

TEST(Spelling, TieBreakOrder) {
  const Chord c{Pitch::C, Pitch::Gb};
  // Same |k| total: lexicographic in pitch-class order picks -6 first.
  EXPECT_TRUE(spelling_precedes(c, std::vector<int>{0, -6}, std::vector<int>{0, 6}));
  EXPECT_FALSE(spelling_precedes(c, std::vector<int>{0, 6}, std::vector<int>{0, -6}));
  const Chord d{Pitch::Db, Pitch::C};
  EXPECT_TRUE(spelling_precedes(d, std::vector<int>{-5, 0}, std::vector<int>{7, 0}));
}
