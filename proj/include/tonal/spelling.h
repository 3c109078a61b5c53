/**
 * @file spelling.h
 * @brief Enharmonic spelling of chord sequences on the line of fifths.
 *
 * Each chord is first reduced to its set of minimal-diameter spellings
 * (every assignment of fifth indices whose largest pairwise distance is
 * minimal). A beam search then picks one row per chord so that the summed
 * travel of the centers of effect between consecutive chords is minimal.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tonal/spiral.h"

namespace tonal {

inline constexpr std::size_t kMaxChordSize = 5;
inline constexpr double kTieTolerance = 1e-9;

/// A chord as a set of pitch labels. Duplicates are dropped and the first
/// occurrence order is kept, so spellings line up with the caller's order.
class Chord {
 public:
  Chord() = default;
  /// Throws InputError if the deduplicated size is outside [1, 5].
  explicit Chord(std::span<const Pitch> labels);
  Chord(std::initializer_list<Pitch> labels);

  const std::vector<Pitch>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool contains(Pitch p) const;

  /// Pitch classes ascending; the identity used for histograms and ordering.
  std::vector<int> pitch_class_set() const;

  Chord transposed(int semitones) const;

  friend bool operator==(const Chord&, const Chord&) = default;

 private:
  std::vector<Pitch> labels_;
};

/// One spelled chord: fifth indices aligned with Chord::labels().
struct Spelling {
  std::vector<int> indices;
  double diameter = 0.0;
  Point3 center;
};

Spelling make_spelling(std::vector<int> indices, const SpiralParams& params = {});

/// Minimal diameter plus every assignment attaining it (within
/// kTieTolerance), ordered by the spelling tie-break.
struct MinimalSpellings {
  double diameter = 0.0;
  std::vector<std::vector<int>> rows;
};

/// Enumerates the <= 2^N candidate assignments of a chord.
MinimalSpellings chord_min_diameter_assignments(const Chord& chord, const SpiralParams& params = {});

/// Tie-break between two spellings of the same chord: smaller sum of |k|,
/// then lexicographically smaller k-vector taken in pitch-class order.
bool spelling_precedes(const Chord& chord, std::span<const int> a, std::span<const int> b);

struct BeamConfig {
  int width = 8;
  void validate() const;  ///< throws ConfigError when width < 1
};

/// Spells a whole progression. Throws InputError on an empty sequence.
std::vector<Spelling> spell_sequence(std::span<const Chord> chords, const BeamConfig& beam = {},
                                     const SpiralParams& params = {});

/// Sum over t >= 1 of the distance between consecutive centers.
double path_travel(std::span<const Spelling> spellings);

}  // namespace tonal
