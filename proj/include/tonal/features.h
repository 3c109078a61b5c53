/**
 * @file features.h
 * @brief Tension, distance and strain curves of a spelled progression, and
 *        nearest-key estimation on the Spiral Array.
 */
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tonal/spelling.h"
#include "tonal/spiral.h"

namespace tonal {

inline constexpr int kRest = -1;

/// Melody note attached to one chord step. midi == kRest marks a rest.
struct MelodyNote {
  int midi = kRest;
  double duration_beats = 1.0;
  double weight = 1.0;

  bool is_rest() const { return midi == kRest; }
  friend bool operator==(const MelodyNote&, const MelodyNote&) = default;
};

struct FeatureStats {
  double mean = 0.0;
  double std = 1.0;
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

struct NormStats {
  FeatureStats tension;
  FeatureStats distance;
  FeatureStats strain;
  friend bool operator==(const NormStats&, const NormStats&) = default;
};

enum class Feature { kTension, kDistance, kStrain };
inline constexpr std::array<Feature, 3> kAllFeatures = {Feature::kTension, Feature::kDistance,
                                                        Feature::kStrain};
std::string_view feature_name(Feature f);
Feature parse_feature(std::string_view name);  ///< throws InputError

/// Aligned per-step feature curves plus the piece's 24-class tonality.
struct FeatureSequence {
  std::vector<double> tension;
  std::vector<double> distance;
  std::vector<double> strain;
  Tonality tonality;
  bool normalized = false;
  std::optional<NormStats> norm_stats;
  std::vector<MelodyNote> melody;  ///< empty, or one note per step

  std::size_t length() const { return tension.size(); }
  std::vector<double>& curve(Feature f);
  const std::vector<double>& curve(Feature f) const;

  /// Throws InputError when lengths disagree, T == 0, a value is not finite,
  /// or an unnormalized value is negative or distance[0] != 0.
  void validate() const;

  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;
};

/// z-scores each curve with `stats` (sets normalized and norm_stats).
FeatureSequence normalize(const FeatureSequence& raw, const NormStats& stats);
/// Inverse of normalize(); identity for unnormalized input. Throws InputError
/// when the sequence is normalized but carries no stats.
FeatureSequence denormalize(const FeatureSequence& seq);

struct KeyEstimate {
  Tonality tonality;
  Point3 key_point;
  int tonic_k = 0;
};

/// Key coordinate for a fifth-index tonic in the given mode.
Point3 key_coordinate(int tonic_k, Mode mode, const SpiralParams& params = {});

/// Tonic spelling used when a 24-class label has to be placed on the helix:
/// the candidate with smaller |k|, the positive one on a tie (+6).
int canonical_tonic_index(Tonality tonality);
KeyEstimate key_for_tonality(Tonality tonality, const SpiralParams& params = {});

double tension(std::span<const int> spelled, const SpiralParams& params = {});
double strain(const Point3& chord_center, const Point3& key_point);

/// Nearest of the 46 key candidates (both modes, tonic k in [-11, 11]) to
/// the mean of all note-event points. Ties: smaller |tonic k|, positive k,
/// major before minor. Throws InputError on an empty point list.
KeyEstimate estimate_key(std::span<const Point3> note_points, const SpiralParams& params = {});

/// Everything computed while extracting features, for callers that also
/// need the spelling or the key.
struct Analysis {
  std::vector<Spelling> spellings;
  KeyEstimate key;
  FeatureSequence features;
};

/// Features from already spelled chords against a fixed key.
FeatureSequence features_from_spellings(std::span<const Spelling> spellings, const KeyEstimate& key);

/// Spells the progression, estimates the key from every chord note event
/// unless `tonality_override` is given, and computes the three curves.
/// Melody notes (empty, or one per chord) enter the key estimate only when
/// their pitch class is not already part of the chord they sound over.
Analysis analyze_chords(std::span<const Chord> chords, const BeamConfig& beam = {},
                        std::optional<Tonality> tonality_override = std::nullopt,
                        std::span<const MelodyNote> melody = {}, const SpiralParams& params = {});

FeatureSequence extract_features(std::span<const Chord> chords, const BeamConfig& beam = {},
                                 std::optional<Tonality> tonality_override = std::nullopt,
                                 const SpiralParams& params = {});

/// Spelling of a single melody pitch class nearest to `center`
/// (tie: smaller |k|).
int nearest_spelling(Pitch pitch, const Point3& center, const SpiralParams& params = {});

}  // namespace tonal
