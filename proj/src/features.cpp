#include "tonal/features.h"

#include <cmath>
#include <cstdlib>
#include <string>

#include "tonal/error.h"

namespace tonal {

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::kTension:
      return "tension";
    case Feature::kDistance:
      return "distance";
    case Feature::kStrain:
      return "strain";
  }
  return "";
}

Feature parse_feature(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  throw InputError("unknown feature '" + std::string(name) + "'");
}

std::vector<double>& FeatureSequence::curve(Feature f) {
  switch (f) {
    case Feature::kTension:
      return tension;
    case Feature::kDistance:
      return distance;
    case Feature::kStrain:
      break;
  }
  return strain;
}

const std::vector<double>& FeatureSequence::curve(Feature f) const {
  return const_cast<FeatureSequence*>(this)->curve(f);
}

void FeatureSequence::validate() const {
  const std::size_t t = tension.size();
  if (t == 0) throw InputError("feature sequence is empty");
  if (distance.size() != t || strain.size() != t) {
    throw InputError("tension, distance and strain must have equal length");
  }
  if (!melody.empty() && melody.size() != t) {
    throw InputError("melody must be empty or have one note per step");
  }
  if (!normalized && distance[0] != 0.0) throw InputError("distance[0] must be 0");
  for (Feature f : kAllFeatures) {
    for (double v : curve(f)) {
      if (!std::isfinite(v)) throw InputError(std::string(feature_name(f)) + " contains a non-finite value");
      if (!normalized && v < 0.0) {
        throw InputError(std::string(feature_name(f)) + " contains a negative value");
      }
    }
  }
}

namespace {

const FeatureStats& stats_for(const NormStats& s, Feature f) {
  switch (f) {
    case Feature::kTension:
      return s.tension;
    case Feature::kDistance:
      return s.distance;
    case Feature::kStrain:
      break;
  }
  return s.strain;
}

}  // namespace

FeatureSequence normalize(const FeatureSequence& raw, const NormStats& stats) {
  if (raw.normalized) throw InputError("feature sequence is already normalized");
  FeatureSequence out = raw;
  for (Feature f : kAllFeatures) {
    const auto& st = stats_for(stats, f);
    if (!(st.std > 0.0)) throw InputError("normalization std must be positive");
    for (double& v : out.curve(f)) v = (v - st.mean) / st.std;
  }
  out.normalized = true;
  out.norm_stats = stats;
  return out;
}

FeatureSequence denormalize(const FeatureSequence& seq) {
  if (!seq.normalized) return seq;
  if (!seq.norm_stats) throw InputError("normalized features carry no norm_stats");
  FeatureSequence out = seq;
  for (Feature f : kAllFeatures) {
    const auto& st = stats_for(*seq.norm_stats, f);
    for (double& v : out.curve(f)) v = v * st.std + st.mean;
  }
  out.normalized = false;
  return out;
}

Point3 key_coordinate(int tonic_k, Mode mode, const SpiralParams& params) {
  return mode == Mode::kMajor ? major_key_coordinate(tonic_k, params)
                              : minor_key_coordinate(tonic_k, params);
}

int canonical_tonic_index(Tonality tonality) {
  const auto candidates = label_candidates(pitch_from_class(tonality.tonic_pc()));
  int best = candidates.front();
  for (int k : candidates) {
    if (std::abs(k) < std::abs(best) || (std::abs(k) == std::abs(best) && k > best)) best = k;
  }
  return best;
}

KeyEstimate key_for_tonality(Tonality tonality, const SpiralParams& params) {
  const int k = canonical_tonic_index(tonality);
  return {tonality, key_coordinate(k, tonality.mode(), params), k};
}

double tension(std::span<const int> spelled, const SpiralParams& params) {
  return spelled_diameter(spelled, params);
}

double strain(const Point3& chord_center, const Point3& key_point) {
  return distance(chord_center, key_point);
}

KeyEstimate estimate_key(std::span<const Point3> note_points, const SpiralParams& params) {
  if (note_points.empty()) throw InputError("key estimation needs at least one pitch");
  const Point3 ce = center_of_effect(note_points);

  KeyEstimate best;
  double best_d = 0.0;
  bool have = false;
  // Visit candidates in tie-break order so that a strict improvement is
  // needed to replace an earlier one: |k| ascending, positive first, major
  // before minor.
  for (int mag = 0; mag <= kMaxSpellingIndex; ++mag) {
    for (int k : {mag, -mag}) {
      if (mag == 0 && k < 0) continue;
      for (Mode mode : {Mode::kMajor, Mode::kMinor}) {
        const Point3 kp = key_coordinate(k, mode, params);
        const double d = distance(kp, ce);
        if (!have || d < best_d - kTieTolerance) {
          best = {Tonality::from_tonic(pitch_class(label_of(k)), mode), kp, k};
          best_d = d;
          have = true;
        }
      }
    }
  }
  return best;
}

FeatureSequence features_from_spellings(std::span<const Spelling> spellings, const KeyEstimate& key) {
  FeatureSequence out;
  out.tonality = key.tonality;
  out.tension.reserve(spellings.size());
  out.distance.reserve(spellings.size());
  out.strain.reserve(spellings.size());
  for (std::size_t t = 0; t < spellings.size(); ++t) {
    out.tension.push_back(spellings[t].diameter);
    out.distance.push_back(t == 0 ? 0.0 : distance(spellings[t - 1].center, spellings[t].center));
    out.strain.push_back(strain(spellings[t].center, key.key_point));
  }
  return out;
}

Analysis analyze_chords(std::span<const Chord> chords, const BeamConfig& beam,
                        std::optional<Tonality> tonality_override,
                        std::span<const MelodyNote> melody, const SpiralParams& params) {
  if (!melody.empty() && melody.size() != chords.size()) {
    throw InputError("melody must be empty or aligned with the chords");
  }
  Analysis out;
  out.spellings = spell_sequence(chords, beam, params);
  if (tonality_override) {
    out.key = key_for_tonality(*tonality_override, params);
  } else {
    std::vector<Point3> events;
    for (std::size_t t = 0; t < out.spellings.size(); ++t) {
      for (int k : out.spellings[t].indices) events.push_back(pitch_coordinate(k, params));
      if (!melody.empty() && !melody[t].is_rest()) {
        const Pitch p = midi_to_label(melody[t].midi);
        if (!chords[t].contains(p)) {
          events.push_back(pitch_coordinate(nearest_spelling(p, out.spellings[t].center, params), params));
        }
      }
    }
    out.key = estimate_key(events, params);
  }
  out.features = features_from_spellings(out.spellings, out.key);
  return out;
}

FeatureSequence extract_features(std::span<const Chord> chords, const BeamConfig& beam,
                                 std::optional<Tonality> tonality_override, const SpiralParams& params) {
  return analyze_chords(chords, beam, tonality_override, {}, params).features;
}

int nearest_spelling(Pitch pitch, const Point3& center, const SpiralParams& params) {
  int best = 0;
  double best_d = 0.0;
  bool have = false;
  for (int k : label_candidates(pitch)) {
    const double d = distance(pitch_coordinate(k, params), center);
    if (!have || d < best_d - kTieTolerance ||
        (d <= best_d + kTieTolerance && std::abs(k) < std::abs(best))) {
      best = k;
      best_d = d;
      have = true;
    }
  }
  return best;
}

}  // namespace tonal
