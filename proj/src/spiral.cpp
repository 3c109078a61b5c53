#include "tonal/spiral.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tonal/error.h"

namespace tonal {

namespace {

constexpr std::array<std::string_view, kPitchClassCount> kLabelNames = {
    "C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B"};

int floor_mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

// sin(k*pi/2), cos(k*pi/2) by quarter turn.
constexpr std::array<std::array<double, 2>, 4> kQuarterTurns = {{{0.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}}};

Point3 weighted(const Weights& w, const Point3& a, const Point3& b, const Point3& c) {
  return w[0] * a + w[1] * b + w[2] * c;
}

void check_weights(const Weights& w, const char* name) {
  const double sum = w[0] + w[1] + w[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(std::string("weight vector ") + name + " must sum to 1");
  }
}

}  // namespace

double Point3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

void SpiralParams::validate() const {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(height > 0.0)) throw ConfigError("height must be positive");
  check_weights(major_chord, "w");
  check_weights(minor_chord, "u");
  check_weights(major_key, "omega");
  check_weights(minor_key, "v");
  if (tau1 < 0.0 || tau1 > 1.0 || tau2 < 0.0 || tau2 > 1.0) {
    throw ConfigError("tau1 and tau2 must lie in [0, 1]");
  }
}

Pitch pitch_from_class(int pc) { return static_cast<Pitch>(floor_mod(pc, kPitchClassCount)); }

std::string_view label_name(Pitch p) { return kLabelNames[static_cast<std::size_t>(pitch_class(p))]; }

Pitch parse_label(std::string_view name) {
  if (name.empty()) throw InputError("empty pitch label");
  static constexpr std::array<int, 7> kNaturals = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = name.front();
  if (letter < 'A' || letter > 'G') {
    throw InputError("unknown pitch label '" + std::string(name) + "'");
  }
  int pc = kNaturals[static_cast<std::size_t>(letter - 'A')];
  std::string_view rest = name.substr(1);
  while (!rest.empty()) {
    if (rest.front() == 'b') {
      --pc;
      rest.remove_prefix(1);
    } else if (rest.front() == '#') {
      ++pc;
      rest.remove_prefix(1);
    } else if (rest.starts_with("♭")) {  // ♭
      --pc;
      rest.remove_prefix(3);
    } else if (rest.starts_with("♯")) {  // ♯
      ++pc;
      rest.remove_prefix(3);
    } else {
      throw InputError("unknown pitch label '" + std::string(name) + "'");
    }
  }
  return pitch_from_class(pc);
}

Pitch midi_to_label(int midi_pitch) {
  if (midi_pitch < 0 || midi_pitch > 127) {
    throw InputError("MIDI pitch out of range: " + std::to_string(midi_pitch));
  }
  return pitch_from_class(midi_pitch);
}

Pitch label_of(int k) { return pitch_from_class(7 * floor_mod(k, kPitchClassCount)); }

std::vector<int> label_candidates(Pitch label) {
  // 7 is its own inverse mod 12, so pc = 7k  <=>  k = 7pc (mod 12).
  const int k0 = floor_mod(7 * pitch_class(label), kPitchClassCount);
  std::vector<int> out;
  if (k0 - kPitchClassCount >= kMinSpellingIndex) out.push_back(k0 - kPitchClassCount);
  out.push_back(k0);
  return out;
}

Point3 pitch_coordinate(int k, const SpiralParams& params) {
  const auto& q = kQuarterTurns[static_cast<std::size_t>(floor_mod(k, 4))];
  return {params.radius * q[0], params.radius * q[1], k * params.height};
}

Point3 major_chord_coordinate(int k, const SpiralParams& params) {
  return weighted(params.major_chord, pitch_coordinate(k, params), pitch_coordinate(k + 1, params),
                  pitch_coordinate(k + 4, params));
}

Point3 minor_chord_coordinate(int k, const SpiralParams& params) {
  return weighted(params.minor_chord, pitch_coordinate(k, params), pitch_coordinate(k + 1, params),
                  pitch_coordinate(k - 3, params));
}

Point3 major_key_coordinate(int k, const SpiralParams& params) {
  return weighted(params.major_key, major_chord_coordinate(k, params),
                  major_chord_coordinate(k + 1, params), major_chord_coordinate(k - 1, params));
}

Point3 minor_key_coordinate(int k, const SpiralParams& params) {
  const double t1 = params.tau1;
  const double t2 = params.tau2;
  const Point3 dominant =
      t1 * major_chord_coordinate(k + 1, params) + (1.0 - t1) * minor_chord_coordinate(k + 1, params);
  const Point3 subdominant =
      t2 * minor_chord_coordinate(k - 1, params) + (1.0 - t2) * major_chord_coordinate(k - 1, params);
  return weighted(params.minor_key, minor_chord_coordinate(k, params), dominant, subdominant);
}

Point3 center_of_effect(std::span<const Point3> points) {
  if (points.empty()) throw InputError("center of effect of an empty point set");
  Point3 sum;
  for (const auto& p : points) sum += p;
  return (1.0 / static_cast<double>(points.size())) * sum;
}

double spelled_diameter(std::span<const int> ks, const SpiralParams& params) {
  const Point3 origin = pitch_coordinate(0, params);
  double best = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (std::size_t j = i + 1; j < ks.size(); ++j) {
      best = std::max(best, distance(pitch_coordinate(ks[i] - ks[j], params), origin));
    }
  }
  return best;
}

double cloud_diameter(std::span<const Point3> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, distance(points[i], points[j]));
    }
  }
  return best;
}

std::vector<Point3> pitch_coordinates(std::span<const int> ks, const SpiralParams& params) {
  std::vector<Point3> out;
  out.reserve(ks.size());
  for (int k : ks) out.push_back(pitch_coordinate(k, params));
  return out;
}

Tonality Tonality::from_index(int index) {
  if (index < 0 || index > 23) {
    throw InputError("tonality must lie in [0, 23], got " + std::to_string(index));
  }
  return Tonality(index);
}

Tonality Tonality::from_tonic(int tonic_pc, Mode mode) {
  return Tonality(floor_mod(tonic_pc, kPitchClassCount) + (mode == Mode::kMinor ? 12 : 0));
}

std::string Tonality::name() const {
  return std::string(label_name(pitch_from_class(tonic_pc()))) +
         (mode() == Mode::kMajor ? " major" : " minor");
}

Tonality Tonality::transposed(int semitones) const { return from_tonic(tonic_pc() + semitones, mode()); }

}  // namespace tonal
