/**
 * @file spiral.h
 * @brief Spiral Array geometry: pitch, chord and key coordinates on the
 *        helix of fifths, and the label <-> fifth-index table.
 */
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tonal {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend Point3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
  friend bool operator==(const Point3&, const Point3&) = default;

  double norm() const;
};

double distance(const Point3& a, const Point3& b);

using Weights = std::array<double, 3>;

inline constexpr Weights kDefaultWeights = {0.5353, 0.2743, 0.1904};

/// Model constants. Defaults are the calibrated values (r = 1, h = 0.4,
/// all weight vectors equal, tau = 0.75).
struct SpiralParams {
  double radius = 1.0;
  double height = 0.4;  ///< altitude gained per fifth step
  Weights major_chord = kDefaultWeights;
  Weights minor_chord = kDefaultWeights;
  Weights major_key = kDefaultWeights;
  Weights minor_key = kDefaultWeights;
  double tau1 = 0.75;
  double tau2 = 0.75;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// The twelve flat-preferring pitch labels; the enumerator value is the
/// pitch class (C = 0).
enum class Pitch : std::uint8_t { C, Db, D, Eb, E, F, Gb, G, Ab, A, Bb, B };

inline constexpr int kPitchClassCount = 12;
inline constexpr int kMinSpellingIndex = -11;
inline constexpr int kMaxSpellingIndex = 11;

constexpr int pitch_class(Pitch p) { return static_cast<int>(p); }
Pitch pitch_from_class(int pc);  ///< any integer, reduced mod 12

std::string_view label_name(Pitch p);  ///< ASCII ("Db")
/// Accepts "C", "Db", "D♭", "C#", "C♯", and stacked accidentals ("Ebb").
Pitch parse_label(std::string_view name);

Pitch midi_to_label(int midi_pitch);

/// Label of a fifth index on the line of fifths; defined for every integer.
Pitch label_of(int k);

/// All k in [-11, 11] carrying `label`, ascending. One element for C, two
/// otherwise.
std::vector<int> label_candidates(Pitch label);

Point3 pitch_coordinate(int k, const SpiralParams& params = {});
Point3 major_chord_coordinate(int k, const SpiralParams& params = {});
Point3 minor_chord_coordinate(int k, const SpiralParams& params = {});
Point3 major_key_coordinate(int k, const SpiralParams& params = {});
Point3 minor_key_coordinate(int k, const SpiralParams& params = {});

/// Arithmetic mean. Throws InputError on an empty set.
Point3 center_of_effect(std::span<const Point3> points);

/// Maximum pairwise distance; 0 for fewer than two points.
double cloud_diameter(std::span<const Point3> points);

/// Diameter of spelled pitches computed from index differences, so the same
/// shape gives the same bits wherever it sits on the helix.
double spelled_diameter(std::span<const int> ks, const SpiralParams& params = {});

std::vector<Point3> pitch_coordinates(std::span<const int> ks, const SpiralParams& params = {});

enum class Mode : std::uint8_t { kMajor, kMinor };

/// 24-class key label: 0-11 C..B major, 12-23 C..B minor (chromatic order).
class Tonality {
 public:
  constexpr Tonality() = default;
  /// Throws InputError outside [0, 23].
  static Tonality from_index(int index);
  static Tonality from_tonic(int tonic_pc, Mode mode);

  constexpr int index() const { return index_; }
  constexpr Mode mode() const { return index_ < 12 ? Mode::kMajor : Mode::kMinor; }
  constexpr int tonic_pc() const { return index_ % 12; }
  std::string name() const;  ///< e.g. "C major", "Bb minor"

  /// Same mode, tonic moved by `semitones`.
  Tonality transposed(int semitones) const;

  friend constexpr bool operator==(Tonality, Tonality) = default;

 private:
  explicit constexpr Tonality(int index) : index_(index) {}
  int index_ = 0;
};

}  // namespace tonal
