/**
 * @file chord_library.h
 * @brief The recovery search space: every pitch-class set of one to five
 *        notes, tagged by interval template and with its minimal-diameter
 *        spellings precomputed.
 */
#pragma once

#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "tonal/spelling.h"
#include "tonal/spiral.h"

namespace tonal {

enum class Quality {
  kMajor,
  kMinor,
  kDiminished,
  kAugmented,
  kSuspended,
  kMajor7,
  kMinor7,
  kDominant7,
  kDiminished7,
  kHalfDiminished7,
  kOther,
};

std::string_view quality_name(Quality q);  ///< "maj", "min", ..., "half-dim7", "other"
Quality parse_quality(std::string_view name);

struct Classification {
  Quality quality = Quality::kOther;
  std::optional<Pitch> root;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Exact interval-template match. Roots are tried in ascending pitch-class
/// order among the set's members, templates in enumeration order.
Classification classify(std::span<const Pitch> pitch_class_set);

struct ChordEntry {
  Chord chord;  ///< labels in ascending pitch-class order
  Classification classification;
  double min_diameter = 0.0;
  std::vector<Spelling> spellings;  ///< the minimal-diameter set, tie-break order
};

struct LibraryFilter {
  int min_notes = 2;
  int max_notes = 5;
  std::optional<std::set<Quality>> quality_allowlist;
  std::vector<Pitch> must_contain;

  void validate() const;  ///< throws ConfigError

  /// "min=3,max=4,quality=maj|min,contains=C|E"; empty string = defaults.
  static LibraryFilter parse(std::string_view spec);

  friend bool operator==(const LibraryFilter&, const LibraryFilter&) = default;
};

class ChordLibrary {
 public:
  /// Enumerates sets in size-ascending, then lexicographic pitch-class order.
  static ChordLibrary build(const LibraryFilter& filter = {}, const SpiralParams& params = {});

  std::span<const ChordEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const SpiralParams& params() const { return params_; }

 private:
  std::vector<ChordEntry> entries_;
  SpiralParams params_;
};

}  // namespace tonal
