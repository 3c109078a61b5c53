/**
 * @file formats.h
 * @brief JSON documents exchanged by the CLI, the service and the dataset
 *        files: feature files, recovery output, chord lists, library lines
 *        and metric reports.
 *
 * Readers are strict: a missing field, a wrong type or a broken invariant
 * raises InputError naming the offending field.
 */
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tonal/chord_library.h"
#include "tonal/features.h"
#include "tonal/metrics.h"
#include "tonal/recovery.h"

namespace tonal {

using Json = nlohmann::ordered_json;

inline constexpr int kFeatureFormatVersion = 1;

Json to_json(const MelodyNote& note);
MelodyNote melody_note_from_json(const Json& j);

Json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const Json& j);

/// {"version": 1, "tonality", "length", "tension", "distance", "strain",
///  "normalized", "norm_stats"?, "melody"?}
Json to_json(const FeatureSequence& features);
FeatureSequence features_from_json(const Json& j);

/// Array of chords; each chord is an array of label strings or MIDI ints.
std::vector<Chord> chords_from_json(const Json& j);
Json chords_to_json(std::span<const Chord> chords);
Json spellings_to_json(std::span<const std::vector<int>> spellings);
Json spellings_to_json(std::span<const Spelling> spellings);

Json to_json(const RecoveryResult& result);

/// {"set": [...], "quality": "...", "root": "..." | null, "min_diameter": real}
Json to_json(const ChordEntry& entry);

Json to_json(const Interval& interval);
Json to_json(const MetricReport& report);

Json to_json(const FeatureRanges& ranges);
FeatureRanges feature_ranges_from_json(const Json& j);

/// Tonality from an integer 0-23 or a name such as "F# minor". Throws
/// ConfigError, since tonality is always a user-facing setting here.
Tonality tonality_from_json(const Json& j);

/// Parses JSON text; malformed text becomes InputError.
Json parse_json(std::string_view text);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Compact JSON with a trailing newline; doubles print in shortest
/// round-trip form, so reading the text back is bit-exact.
std::string dump(const Json& j);

}  // namespace tonal
