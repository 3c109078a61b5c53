/**
 * @file dataset.h
 * @brief Corpus ingestion, augmentation, statistical labels and the
 *        JSON-lines dataset format.
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tonal/features.h"
#include "tonal/formats.h"
#include "tonal/recovery.h"
#include "tonal/spelling.h"

namespace tonal {

/// One beat: the soprano note sounding at the beat and the chord of every
/// pitch class sounding at its onset.
struct Slice {
  MelodyNote melody;
  Chord chord;
  bool downbeat = false;
  friend bool operator==(const Slice&, const Slice&) = default;
};

struct Score {
  std::string title;
  int beats_per_bar = 4;
  std::vector<Slice> slices;

  std::vector<Chord> chords() const;
  std::vector<MelodyNote> melody() const;
  friend bool operator==(const Score&, const Score&) = default;
};

inline constexpr double kDownbeatWeight = 1.0;
inline constexpr double kOffbeatWeight = 0.5;

/// {"title", "beats_per_bar", "slices": [{"melody": {"midi", "duration_beats"}
/// | null, "chord": [...], "downbeat": bool}]}. Missing downbeat flags follow
/// the bar grid; the weight is the beat strength unless given.
Score score_from_json(const Json& j, const std::string& fallback_title = "untitled");
Json to_json(const Score& score);

/// Beat-sliced MIDI: slices at every beat with sounding notes; drums skipped.
Score score_from_midi(std::span<const std::uint8_t> bytes, const std::string& title);

/// Dispatches on extension (.json, .mid, .midi). Throws InputError for an
/// unreadable, unknown or empty source.
Score ingest(const std::filesystem::path& path);

/// Non-overlapping (hop == window) or sliding windows of whole beats; the
/// tail shorter than a window is dropped, and a score shorter than one
/// window is returned whole. Scores under 2 beats yield nothing.
std::vector<Score> score_windows(const Score& score, int window_beats, int hop_beats);

struct AugmentConfig {
  double density_drop_prob = 0.2;
  double melodic_alteration_prob = 0.1;
  std::vector<int> transposition_steps = {-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6};
  std::uint64_t seed = 0;
  bool key_balance = true;

  void validate() const;  ///< throws ConfigError
};

/// One variant per transposition step, each with its own density drop and
/// melodic alteration draws. `stream` separates the random streams of
/// different source scores under one seed.
std::vector<Score> augment(const Score& score, const AugmentConfig& config, std::uint64_t stream = 0);

struct CurveLabels {
  double mean = 0.0;
  double std = 0.0;  ///< population
  double range = 0.0;
  std::optional<double> crossing_density_mean;    ///< null when T < 2
  std::optional<double> crossing_density_median;  ///< null when T < 2
  std::optional<double> zcr_of_gradient;          ///< null when T < 3
  std::vector<double> fft_magnitudes;             ///< min(8, T) bins
  friend bool operator==(const CurveLabels&, const CurveLabels&) = default;
};

struct SampleLabels {
  CurveLabels tension;
  CurveLabels distance;
  CurveLabels strain;
  friend bool operator==(const SampleLabels&, const SampleLabels&) = default;
};

inline constexpr std::size_t kFftBins = 8;

CurveLabels curve_labels(std::span<const double> values);
SampleLabels annotate_labels(const FeatureSequence& features);

inline constexpr int kRestToken = 128;

struct DatasetSample {
  std::string id;
  std::string title;
  std::vector<int> melody_tokens;  ///< MIDI pitch, kRestToken for a rest
  std::vector<Chord> chords;
  FeatureSequence features;
  SampleLabels labels;
  bool train = true;

  Tonality tonality() const { return features.tonality; }
  std::size_t length() const { return features.length(); }
  friend bool operator==(const DatasetSample&, const DatasetSample&) = default;
};

Json to_json(const DatasetSample& sample);
DatasetSample dataset_sample_from_json(const Json& j);

struct DatasetConfig {
  AugmentConfig augment;
  int window_beats = 16;
  int hop_beats = 16;
  std::size_t target_count = 0;  ///< 0 keeps everything after balancing
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  int beam_width = 8;
  int threads = 1;

  void validate() const;  ///< throws ConfigError
};

/// Fields not given keep their defaults; unknown fields are rejected.
DatasetConfig dataset_config_from_json(const Json& j);
Json to_json(const DatasetConfig& config);

inline constexpr double kNoiseRangeLowQuantile = 0.01;
inline constexpr double kNoiseRangeHighQuantile = 0.99;

struct Manifest {
  std::array<std::size_t, 24> counts_per_key{};
  NormStats norm_stats;          ///< over the training split
  FeatureRanges feature_ranges;  ///< empirical min/max over all samples
  /// 1st to 99th percentile over all samples; the default noise range,
  /// since min/max is set by a handful of outliers and widens with corpus
  /// size.
  FeatureRanges noise_ranges;
  std::uint64_t split_seed = 0;
  std::size_t sample_count = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t source_count = 0;
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

Json to_json(const Manifest& manifest);
Manifest manifest_from_json(const Json& j);

struct Dataset {
  std::vector<DatasetSample> samples;  ///< ordered by id
  Manifest manifest;
};

/// Windows, augments, labels, balances and splits an in-memory corpus.
/// Throws InputError for an empty corpus.
Dataset build_dataset(std::span<const Score> corpus, const DatasetConfig& config);

/// Reads every .json/.mid/.midi file under `corpus_dir` (sorted by name).
std::vector<Score> ingest_corpus(const std::filesystem::path& corpus_dir, int threads = 1);

/// Writes `out_path` (JSON lines) and the manifest next to it
/// (manifest_path_for(out_path)).
Manifest build_dataset(const std::filesystem::path& corpus_dir, const DatasetConfig& config,
                       const std::filesystem::path& out_path);

std::filesystem::path manifest_path_for(const std::filesystem::path& out_path);

void write_samples(const std::filesystem::path& path, std::span<const DatasetSample> samples);
std::vector<DatasetSample> read_samples(const std::filesystem::path& path);

/// Linear-interpolated quantile of unsorted values (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// 64-bit FNV-1a, used for ids and the split.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0);

}  // namespace tonal
