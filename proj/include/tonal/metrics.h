/**
 * @file metrics.h
 * @brief Harmonization metrics: chord coverage, chord histogram entropy,
 *        melody-chord tonal distance in the Spiral Array, and Spearman rank
 *        correlation between feature curves.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tonal/features.h"
#include "tonal/spelling.h"

namespace tonal {

/// Distinct pitch-class sets divided by the number of chords.
double mean_cc(std::span<const Chord> chords);

/// Shannon entropy (natural log) of the pitch-class-set histogram.
double che(std::span<const Chord> chords);

/// Duration-weighted mean distance between each melody note and the center
/// of the chord tones sounding with it. The melody's own pitch class is left
/// out of that center unless it is the chord's only tone; the melody note is
/// spelled at whichever candidate lies closer (tie: smaller |k|). Rests are
/// skipped. Throws InputError on misaligned input.
double mctd(std::span<const MelodyNote> melody, std::span<const Chord> chords,
            std::span<const std::vector<int>> spellings, const SpiralParams& params = {});

/// Pearson correlation of average ranks. Throws InputError for length < 2,
/// unequal lengths, or a constant input.
double srcc(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based), ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct SrccByFeature {
  std::optional<double> tension;
  std::optional<double> distance;
  std::optional<double> strain;
};

struct MetricReport {
  double mean_cc = 0.0;
  double che = 0.0;
  double mctd = 0.0;
  std::optional<SrccByFeature> srcc;
  std::size_t sample_count = 0;
};

/// One piece: chords, their spellings, and an optional aligned melody.
struct PieceMetrics {
  double cc = 0.0;
  double che = 0.0;
  std::optional<double> mctd;
};

PieceMetrics piece_metrics(std::span<const Chord> chords, std::span<const std::vector<int>> spellings,
                           std::span<const MelodyNote> melody, const SpiralParams& params = {});

/// Per-feature SRCC between target and achieved curves; a feature is left
/// empty when its correlation is undefined (constant curve).
SrccByFeature feature_srcc(const FeatureSequence& target, const FeatureSequence& achieved);

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean with a two-sided 95% Student-t interval; zero width for one value.
Interval confidence_interval_95(std::span<const double> values);

}  // namespace tonal
