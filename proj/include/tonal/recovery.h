/**
 * @file recovery.h
 * @brief Chord progression recovery from target feature curves.
 *
 * Per step i the cost of a candidate chord c is
 *
 *   i = 1:  a|T(c) - t_i| + g|S(c) - s_i|                   (a + g = 1)
 *   i > 1:  a|T(c) - t_i| + b|D(c_prev -> c) - d_i| + g|S(c) - s_i|
 *                                                        (a + b + g = 1)
 *
 * and the progression minimizing the summed cost is searched with a beam.
 * Candidates are (library entry, minimal-diameter spelling) pairs, so the
 * achieved tension always equals the entry's precomputed diameter. The key
 * point is tried at every fifth index spelling the tonality's tonic.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tonal/chord_library.h"
#include "tonal/features.h"

namespace tonal {

struct RecoveryConfig {
  /// Raw weights; renormalized per step to the constraints above.
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
  int beam_width = 8;
  Tonality tonality;
  int threads = 1;  ///< candidate scoring workers; results do not depend on it

  void validate() const;  ///< throws ConfigError
};

struct StepWeights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

StepWeights effective_weights(const RecoveryConfig& config, bool first_step);

struct RecoveryResult {
  std::vector<Chord> chords;
  std::vector<std::vector<int>> spellings;
  FeatureSequence achieved;
  double total_cost = 0.0;
  std::vector<double> per_step_rd;
  int tonic_k = 0;  ///< fifth index the key point was placed at
};

/// Unweighted per-step deviation; the distance term is skipped at step 0.
std::vector<double> recovery_deviation(const FeatureSequence& achieved, const FeatureSequence& targets);

/// Throws InputError for invalid or normalized-without-stats targets and
/// ConfigError for an empty library or invalid config.
RecoveryResult recover(const FeatureSequence& targets, const ChordLibrary& library,
                       const RecoveryConfig& config = {});

/// Mean over samples of the mean per-step deviation. Throws InputError on
/// an empty list or an empty sample.
double mrda(std::span<const std::vector<double>> per_step_rd);

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

struct FeatureRanges {
  FeatureRange tension;
  FeatureRange distance;
  FeatureRange strain;
  friend bool operator==(const FeatureRanges&, const FeatureRanges&) = default;
};

/// Independent uniform draws per step and feature; distance[0] is 0.
FeatureSequence random_features(const FeatureRanges& ranges, std::size_t length, std::uint64_t seed,
                                Tonality tonality = {});

}  // namespace tonal
