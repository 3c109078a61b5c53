/**
 * @file api.h
 * @brief Request-level operations shared by the command line and the HTTP
 *        service, so both produce byte-identical documents for the same
 *        logical input.
 */
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tonal/chord_library.h"
#include "tonal/dataset.h"
#include "tonal/formats.h"
#include "tonal/metrics.h"
#include "tonal/recovery.h"

namespace tonal::api {

/// Read-only state loaded once: the default chord library and, optionally,
/// a dataset manifest.
class Context {
 public:
  Context();
  explicit Context(std::optional<Json> manifest);

  /// The default (2..5 notes, unfiltered) library is shared; any other
  /// filter builds a fresh one.
  std::shared_ptr<const ChordLibrary> library(const LibraryFilter& filter) const;
  const std::optional<Json>& manifest() const { return manifest_; }

 private:
  std::shared_ptr<const ChordLibrary> default_library_;
  std::optional<Json> manifest_;
};

/// Score JSON ({"slices": ...}) or {"chords": [...], "melody"?: [...]}.
/// Emits the feature document, melody included when present.
Json analyze(const Json& input, int beam_width = 8, std::optional<Tonality> tonality = std::nullopt);

/// Chord list -> k-index arrays.
Json spell(const Json& chords, int beam_width = 8);

struct RecoverRequest {
  FeatureSequence features;
  RecoveryConfig config;
  LibraryFilter filter;
};

/// A bare feature document, or {"features": doc, "config": {"tonality",
/// "alpha", "beta", "gamma", "beam_width", "threads", "filter"}}; "filter"
/// is the LibraryFilter string or an object with min_notes, max_notes,
/// quality and contains. The tonality defaults to the document's.
RecoverRequest recover_request_from_json(const Json& body);

RecoveryResult recover(const RecoverRequest& request, const Context& context);

/// Block-chord voicing for MIDI output: the lowest fifth index sounds first
/// at 60 + pitch class, each further tone stacked just above the previous.
std::vector<std::vector<int>> block_voicing(const RecoveryResult& result);

/// {"features": doc, "edits": [...]}.
Json edit(const Json& body);

/// One evaluated piece: chords, optional aligned melody, optional target
/// curves for SRCC.
struct EvalPiece {
  std::vector<Chord> chords;
  std::vector<MelodyNote> melody;
  std::optional<FeatureSequence> target;
};

/// {"pieces": [{"chords", "melody"?, "features"?}, ...], "runs"?: N} or a
/// single piece object.
std::vector<EvalPiece> eval_pieces_from_json(const Json& body);

struct EvalOptions {
  std::size_t runs = 0;  ///< 0: every piece is its own run
  int beam_width = 8;
};

/// Per-piece metrics averaged per run (pieces assigned round-robin), then
/// mean and 95% t-interval over the run means.
Json evaluate(const std::vector<EvalPiece>& pieces, const EvalOptions& options = {});

/// JSON lines, one entry per line.
std::string library_jsonl(const ChordLibrary& library);

/// Uniform noise curves from a manifest; `minmax` selects feature_ranges
/// instead of noise_ranges.
FeatureSequence noise(const Manifest& manifest, std::size_t length, std::uint64_t seed, Tonality tonality,
                      bool minmax = false);

}  // namespace tonal::api
