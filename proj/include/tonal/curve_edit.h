/**
 * @file curve_edit.h
 * @brief Segment edits on feature curves, as issued by the curve editor.
 */
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tonal/features.h"
#include "tonal/formats.h"

namespace tonal {

enum class EditOp { kScale, kOffset, kSetRange, kSmooth, kSetPoint };

std::string_view edit_op_name(EditOp op);
EditOp parse_edit_op(std::string_view name);  ///< throws InputError

struct CurveEdit {
  Feature target = Feature::kTension;
  EditOp op = EditOp::kScale;
  std::size_t start = 0;  ///< inclusive
  std::size_t end = 0;    ///< inclusive
  double value = 0.0;     ///< scale factor, offset, or the point value
  double lo = 0.0;        ///< set_range
  double hi = 0.0;        ///< set_range
  int window = 1;         ///< smooth; odd
};

/// Applies edits in order. Unnormalized results are clamped at 0 and keep
/// distance[0] at 0. Throws InputError for a segment outside [0, T) or an
/// even or non-positive smoothing window.
FeatureSequence edit_curve(const FeatureSequence& features, std::span<const CurveEdit> edits);

/// {"target", "op", "segment": [start, end], "value" | "lo"/"hi" | "window"}
CurveEdit curve_edit_from_json(const Json& j);
Json to_json(const CurveEdit& edit);
/// Accepts a single edit object or an array of them.
std::vector<CurveEdit> curve_edits_from_json(const Json& j);

}  // namespace tonal
