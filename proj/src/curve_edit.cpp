#include "tonal/curve_edit.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tonal/error.h"

namespace tonal {

namespace {

void smooth(std::vector<double>& v, std::size_t start, std::size_t end, int window) {
  const std::vector<double> src = v;
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto last = static_cast<std::ptrdiff_t>(src.size()) - 1;
  for (std::size_t i = start; i <= end; ++i) {
    double sum = 0.0;
    for (std::ptrdiff_t o = -half; o <= half; ++o) {
      const auto idx = std::clamp(static_cast<std::ptrdiff_t>(i) + o, std::ptrdiff_t{0}, last);
      sum += src[static_cast<std::size_t>(idx)];
    }
    v[i] = sum / static_cast<double>(window);
  }
}

double json_number(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_number()) throw InputError(std::string("edit needs a numeric \"") + name + "\"");
  return it->get<double>();
}

}  // namespace

std::string_view edit_op_name(EditOp op) {
  switch (op) {
    case EditOp::kScale:
      return "scale";
    case EditOp::kOffset:
      return "offset";
    case EditOp::kSetRange:
      return "set_range";
    case EditOp::kSmooth:
      return "smooth";
    case EditOp::kSetPoint:
      return "set_point";
  }
  return "scale";
}

EditOp parse_edit_op(std::string_view name) {
  for (EditOp op : {EditOp::kScale, EditOp::kOffset, EditOp::kSetRange, EditOp::kSmooth, EditOp::kSetPoint}) {
    if (edit_op_name(op) == name) return op;
  }
  throw InputError("unknown edit op \"" + std::string(name) + "\"");
}

FeatureSequence edit_curve(const FeatureSequence& features, std::span<const CurveEdit> edits) {
  FeatureSequence out = features;
  const std::size_t n = out.length();
  for (const auto& e : edits) {
    if (e.start > e.end || e.end >= n) {
      throw InputError("edit segment [" + std::to_string(e.start) + ", " + std::to_string(e.end) +
                       "] is outside a curve of length " + std::to_string(n));
    }
    auto& v = out.curve(e.target);
    switch (e.op) {
      case EditOp::kScale:
        for (std::size_t i = e.start; i <= e.end; ++i) v[i] *= e.value;
        break;
      case EditOp::kOffset:
        for (std::size_t i = e.start; i <= e.end; ++i) v[i] += e.value;
        break;
      case EditOp::kSetRange: {
        const auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(e.start),
                                                  v.begin() + static_cast<std::ptrdiff_t>(e.end) + 1);
        const double lo = *mn;
        const double span = *mx - lo;
        for (std::size_t i = e.start; i <= e.end; ++i) {
          // a flat segment maps to the middle of the target range
          v[i] = span > 0.0 ? e.lo + (v[i] - lo) / span * (e.hi - e.lo) : (e.lo + e.hi) / 2.0;
        }
        break;
      }
      case EditOp::kSmooth:
        if (e.window < 1 || e.window % 2 == 0) throw InputError("smooth window must be odd and >= 1");
        smooth(v, e.start, e.end, e.window);
        break;
      case EditOp::kSetPoint:
        for (std::size_t i = e.start; i <= e.end; ++i) v[i] = e.value;
        break;
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw InputError("edit produced a non-finite value");
    }
  }
  if (!out.normalized) {
    for (Feature f : kAllFeatures) {
      for (double& x : out.curve(f)) x = std::max(0.0, x);
    }
    if (n > 0) out.distance[0] = 0.0;
  }
  return out;
}

CurveEdit curve_edit_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("an edit must be a JSON object");
  CurveEdit e;
  if (!j.contains("target") || !j["target"].is_string()) throw InputError("edit needs a string \"target\"");
  e.target = parse_feature(j["target"].get<std::string>());
  if (!j.contains("op") || !j["op"].is_string()) throw InputError("edit needs a string \"op\"");
  e.op = parse_edit_op(j["op"].get<std::string>());
  const auto& seg = j.contains("segment") ? j["segment"] : Json();
  if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number_integer() || !seg[1].is_number_integer()) {
    throw InputError("edit needs \"segment\": [start, end]");
  }
  if (seg[0].get<long long>() < 0 || seg[1].get<long long>() < 0) throw InputError("edit segment is negative");
  e.start = seg[0].get<std::size_t>();
  e.end = seg[1].get<std::size_t>();
  switch (e.op) {
    case EditOp::kScale:
    case EditOp::kOffset:
    case EditOp::kSetPoint:
      e.value = json_number(j, "value");
      break;
    case EditOp::kSetRange:
      e.lo = json_number(j, "lo");
      e.hi = json_number(j, "hi");
      break;
    case EditOp::kSmooth:
      if (!j.contains("window") || !j["window"].is_number_integer()) throw InputError("smooth needs \"window\"");
      e.window = j["window"].get<int>();
      break;
  }
  return e;
}

Json to_json(const CurveEdit& e) {
  Json j;
  j["target"] = feature_name(e.target);
  j["op"] = edit_op_name(e.op);
  j["segment"] = {e.start, e.end};
  switch (e.op) {
    case EditOp::kSetRange:
      j["lo"] = e.lo;
      j["hi"] = e.hi;
      break;
    case EditOp::kSmooth:
      j["window"] = e.window;
      break;
    default:
      j["value"] = e.value;
  }
  return j;
}

std::vector<CurveEdit> curve_edits_from_json(const Json& j) {
  std::vector<CurveEdit> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(curve_edit_from_json(e));
  } else {
    out.push_back(curve_edit_from_json(j));
  }
  return out;
}

}  // namespace tonal
