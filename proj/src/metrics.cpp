#include "tonal/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "tonal/error.h"

namespace tonal {

double mean_cc(std::span<const Chord> chords) {
  if (chords.empty()) throw InputError("chord coverage needs at least one chord");
  std::set<std::vector<int>> distinct;
  for (const auto& c : chords) distinct.insert(c.pitch_class_set());
  return static_cast<double>(distinct.size()) / static_cast<double>(chords.size());
}

double che(std::span<const Chord> chords) {
  if (chords.empty()) throw InputError("chord histogram entropy needs at least one chord");
  std::map<std::vector<int>, int> histogram;
  for (const auto& c : chords) ++histogram[c.pitch_class_set()];
  const double n = static_cast<double>(chords.size());
  double h = 0.0;
  for (const auto& [set, count] : histogram) {
    const double p = count / n;
    h -= p * std::log(p);
  }
  return h;
}

double mctd(std::span<const MelodyNote> melody, std::span<const Chord> chords,
            std::span<const std::vector<int>> spellings, const SpiralParams& params) {
  if (melody.size() != chords.size() || spellings.size() != chords.size()) {
    throw InputError("melody, chords and spellings must be aligned");
  }
  if (chords.empty()) throw InputError("MCTD needs at least one step");
  double weighted = 0.0;
  double total_weight = 0.0;
  for (std::size_t t = 0; t < chords.size(); ++t) {
    const auto& note = melody[t];
    if (note.is_rest()) continue;
    if (spellings[t].size() != chords[t].size()) throw InputError("spelling does not match its chord");
    const Pitch p = midi_to_label(note.midi);

    std::vector<Point3> accompaniment;
    for (std::size_t i = 0; i < chords[t].size(); ++i) {
      if (chords[t].labels()[i] != p) accompaniment.push_back(pitch_coordinate(spellings[t][i], params));
    }
    if (accompaniment.empty()) accompaniment = pitch_coordinates(spellings[t], params);
    const Point3 center = center_of_effect(accompaniment);
    const double d = distance(pitch_coordinate(nearest_spelling(p, center, params), params), center);

    const double w = note.duration_beats > 0.0 ? note.duration_beats : 0.0;
    weighted += w * d;
    total_weight += w;
  }
  return total_weight > 0.0 ? weighted / total_weight : 0.0;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double srcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("SRCC inputs differ in length");
  if (a.size() < 2) throw InputError("SRCC needs at least two values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw InputError("SRCC is undefined for a constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

PieceMetrics piece_metrics(std::span<const Chord> chords, std::span<const std::vector<int>> spellings,
                           std::span<const MelodyNote> melody, const SpiralParams& params) {
  PieceMetrics m;
  m.cc = mean_cc(chords);
  m.che = che(chords);
  if (!melody.empty()) m.mctd = mctd(melody, chords, spellings, params);
  return m;
}

SrccByFeature feature_srcc(const FeatureSequence& target, const FeatureSequence& achieved) {
  auto one = [](const std::vector<double>& a, const std::vector<double>& b) -> std::optional<double> {
    try {
      return srcc(a, b);
    } catch (const InputError&) {
      return std::nullopt;
    }
  };
  return {one(target.tension, achieved.tension), one(target.distance, achieved.distance),
          one(target.strain, achieved.strain)};
}

Interval confidence_interval_95(std::span<const double> values) {
  if (values.empty()) throw InputError("confidence interval of no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, mean, mean};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

}  // namespace tonal
