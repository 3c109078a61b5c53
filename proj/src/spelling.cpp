#include "tonal/spelling.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "tonal/error.h"

namespace tonal {

namespace {

// k-vector reordered by ascending pitch class of the chord labels.
std::vector<int> canonical_order(const Chord& chord, std::span<const int> ks) {
  std::vector<std::size_t> order(chord.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pitch_class(chord.labels()[a]) < pitch_class(chord.labels()[b]);
  });
  std::vector<int> out;
  out.reserve(ks.size());
  for (std::size_t i : order) out.push_back(ks[i]);
  return out;
}

int abs_sum(std::span<const int> ks) {
  int s = 0;
  for (int k : ks) s += std::abs(k);
  return s;
}

struct PathState {
  std::vector<std::size_t> rows;  // chosen row per step
  double cost = 0.0;
  int abs_total = 0;
  std::vector<int> lex;  // canonical k's of all steps, concatenated
};

bool path_precedes(const PathState& a, const PathState& b) {
  if (a.cost < b.cost - kTieTolerance) return true;
  if (a.cost > b.cost + kTieTolerance) return false;
  if (a.abs_total != b.abs_total) return a.abs_total < b.abs_total;
  return a.lex < b.lex;
}

// Keeps `beam` sorted by path_precedes and at most `width` long. Insertion
// is stable, so the outcome only depends on the candidate order.
void offer(std::vector<PathState>& beam, PathState candidate, std::size_t width) {
  auto pos = std::find_if(beam.begin(), beam.end(),
                          [&](const PathState& s) { return path_precedes(candidate, s); });
  if (pos == beam.end() && beam.size() >= width) return;
  beam.insert(pos, std::move(candidate));
  if (beam.size() > width) beam.pop_back();
}

}  // namespace

Chord::Chord(std::span<const Pitch> labels) {
  for (Pitch p : labels) {
    if (std::find(labels_.begin(), labels_.end(), p) == labels_.end()) labels_.push_back(p);
  }
  if (labels_.empty() || labels_.size() > kMaxChordSize) {
    throw InputError("chord must contain between 1 and 5 distinct pitch labels, got " +
                     std::to_string(labels_.size()));
  }
}

Chord::Chord(std::initializer_list<Pitch> labels)
    : Chord(std::span<const Pitch>(labels.begin(), labels.size())) {}

bool Chord::contains(Pitch p) const {
  return std::find(labels_.begin(), labels_.end(), p) != labels_.end();
}

std::vector<int> Chord::pitch_class_set() const {
  std::vector<int> pcs;
  pcs.reserve(labels_.size());
  for (Pitch p : labels_) pcs.push_back(pitch_class(p));
  std::sort(pcs.begin(), pcs.end());
  return pcs;
}

Chord Chord::transposed(int semitones) const {
  std::vector<Pitch> out;
  out.reserve(labels_.size());
  for (Pitch p : labels_) out.push_back(pitch_from_class(pitch_class(p) + semitones));
  return Chord(out);
}

Spelling make_spelling(std::vector<int> indices, const SpiralParams& params) {
  const auto points = pitch_coordinates(indices, params);
  Spelling s;
  s.diameter = spelled_diameter(indices, params);
  s.center = center_of_effect(points);
  s.indices = std::move(indices);
  return s;
}

bool spelling_precedes(const Chord& chord, std::span<const int> a, std::span<const int> b) {
  const int sa = abs_sum(a);
  const int sb = abs_sum(b);
  if (sa != sb) return sa < sb;
  return canonical_order(chord, a) < canonical_order(chord, b);
}

MinimalSpellings chord_min_diameter_assignments(const Chord& chord, const SpiralParams& params) {
  const auto& labels = chord.labels();
  std::vector<std::vector<int>> candidates;
  candidates.reserve(labels.size());
  for (Pitch p : labels) candidates.push_back(label_candidates(p));

  MinimalSpellings out;
  bool first = true;
  std::vector<std::size_t> choice(labels.size(), 0);
  std::vector<int> row(labels.size());
  while (true) {
    for (std::size_t i = 0; i < labels.size(); ++i) row[i] = candidates[i][choice[i]];
    const double d = spelled_diameter(row, params);
    if (first || d < out.diameter - kTieTolerance) {
      out.diameter = d;
      out.rows.assign(1, row);
      first = false;
    } else if (d <= out.diameter + kTieTolerance) {
      out.rows.push_back(row);
    }
    // odometer increment
    std::size_t i = 0;
    while (i < labels.size() && ++choice[i] == candidates[i].size()) choice[i++] = 0;
    if (i == labels.size()) break;
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [&](const auto& a, const auto& b) { return spelling_precedes(chord, a, b); });
  return out;
}

void BeamConfig::validate() const {
  if (width < 1) throw ConfigError("beam width must be at least 1");
}

std::vector<Spelling> spell_sequence(std::span<const Chord> chords, const BeamConfig& beam,
                                     const SpiralParams& params) {
  beam.validate();
  if (chords.empty()) throw InputError("cannot spell an empty chord sequence");
  const auto width = static_cast<std::size_t>(beam.width);

  struct StepRows {
    std::vector<Spelling> spellings;
    std::vector<std::vector<int>> canonical;
    std::vector<int> abs_sums;
  };
  std::vector<StepRows> steps(chords.size());
  for (std::size_t t = 0; t < chords.size(); ++t) {
    for (auto& row : chord_min_diameter_assignments(chords[t], params).rows) {
      steps[t].canonical.push_back(canonical_order(chords[t], row));
      steps[t].abs_sums.push_back(abs_sum(row));
      steps[t].spellings.push_back(make_spelling(std::move(row), params));
    }
  }

  std::vector<PathState> current;
  for (std::size_t r = 0; r < steps[0].spellings.size(); ++r) {
    offer(current, PathState{{r}, 0.0, steps[0].abs_sums[r], steps[0].canonical[r]}, width);
  }

  for (std::size_t t = 1; t < steps.size(); ++t) {
    std::vector<PathState> next;
    const auto& step = steps[t];
    for (std::size_t r = 0; r < step.spellings.size(); ++r) {
      // Recombine: only the best predecessor of each row can lie on an
      // optimal path through that row.
      const PathState* best = nullptr;
      double best_cost = 0.0;
      for (const auto& state : current) {
        const auto& prev = steps[t - 1].spellings[state.rows.back()];
        const double c = state.cost + distance(prev.center, step.spellings[r].center);
        bool take = best == nullptr || c < best_cost - kTieTolerance;
        if (!take && c <= best_cost + kTieTolerance) {
          take = state.abs_total != best->abs_total ? state.abs_total < best->abs_total
                                                     : state.lex < best->lex;
        }
        if (take) {
          best = &state;
          best_cost = c;
        }
      }
      PathState extended = *best;
      extended.rows.push_back(r);
      extended.cost = best_cost;
      extended.abs_total += step.abs_sums[r];
      extended.lex.insert(extended.lex.end(), step.canonical[r].begin(), step.canonical[r].end());
      offer(next, std::move(extended), width);
    }
    current = std::move(next);
  }

  std::vector<Spelling> out;
  out.reserve(chords.size());
  const auto& winner = current.front();
  for (std::size_t t = 0; t < steps.size(); ++t) out.push_back(steps[t].spellings[winner.rows[t]]);
  return out;
}

double path_travel(std::span<const Spelling> spellings) {
  double total = 0.0;
  for (std::size_t t = 1; t < spellings.size(); ++t) {
    total += distance(spellings[t - 1].center, spellings[t].center);
  }
  return total;
}

}  // namespace tonal
