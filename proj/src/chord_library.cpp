#include "tonal/chord_library.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <string>

#include "tonal/error.h"

namespace tonal {

namespace {

struct Template {
  Quality quality;
  std::vector<int> intervals;  // semitones above the root, ascending
};

const std::vector<Template>& templates() {
  static const std::vector<Template> kTemplates = {
      {Quality::kMajor, {0, 4, 7}},          {Quality::kMinor, {0, 3, 7}},
      {Quality::kDiminished, {0, 3, 6}},     {Quality::kAugmented, {0, 4, 8}},
      {Quality::kSuspended, {0, 5, 7}},      {Quality::kMajor7, {0, 4, 7, 11}},
      {Quality::kMinor7, {0, 3, 7, 10}},     {Quality::kDominant7, {0, 4, 7, 10}},
      {Quality::kDiminished7, {0, 3, 6, 9}}, {Quality::kHalfDiminished7, {0, 3, 6, 10}},
  };
  return kTemplates;
}

constexpr std::array<std::string_view, 11> kQualityNames = {
    "maj", "min", "dim", "aug", "sus", "maj7", "min7", "dom7", "dim7", "half-dim7", "other"};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("expected an integer in library filter, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view quality_name(Quality q) { return kQualityNames[static_cast<std::size_t>(q)]; }

Quality parse_quality(std::string_view name) {
  for (std::size_t i = 0; i < kQualityNames.size(); ++i) {
    if (kQualityNames[i] == name) return static_cast<Quality>(i);
  }
  throw ConfigError("unknown chord quality '" + std::string(name) + "'");
}

Classification classify(std::span<const Pitch> pitch_class_set) {
  std::vector<int> pcs;
  for (Pitch p : pitch_class_set) pcs.push_back(pitch_class(p));
  std::sort(pcs.begin(), pcs.end());
  pcs.erase(std::unique(pcs.begin(), pcs.end()), pcs.end());

  for (int root : pcs) {
    std::vector<int> intervals;
    for (int pc : pcs) intervals.push_back((pc - root + 12) % 12);
    std::sort(intervals.begin(), intervals.end());
    for (const auto& t : templates()) {
      if (t.intervals == intervals) return {t.quality, pitch_from_class(root)};
    }
  }
  return {};
}

void LibraryFilter::validate() const {
  if (min_notes < 1 || max_notes > static_cast<int>(kMaxChordSize) || min_notes > max_notes) {
    throw ConfigError("library bounds must satisfy 1 <= min_notes <= max_notes <= 5");
  }
}

LibraryFilter LibraryFilter::parse(std::string_view spec) {
  LibraryFilter f;
  if (spec.empty()) return f;
  for (auto item : split(spec, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("library filter items look like key=value, got '" + std::string(item) + "'");
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "min") {
      f.min_notes = parse_int(value);
    } else if (key == "max") {
      f.max_notes = parse_int(value);
    } else if (key == "quality") {
      std::set<Quality> allow;
      for (auto q : split(value, '|')) allow.insert(parse_quality(q));
      f.quality_allowlist = std::move(allow);
    } else if (key == "contains") {
      for (auto p : split(value, '|')) {
        try {
          f.must_contain.push_back(parse_label(p));
        } catch (const InputError& e) {
          throw ConfigError(e.what());
        }
      }
    } else {
      throw ConfigError("unknown library filter key '" + std::string(key) + "'");
    }
  }
  f.validate();
  return f;
}

ChordLibrary ChordLibrary::build(const LibraryFilter& filter, const SpiralParams& params) {
  filter.validate();
  params.validate();
  ChordLibrary lib;
  lib.params_ = params;

  for (int n = filter.min_notes; n <= filter.max_notes; ++n) {
    // Lexicographic n-subsets of {0..11}.
    std::vector<int> comb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::vector<Pitch> labels;
      for (int pc : comb) labels.push_back(pitch_from_class(pc));

      const bool has_required =
          std::all_of(filter.must_contain.begin(), filter.must_contain.end(), [&](Pitch p) {
            return std::find(labels.begin(), labels.end(), p) != labels.end();
          });
      Classification cls = classify(labels);
      const bool quality_ok =
          !filter.quality_allowlist || filter.quality_allowlist->contains(cls.quality);
      if (has_required && quality_ok) {
        ChordEntry entry{Chord(labels), cls, 0.0, {}};
        auto minimal = chord_min_diameter_assignments(entry.chord, params);
        entry.min_diameter = minimal.diameter;
        for (auto& row : minimal.rows) entry.spellings.push_back(make_spelling(std::move(row), params));
        lib.entries_.push_back(std::move(entry));
      }

      int i = n - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == 12 - n + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return lib;
}

}  // namespace tonal
