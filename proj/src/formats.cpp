#include "tonal/formats.h"

#include <fstream>
#include <sstream>

#include "tonal/error.h"

namespace tonal {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<double> number_array(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Json stats_json(const FeatureStats& s) { return {{"mean", s.mean}, {"std", s.std}}; }

FeatureStats stats_from(const Json& j) {
  return {number(field(j, "mean"), "norm_stats mean"), number(field(j, "std"), "norm_stats std")};
}

Pitch pitch_from_json(const Json& j) {
  if (j.is_string()) return parse_label(j.get<std::string>());
  if (j.is_number_integer()) return midi_to_label(j.get<int>());
  throw InputError("chord members must be label strings or MIDI integers");
}

Json range_json(const FeatureRange& r) { return {{"min", r.min}, {"max", r.max}}; }

FeatureRange range_from(const Json& j) {
  return {number(field(j, "min"), "range min"), number(field(j, "max"), "range max")};
}

}  // namespace

Json to_json(const MelodyNote& note) {
  Json j;
  j["midi"] = note.is_rest() ? Json(nullptr) : Json(note.midi);
  j["duration_beats"] = note.duration_beats;
  j["weight"] = note.weight;
  return j;
}

MelodyNote melody_note_from_json(const Json& j) {
  MelodyNote n;
  if (j.is_null()) return n;
  const Json& midi = field(j, "midi");
  if (!midi.is_null()) {
    n.midi = integer(midi, "melody midi");
    if (n.midi < 0 || n.midi > 127) throw InputError("melody midi must be within 0-127");
  }
  if (j.contains("duration_beats")) n.duration_beats = number(j["duration_beats"], "duration_beats");
  if (j.contains("weight")) n.weight = number(j["weight"], "weight");
  if (!(n.duration_beats >= 0.0) || !(n.weight >= 0.0)) {
    throw InputError("melody duration and weight must be non-negative");
  }
  return n;
}

Json to_json(const NormStats& stats) {
  return {{"tension", stats_json(stats.tension)},
          {"distance", stats_json(stats.distance)},
          {"strain", stats_json(stats.strain)}};
}

NormStats norm_stats_from_json(const Json& j) {
  return {stats_from(field(j, "tension")), stats_from(field(j, "distance")), stats_from(field(j, "strain"))};
}

Json to_json(const FeatureSequence& f) {
  Json j;
  j["version"] = kFeatureFormatVersion;
  j["tonality"] = f.tonality.index();
  j["length"] = f.length();
  j["tension"] = f.tension;
  j["distance"] = f.distance;
  j["strain"] = f.strain;
  j["normalized"] = f.normalized;
  if (f.norm_stats) j["norm_stats"] = to_json(*f.norm_stats);
  if (!f.melody.empty()) {
    Json m = Json::array();
    for (const auto& n : f.melody) m.push_back(to_json(n));
    j["melody"] = std::move(m);
  }
  return j;
}

FeatureSequence features_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("feature document must be a JSON object");
  if (j.contains("version") && integer(j["version"], "version") != kFeatureFormatVersion) {
    throw InputError("unsupported feature file version");
  }
  FeatureSequence f;
  const int tonality = integer(field(j, "tonality"), "tonality");
  if (tonality < 0 || tonality > 23) throw InputError("tonality must be within 0-23");
  f.tonality = Tonality::from_index(tonality);
  f.tension = number_array(field(j, "tension"), "tension");
  f.distance = number_array(field(j, "distance"), "distance");
  f.strain = number_array(field(j, "strain"), "strain");
  if (j.contains("normalized")) {
    if (!j["normalized"].is_boolean()) throw InputError("normalized must be a boolean");
    f.normalized = j["normalized"].get<bool>();
  }
  if (j.contains("norm_stats") && !j["norm_stats"].is_null()) f.norm_stats = norm_stats_from_json(j["norm_stats"]);
  if (j.contains("melody") && !j["melody"].is_null()) {
    if (!j["melody"].is_array()) throw InputError("melody must be an array");
    for (const auto& n : j["melody"]) f.melody.push_back(melody_note_from_json(n));
  }
  if (j.contains("length") && integer(j["length"], "length") != static_cast<int>(f.length())) {
    throw InputError("length does not match the feature arrays");
  }
  f.validate();
  return f;
}

std::vector<Chord> chords_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("chords must be an array of arrays");
  std::vector<Chord> out;
  out.reserve(j.size());
  for (const auto& c : j) {
    if (!c.is_array()) throw InputError("each chord must be an array");
    std::vector<Pitch> labels;
    for (const auto& p : c) labels.push_back(pitch_from_json(p));
    out.emplace_back(labels);
  }
  return out;
}

Json chords_to_json(std::span<const Chord> chords) {
  Json out = Json::array();
  for (const auto& c : chords) {
    Json row = Json::array();
    for (Pitch p : c.labels()) row.push_back(label_name(p));
    out.push_back(std::move(row));
  }
  return out;
}

Json spellings_to_json(std::span<const std::vector<int>> spellings) {
  Json out = Json::array();
  for (const auto& s : spellings) out.push_back(s);
  return out;
}

Json spellings_to_json(std::span<const Spelling> spellings) {
  Json out = Json::array();
  for (const auto& s : spellings) out.push_back(s.indices);
  return out;
}

Json to_json(const RecoveryResult& r) {
  Json j;
  j["chords"] = chords_to_json(r.chords);
  j["spellings"] = spellings_to_json(std::span<const std::vector<int>>(r.spellings));
  j["achieved"] = to_json(r.achieved);
  j["total_cost"] = r.total_cost;
  j["per_step_rd"] = r.per_step_rd;
  j["tonic_k"] = r.tonic_k;
  return j;
}

Json to_json(const ChordEntry& e) {
  Json j;
  Json set = Json::array();
  for (Pitch p : e.chord.labels()) set.push_back(label_name(p));
  j["set"] = std::move(set);
  j["quality"] = quality_name(e.classification.quality);
  j["root"] = e.classification.root ? Json(label_name(*e.classification.root)) : Json(nullptr);
  j["min_diameter"] = e.min_diameter;
  return j;
}

Json to_json(const Interval& i) { return {{"mean", i.mean}, {"ci95_low", i.lo}, {"ci95_high", i.hi}}; }

Json to_json(const MetricReport& r) {
  Json j;
  j["mean_cc"] = r.mean_cc;
  j["che"] = r.che;
  j["mctd"] = r.mctd;
  j["sample_count"] = r.sample_count;
  if (r.srcc) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    j["srcc"] = {{"tension", opt(r.srcc->tension)},
                 {"distance", opt(r.srcc->distance)},
                 {"strain", opt(r.srcc->strain)}};
  }
  return j;
}

Json to_json(const FeatureRanges& r) {
  return {{"tension", range_json(r.tension)}, {"distance", range_json(r.distance)}, {"strain", range_json(r.strain)}};
}

FeatureRanges feature_ranges_from_json(const Json& j) {
  return {range_from(field(j, "tension")), range_from(field(j, "distance")), range_from(field(j, "strain"))};
}

Tonality tonality_from_json(const Json& j) {
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < 0 || v > 23) throw ConfigError("tonality must be within 0-23");
    return Tonality::from_index(static_cast<int>(v));
  }
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    std::istringstream in(s);
    std::string tonic;
    std::string mode = "major";
    in >> tonic >> mode;
    try {
      if (mode != "major" && mode != "minor") throw InputError("mode");
      return Tonality::from_tonic(pitch_class(parse_label(tonic)), mode == "major" ? Mode::kMajor : Mode::kMinor);
    } catch (const InputError&) {
      throw ConfigError("cannot parse tonality \"" + s + "\"");
    }
  }
  throw ConfigError("tonality must be an integer 0-23 or a name like \"A minor\"");
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump() + "\n"; }

}  // namespace tonal
