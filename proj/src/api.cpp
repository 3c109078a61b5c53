#include "tonal/api.h"

#include <algorithm>
#include <sstream>

#include "tonal/curve_edit.h"
#include "tonal/error.h"

namespace tonal::api {

namespace {

std::vector<MelodyNote> melody_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("melody must be an array of notes");
  std::vector<MelodyNote> out;
  for (const auto& n : j) out.push_back(melody_note_from_json(n));
  return out;
}

LibraryFilter filter_from_json(const Json& j) {
  if (j.is_string()) return LibraryFilter::parse(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("filter must be a string or an object");
  LibraryFilter f;
  try {
    if (j.contains("min_notes")) f.min_notes = j["min_notes"].get<int>();
    if (j.contains("max_notes")) f.max_notes = j["max_notes"].get<int>();
    if (j.contains("quality")) {
      std::set<Quality> allow;
      for (const auto& q : j["quality"]) allow.insert(parse_quality(q.get<std::string>()));
      f.quality_allowlist = std::move(allow);
    }
    if (j.contains("contains")) {
      for (const auto& p : j["contains"]) f.must_contain.push_back(parse_label(p.get<std::string>()));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad filter: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  f.validate();
  return f;
}

double config_number(const Json& config, const char* name, double fallback) {
  if (!config.contains(name)) return fallback;
  if (!config[name].is_number()) throw ConfigError(std::string(name) + " must be a number");
  return config[name].get<double>();
}

int config_int(const Json& config, const char* name, int fallback) {
  if (!config.contains(name)) return fallback;
  if (!config[name].is_number_integer()) throw ConfigError(std::string(name) + " must be an integer");
  return config[name].get<int>();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

Context::Context() : Context(std::nullopt) {}

Context::Context(std::optional<Json> manifest)
    : default_library_(std::make_shared<const ChordLibrary>(ChordLibrary::build())), manifest_(std::move(manifest)) {}

std::shared_ptr<const ChordLibrary> Context::library(const LibraryFilter& filter) const {
  if (filter == LibraryFilter{}) return default_library_;
  return std::make_shared<const ChordLibrary>(ChordLibrary::build(filter));
}

Json analyze(const Json& input, int beam_width, std::optional<Tonality> tonality) {
  BeamConfig beam{beam_width};
  beam.validate();
  std::vector<Chord> chords;
  std::vector<MelodyNote> melody;
  if (input.is_object() && input.contains("slices")) {
    const Score score = score_from_json(input);
    chords = score.chords();
    melody = score.melody();
  } else if (input.is_object() && input.contains("chords")) {
    chords = chords_from_json(input["chords"]);
    if (input.contains("melody")) melody = melody_from_json(input["melody"]);
  } else if (input.is_array()) {
    chords = chords_from_json(input);
  } else {
    throw InputError("expected a score, {\"chords\": ...} or a chord array");
  }
  Analysis a = analyze_chords(chords, beam, tonality, melody);
  a.features.melody = std::move(melody);
  return to_json(a.features);
}

Json spell(const Json& chords, int beam_width) {
  BeamConfig beam{beam_width};
  beam.validate();
  const Json& list = chords.is_object() && chords.contains("chords") ? chords["chords"] : chords;
  const auto parsed = chords_from_json(list);
  return spellings_to_json(spell_sequence(parsed, beam));
}

RecoverRequest recover_request_from_json(const Json& body) {
  if (!body.is_object()) throw InputError("recover body must be a JSON object");
  RecoverRequest req;
  const bool wrapped = body.contains("features");
  req.features = features_from_json(wrapped ? body["features"] : body);
  req.config.tonality = req.features.tonality;
  if (wrapped && body.contains("config")) {
    const Json& c = body["config"];
    if (!c.is_object()) throw ConfigError("config must be an object");
    if (c.contains("tonality")) req.config.tonality = tonality_from_json(c["tonality"]);
    req.config.alpha = config_number(c, "alpha", req.config.alpha);
    req.config.beta = config_number(c, "beta", req.config.beta);
    req.config.gamma = config_number(c, "gamma", req.config.gamma);
    req.config.beam_width = config_int(c, "beam_width", req.config.beam_width);
    req.config.threads = config_int(c, "threads", req.config.threads);
    if (c.contains("filter")) req.filter = filter_from_json(c["filter"]);
  }
  req.config.validate();
  return req;
}

RecoveryResult recover(const RecoverRequest& request, const Context& context) {
  const auto library = context.library(request.filter);
  return tonal::recover(request.features, *library, request.config);
}

std::vector<std::vector<int>> block_voicing(const RecoveryResult& result) {
  std::vector<std::vector<int>> out;
  for (std::size_t t = 0; t < result.chords.size(); ++t) {
    const auto& labels = result.chords[t].labels();
    const auto& ks = result.spellings[t];
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });
    std::vector<int> notes;
    for (std::size_t i : order) {
      const int pc = pitch_class(labels[i]);
      int p = 60 + pc;
      if (!notes.empty()) {
        while (p <= notes.back()) p += 12;
        while (p - 12 > notes.back()) p -= 12;
      }
      notes.push_back(p);
    }
    out.push_back(std::move(notes));
  }
  return out;
}

Json edit(const Json& body) {
  if (!body.is_object() || !body.contains("features") || !body.contains("edits")) {
    throw InputError("edit body needs \"features\" and \"edits\"");
  }
  const FeatureSequence f = features_from_json(body["features"]);
  const auto edits = curve_edits_from_json(body["edits"]);
  return to_json(edit_curve(f, edits));
}

std::vector<EvalPiece> eval_pieces_from_json(const Json& body) {
  auto piece = [](const Json& j) {
    if (!j.is_object() || !j.contains("chords")) throw InputError("each piece needs \"chords\"");
    EvalPiece p;
    p.chords = chords_from_json(j["chords"]);
    if (j.contains("melody") && !j["melody"].is_null()) p.melody = melody_from_json(j["melody"]);
    if (!p.melody.empty() && p.melody.size() != p.chords.size()) {
      throw InputError("melody must align with the chords");
    }
    if (j.contains("features") && !j["features"].is_null()) {
      p.target = features_from_json(j["features"]);
      if (p.target->length() != p.chords.size()) throw InputError("target features must align with the chords");
    }
    return p;
  };
  std::vector<EvalPiece> out;
  if (body.is_object() && body.contains("pieces")) {
    if (!body["pieces"].is_array()) throw InputError("\"pieces\" must be an array");
    for (const auto& p : body["pieces"]) out.push_back(piece(p));
  } else {
    out.push_back(piece(body));
  }
  if (out.empty()) throw InputError("nothing to evaluate");
  return out;
}

Json evaluate(const std::vector<EvalPiece>& pieces, const EvalOptions& options) {
  if (pieces.empty()) throw InputError("nothing to evaluate");
  BeamConfig beam{options.beam_width};
  beam.validate();
  const std::size_t runs = options.runs == 0 ? pieces.size() : options.runs;
  if (runs > pieces.size()) throw ConfigError("more runs than pieces");

  struct Acc {
    std::vector<double> cc, che, mctd, srcc_t, srcc_d, srcc_s;
  };
  std::vector<Acc> per_run(runs);
  Acc all;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    Acc& run = per_run[i % runs];
    std::vector<std::vector<int>> spelled;
    const auto analysis =
        analyze_chords(p.chords, beam, p.target ? std::optional(p.target->tonality) : std::nullopt, p.melody);
    for (const auto& s : analysis.spellings) spelled.push_back(s.indices);
    const PieceMetrics m = piece_metrics(p.chords, spelled, p.melody);
    for (Acc* a : {&run, &all}) {
      a->cc.push_back(m.cc);
      a->che.push_back(m.che);
      if (m.mctd) a->mctd.push_back(*m.mctd);
    }
    if (p.target) {
      const auto s = feature_srcc(denormalize(*p.target), analysis.features);
      for (Acc* a : {&run, &all}) {
        if (s.tension) a->srcc_t.push_back(*s.tension);
        if (s.distance) a->srcc_d.push_back(*s.distance);
        if (s.strain) a->srcc_s.push_back(*s.strain);
      }
    }
  }

  auto summarize = [&](auto member) -> Json {
    std::vector<double> run_means;
    for (const auto& r : per_run) {
      const auto& v = r.*member;
      if (!v.empty()) run_means.push_back(mean_of(v));
    }
    if (run_means.empty()) return nullptr;
    return to_json(confidence_interval_95(run_means));
  };

  MetricReport report;
  report.sample_count = pieces.size();
  report.mean_cc = mean_of(all.cc);
  report.che = mean_of(all.che);
  report.mctd = all.mctd.empty() ? 0.0 : mean_of(all.mctd);
  if (!all.srcc_t.empty() || !all.srcc_d.empty() || !all.srcc_s.empty()) {
    auto opt = [](const std::vector<double>& v) { return v.empty() ? std::nullopt : std::optional(mean_of(v)); };
    report.srcc = SrccByFeature{opt(all.srcc_t), opt(all.srcc_d), opt(all.srcc_s)};
  }
  Json j = to_json(report);
  if (all.mctd.empty()) j["mctd"] = nullptr;
  j["runs"] = runs;
  j["ci95"] = {{"mean_cc", summarize(&Acc::cc)},
               {"che", summarize(&Acc::che)},
               {"mctd", summarize(&Acc::mctd)},
               {"srcc_tension", summarize(&Acc::srcc_t)},
               {"srcc_distance", summarize(&Acc::srcc_d)},
               {"srcc_strain", summarize(&Acc::srcc_s)}};
  return j;
}

std::string library_jsonl(const ChordLibrary& library) {
  std::string out;
  for (const auto& e : library.entries()) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

FeatureSequence noise(const Manifest& manifest, std::size_t length, std::uint64_t seed, Tonality tonality,
                      bool minmax) {
  return random_features(minmax ? manifest.feature_ranges : manifest.noise_ranges, length, seed, tonality);
}

}  // namespace tonal::api
