// tonal: command-line front end. Exit codes: 0 ok, 1 input error,
// 2 configuration error, 3 internal error; errors go to stderr as JSON.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tonal/api.h"
#include "tonal/dataset.h"
#include "tonal/error.h"
#include "tonal/formats.h"
#include "tonal/midi.h"
#include "tonal/service.h"

namespace {

using tonal::Json;

enum ExitCode { kOk = 0, kInputError = 1, kConfigError = 2, kInternalError = 3 };

int fail(ExitCode code, const char* kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    tonal::write_text_file(out, text);
  }
}

std::optional<tonal::Tonality> parse_tonality(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const bool numeric = text.find_first_not_of("-+0123456789") == std::string::npos;
  if (numeric) {
    try {
      return tonal::tonality_from_json(Json(std::stoll(text)));
    } catch (const std::out_of_range&) {
      throw tonal::ConfigError("tonality must be within 0-23");
    }
  }
  return tonal::tonality_from_json(Json(text));
}

struct Options {
  std::string input;
  std::string out;
  std::string tonality;
  int beam_width = 8;

  // recover
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
  int min_notes = 2;
  int max_notes = 5;
  std::string quality_filter;
  std::string contains;
  int threads = 1;
  std::string midi_out;

  // edit
  std::string edits;

  // dataset
  std::string config;

  // eval
  std::string chords;
  std::string melody;
  std::string features;
  std::string pieces;
  std::size_t runs = 0;

  // noise
  std::string ranges_from;
  std::size_t length = 16;
  std::uint64_t seed = 0;
  std::string range_kind = "noise";

  // library
  std::string filter;

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string manifest;
};

int run_analyze(const Options& o) {
  Json input;
  const std::filesystem::path path(o.input);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".mid" || ext == ".midi") {
    input = tonal::to_json(tonal::ingest(path));
  } else {
    input = tonal::read_json_file(path);
  }
  emit(tonal::dump(tonal::api::analyze(input, o.beam_width, parse_tonality(o.tonality))), o.out);
  return kOk;
}

int run_spell(const Options& o) {
  emit(tonal::dump(tonal::api::spell(tonal::read_json_file(o.input), o.beam_width)), o.out);
  return kOk;
}

int run_recover(const Options& o) {
  tonal::api::RecoverRequest req;
  req.features = tonal::features_from_json(tonal::read_json_file(o.input));
  req.config.tonality = req.features.tonality;
  if (auto t = parse_tonality(o.tonality)) req.config.tonality = *t;
  req.config.alpha = o.alpha;
  req.config.beta = o.beta;
  req.config.gamma = o.gamma;
  req.config.beam_width = o.beam_width;
  req.config.threads = o.threads;
  req.config.validate();
  std::string spec = "min=" + std::to_string(o.min_notes) + ",max=" + std::to_string(o.max_notes);
  if (!o.quality_filter.empty()) spec += ",quality=" + o.quality_filter;
  if (!o.contains.empty()) spec += ",contains=" + o.contains;
  req.filter = tonal::LibraryFilter::parse(spec);

  const tonal::api::Context context;
  const auto result = tonal::api::recover(req, context);
  emit(tonal::dump(tonal::to_json(result)), o.out);
  if (!o.midi_out.empty()) {
    const auto bytes = tonal::midi::render_block_chords(tonal::api::block_voicing(result));
    tonal::write_text_file(o.midi_out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return kOk;
}

int run_edit(const Options& o) {
  Json body{{"features", tonal::read_json_file(o.input)}, {"edits", tonal::read_json_file(o.edits)}};
  emit(tonal::dump(tonal::api::edit(body)), o.out);
  return kOk;
}

int run_dataset_build(const Options& o) {
  tonal::DatasetConfig config;
  if (!o.config.empty()) config = tonal::dataset_config_from_json(tonal::read_json_file(o.config));
  if (o.threads > 1) config.threads = o.threads;
  config.validate();
  const auto manifest = tonal::build_dataset(o.input, config, o.out);
  std::cerr << "wrote " << manifest.sample_count << " samples to " << o.out << " and "
            << tonal::manifest_path_for(o.out).string() << '\n';
  return kOk;
}

int run_eval(const Options& o) {
  Json body;
  if (!o.pieces.empty()) {
    body = tonal::read_json_file(o.pieces);
  } else {
    if (o.chords.empty() && o.features.empty()) throw tonal::ConfigError("eval needs --pieces, --chords or --features");
    Json piece = Json::object();
    if (!o.chords.empty()) {
      piece["chords"] = tonal::read_json_file(o.chords);
    }
    if (!o.melody.empty()) piece["melody"] = tonal::read_json_file(o.melody);
    if (!o.features.empty()) {
      piece["features"] = tonal::read_json_file(o.features);
      if (o.chords.empty()) {
        // Evaluate the progression recovered from the target curves.
        tonal::api::RecoverRequest req = tonal::api::recover_request_from_json(piece["features"]);
        req.config.beam_width = o.beam_width;
        const tonal::api::Context context;
        piece["chords"] = tonal::chords_to_json(tonal::api::recover(req, context).chords);
        if (o.melody.empty() && !req.features.melody.empty()) {
          piece["melody"] = tonal::to_json(req.features)["melody"];
        }
      }
    }
    body = piece;
  }
  tonal::api::EvalOptions options;
  options.runs = o.runs;
  options.beam_width = o.beam_width;
  emit(tonal::dump(tonal::api::evaluate(tonal::api::eval_pieces_from_json(body), options)), o.out);
  return kOk;
}

int run_noise(const Options& o) {
  if (o.range_kind != "noise" && o.range_kind != "minmax") throw tonal::ConfigError("--range-kind is noise or minmax");
  if (o.length == 0) throw tonal::ConfigError("--length must be at least 1");
  const auto manifest = tonal::manifest_from_json(tonal::read_json_file(o.ranges_from));
  const auto tonality = parse_tonality(o.tonality).value_or(tonal::Tonality{});
  const auto f = tonal::api::noise(manifest, o.length, o.seed, tonality, o.range_kind == "minmax");
  emit(tonal::dump(tonal::to_json(f)), o.out);
  return kOk;
}

int run_library(const Options& o) {
  const auto library = tonal::ChordLibrary::build(tonal::LibraryFilter::parse(o.filter));
  emit(tonal::api::library_jsonl(library), o.out);
  return kOk;
}

int run_serve(const Options& o) {
  std::optional<Json> manifest;
  if (!o.manifest.empty()) manifest = tonal::read_json_file(o.manifest);
  const tonal::api::Context context(std::move(manifest));
  std::cerr << "listening on http://" << o.host << ":" << o.port << '\n';
  tonal::service::serve(context, o.host, o.port);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tonal tension toolkit: chords <-> tension/distance/strain curves"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Score or chord list -> feature file");
  analyze->add_option("score", o.input, "score JSON, chord JSON or MIDI file")->required();
  analyze->add_option("--out,-o", o.out, "output path (stdout if omitted)");
  analyze->add_option("--beam-width", o.beam_width, "spelling beam width");
  analyze->add_option("--tonality", o.tonality, "override key: 0-23 or a name like \"A minor\"");

  auto* spell = app.add_subcommand("spell", "Chord list -> fifth-index spellings");
  spell->add_option("chords", o.input, "chord JSON")->required();
  spell->add_option("--out,-o", o.out);
  spell->add_option("--beam-width", o.beam_width);

  auto* recover = app.add_subcommand("recover", "Feature file -> chord progression");
  recover->add_option("features", o.input, "feature file")->required();
  recover->add_option("--tonality", o.tonality, "0-23 or a name; defaults to the file's");
  recover->add_option("--alpha", o.alpha, "tension weight");
  recover->add_option("--beta", o.beta, "distance weight");
  recover->add_option("--gamma", o.gamma, "strain weight");
  recover->add_option("--beam-width", o.beam_width);
  recover->add_option("--min-notes", o.min_notes);
  recover->add_option("--max-notes", o.max_notes);
  recover->add_option("--quality-filter", o.quality_filter, "allowed qualities, e.g. maj|min|dom7");
  recover->add_option("--contains", o.contains, "required pitch labels, e.g. C|E");
  recover->add_option("--threads", o.threads, "candidate scoring workers");
  recover->add_option("--out,-o", o.out);
  recover->add_option("--midi", o.midi_out, "also write block chords as a MIDI file");

  auto* edit = app.add_subcommand("edit", "Apply curve edits to a feature file");
  edit->add_option("features", o.input)->required();
  edit->add_option("--edits", o.edits, "edit JSON (object or array)")->required();
  edit->add_option("--out,-o", o.out);

  auto* dataset = app.add_subcommand("dataset", "Dataset tools");
  dataset->require_subcommand(1);
  auto* build = dataset->add_subcommand("build", "Corpus directory -> JSONL dataset + manifest");
  build->add_option("corpus", o.input, "directory of .json/.mid/.midi scores")->required();
  build->add_option("--config", o.config, "dataset config JSON");
  build->add_option("--out,-o", o.out, "output .jsonl path")->required();
  build->add_option("--threads", o.threads);

  auto* eval = app.add_subcommand("eval", "Metric report with 95% confidence intervals");
  eval->add_option("--pieces", o.pieces, "{\"pieces\": [{\"chords\", \"melody\", \"features\"}]}");
  eval->add_option("--chords", o.chords, "chord JSON");
  eval->add_option("--melody", o.melody, "melody note array JSON");
  eval->add_option("--features", o.features, "target feature file (recovered when --chords is absent)");
  eval->add_option("--runs", o.runs, "number of runs for the interval (default: one per piece)");
  eval->add_option("--beam-width", o.beam_width);
  eval->add_option("--out,-o", o.out);

  auto* noise = app.add_subcommand("noise", "Random feature curves within manifest ranges");
  noise->add_option("--ranges-from", o.ranges_from, "dataset manifest")->required();
  noise->add_option("--length", o.length, "steps");
  noise->add_option("--seed", o.seed);
  noise->add_option("--tonality", o.tonality);
  noise->add_option("--range-kind", o.range_kind, "noise (1st-99th percentile) or minmax");
  noise->add_option("--out,-o", o.out);

  auto* library = app.add_subcommand("library", "Dump the chord library as JSON lines");
  library->add_option("--filter", o.filter, "e.g. min=3,max=4,quality=maj|min,contains=C");
  library->add_option("--out,-o", o.out);

  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  serve->add_option("--host", o.host, "bind address (loopback by default)");
  serve->add_option("--port", o.port);
  serve->add_option("--manifest", o.manifest, "manifest served at GET /manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfigError, "config_error", e.what());
  }

  try {
    if (*analyze) return run_analyze(o);
    if (*spell) return run_spell(o);
    if (*recover) return run_recover(o);
    if (*edit) return run_edit(o);
    if (*build) return run_dataset_build(o);
    if (*eval) return run_eval(o);
    if (*noise) return run_noise(o);
    if (*library) return run_library(o);
    if (*serve) return run_serve(o);
  } catch (const tonal::InputError& e) {
    return fail(kInputError, "input_error", e.what());
  } catch (const tonal::ConfigError& e) {
    return fail(kConfigError, "config_error", e.what());
  } catch (const std::exception& e) {
    return fail(kInternalError, "internal_error", e.what());
  }
  return kInternalError;
}
