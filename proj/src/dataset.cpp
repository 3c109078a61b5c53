#include "tonal/dataset.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "tonal/error.h"
#include "tonal/midi.h"

namespace tonal {

namespace {

constexpr double kOnsetEpsilon = 1e-6;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Sign changes between consecutive nonzero signs.
std::size_t sign_flips(std::span<const double> v) {
  std::size_t flips = 0;
  int prev = 0;
  for (double x : v) {
    const int s = sign_of(x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++flips;
    prev = s;
  }
  return flips;
}

double median_of(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double crossing_density(std::span<const double> values, double ref) {
  std::vector<double> centered;
  centered.reserve(values.size());
  for (double v : values) centered.push_back(v - ref);
  return static_cast<double>(sign_flips(centered)) / static_cast<double>(values.size() - 1);
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_from(const Json& j, const char* name) {
  const auto& v = j.at(name);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw InputError(std::string(name) + " must be a number or null");
  return v.get<double>();
}

Json labels_json(const CurveLabels& l) {
  return {{"mean", l.mean},
          {"std", l.std},
          {"range", l.range},
          {"crossing_density_mean", opt_json(l.crossing_density_mean)},
          {"crossing_density_median", opt_json(l.crossing_density_median)},
          {"zcr_of_gradient", opt_json(l.zcr_of_gradient)},
          {"fft_magnitudes", l.fft_magnitudes}};
}

CurveLabels labels_from(const Json& j) {
  CurveLabels l;
  l.mean = j.at("mean").get<double>();
  l.std = j.at("std").get<double>();
  l.range = j.at("range").get<double>();
  l.crossing_density_mean = opt_from(j, "crossing_density_mean");
  l.crossing_density_median = opt_from(j, "crossing_density_median");
  l.zcr_of_gradient = opt_from(j, "zcr_of_gradient");
  l.fft_magnitudes = j.at("fft_magnitudes").get<std::vector<double>>();
  return l;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int shift_into_range(int midi, int semitones) {
  int p = midi + semitones;
  while (p > 127) p -= 12;
  while (p < 0) p += 12;
  return p;
}

std::string step_tag(int step) { return (step >= 0 ? "+" : "") + std::to_string(step); }

std::string window_tag(std::size_t w) {
  std::string s = std::to_string(w);
  return "w" + std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

template <typename Fn>
void for_each_index(std::size_t n, int threads, Fn&& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<Score> windows_of_impl(const Score& score, int window, int hop) {
  std::vector<Score> out;
  const auto n = score.slices.size();
  const auto win = static_cast<std::size_t>(window);
  const auto step = static_cast<std::size_t>(hop);
  auto make = [&](std::size_t begin, std::size_t end) {
    Score s;
    s.title = score.title;
    s.beats_per_bar = score.beats_per_bar;
    s.slices.assign(score.slices.begin() + static_cast<std::ptrdiff_t>(begin),
                    score.slices.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(std::move(s));
  };
  if (n < 2) return out;
  if (n < win) {
    make(0, n);
    return out;
  }
  for (std::size_t begin = 0; begin + win <= n; begin += step) make(begin, begin + win);
  return out;
}

FeatureStats stats_over(const std::vector<const DatasetSample*>& samples, Feature f) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto* s : samples) {
    for (double v : s->features.curve(f)) {
      sum += v;
      ++count;
    }
  }
  if (count == 0) return {};
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (const auto* s : samples) {
    for (double v : s->features.curve(f)) ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(count));
  return {mean, sd > 0.0 ? sd : 1.0};
}

FeatureRange range_over(std::span<const DatasetSample> samples, Feature f) {
  FeatureRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : samples) {
    for (double v : s.features.curve(f)) {
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
    }
  }
  return r;
}

FeatureRange quantile_range_over(std::span<const DatasetSample> samples, Feature f) {
  std::vector<double> v;
  for (const auto& s : samples) v.insert(v.end(), s.features.curve(f).begin(), s.features.curve(f).end());
  return {quantile(v, kNoiseRangeLowQuantile), quantile(v, kNoiseRangeHighQuantile)};
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("quantile of no values");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile must be within [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<Score> score_windows(const Score& score, int window_beats, int hop_beats) {
  if (window_beats < 2 || hop_beats < 1) throw ConfigError("window must be >= 2 beats and hop >= 1");
  return windows_of_impl(score, window_beats, hop_beats);
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<Chord> Score::chords() const {
  std::vector<Chord> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.chord);
  return out;
}

std::vector<MelodyNote> Score::melody() const {
  std::vector<MelodyNote> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(s.melody);
  return out;
}

Score score_from_json(const Json& j, const std::string& fallback_title) {
  if (!j.is_object()) throw InputError("score must be a JSON object");
  Score score;
  score.title = j.contains("title") && j["title"].is_string() ? j["title"].get<std::string>() : fallback_title;
  if (j.contains("beats_per_bar")) {
    if (!j["beats_per_bar"].is_number_integer() || j["beats_per_bar"].get<int>() < 1) {
      throw InputError("beats_per_bar must be a positive integer");
    }
    score.beats_per_bar = j["beats_per_bar"].get<int>();
  }
  if (!j.contains("slices") || !j["slices"].is_array()) throw InputError("score needs a \"slices\" array");
  const auto& slices = j["slices"];
  if (slices.empty()) throw InputError("score has no slices");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& sj = slices[i];
    if (!sj.is_object()) throw InputError("each slice must be an object");
    Slice s;
    s.downbeat = sj.contains("downbeat") ? sj["downbeat"].get<bool>()
                                         : i % static_cast<std::size_t>(score.beats_per_bar) == 0;
    if (!sj.contains("chord")) throw InputError("slice " + std::to_string(i) + " has no chord");
    Json one = Json::array({sj["chord"]});
    s.chord = chords_from_json(one).front();
    const bool has_weight = sj.contains("melody") && sj["melody"].is_object() && sj["melody"].contains("weight");
    s.melody = melody_note_from_json(sj.contains("melody") ? sj["melody"] : Json(nullptr));
    if (!has_weight) s.melody.weight = s.downbeat ? kDownbeatWeight : kOffbeatWeight;
    score.slices.push_back(std::move(s));
  }
  return score;
}

Json to_json(const Score& score) {
  Json slices = Json::array();
  for (const auto& s : score.slices) {
    Json chord = Json::array();
    for (Pitch p : s.chord.labels()) chord.push_back(label_name(p));
    Json melody = s.melody.is_rest() ? Json(nullptr) : to_json(s.melody);
    slices.push_back({{"melody", melody}, {"chord", chord}, {"downbeat", s.downbeat}});
  }
  return {{"title", score.title}, {"beats_per_bar", score.beats_per_bar}, {"slices", slices}};
}

Score score_from_midi(std::span<const std::uint8_t> bytes, const std::string& title) {
  const midi::Sequence seq = midi::parse(bytes);
  std::vector<midi::Note> notes;
  for (const auto& n : seq.notes) {
    if (n.channel != 9) notes.push_back(n);
  }
  if (notes.empty()) throw InputError("MIDI file has no pitched notes");

  const int num = seq.time_sig_numerator > 0 ? seq.time_sig_numerator : 4;
  const int den = seq.time_sig_denominator > 0 ? seq.time_sig_denominator : 4;
  const bool compound = den == 8 && num % 3 == 0 && num > 3;
  const double beat = compound ? 1.5 : 4.0 / den;
  Score score;
  score.title = title;
  score.beats_per_bar = compound ? num / 3 : num;

  double end = 0.0;
  for (const auto& n : notes) end = std::max(end, n.end);
  for (long t = 0; static_cast<double>(t) * beat < end - kOnsetEpsilon; ++t) {
    const double onset = static_cast<double>(t) * beat;
    std::vector<Pitch> pcs;
    const midi::Note* top = nullptr;
    for (const auto& n : notes) {
      if (n.start > onset + kOnsetEpsilon) break;
      if (n.end <= onset + kOnsetEpsilon) continue;
      pcs.push_back(midi_to_label(n.pitch));
      if (!top || n.pitch > top->pitch) top = &n;
    }
    if (!top) continue;
    std::set<Pitch> distinct(pcs.begin(), pcs.end());
    if (distinct.size() > kMaxChordSize) {
      throw InputError("beat " + std::to_string(t) + " sounds more than 5 pitch classes");
    }
    Slice s;
    s.downbeat = t % score.beats_per_bar == 0;
    s.chord = Chord(pcs);
    s.melody.midi = top->pitch;
    s.melody.duration_beats = std::min(top->end - onset, beat) / beat;
    s.melody.weight = s.downbeat ? kDownbeatWeight : kOffbeatWeight;
    score.slices.push_back(std::move(s));
  }
  if (score.slices.empty()) throw InputError("MIDI file produced no beat slices");
  return score;
}

Score ingest(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const std::string stem = path.stem().string();
  if (ext == ".json") return score_from_json(read_json_file(path), stem);
  if (ext == ".mid" || ext == ".midi") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return score_from_midi(bytes, stem);
  }
  throw InputError("unsupported score file " + path.string() + " (expected .json, .mid or .midi)");
}

void AugmentConfig::validate() const {
  for (double p : {density_drop_prob, melodic_alteration_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("augmentation probabilities must be within [0, 1]");
  }
  if (transposition_steps.empty()) throw ConfigError("transposition_steps must not be empty");
  std::set<int> seen;
  for (int s : transposition_steps) {
    if (s < -127 || s > 127) throw ConfigError("transposition steps must be within [-127, 127]");
    if (!seen.insert(s).second) throw ConfigError("transposition steps must be distinct");
  }
}

std::vector<Score> augment(const Score& score, const AugmentConfig& config, std::uint64_t stream) {
  config.validate();
  std::vector<Score> out;
  out.reserve(config.transposition_steps.size());
  for (int step : config.transposition_steps) {
    std::mt19937_64 rng(mix(mix(config.seed, stream), static_cast<std::uint64_t>(step + 1024)));
    std::bernoulli_distribution drop(config.density_drop_prob);
    std::bernoulli_distribution alter(config.melodic_alteration_prob);
    std::bernoulli_distribution upward(0.5);

    Score v;
    v.title = score.title;
    v.beats_per_bar = score.beats_per_bar;
    const std::size_t n = score.slices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Slice& src = score.slices[i];
      const bool keep = src.downbeat || i == 0 || i + 1 == n;
      if (!keep && drop(rng)) continue;
      Slice s = src;
      if (!s.melody.is_rest() && alter(rng)) {
        // one fifth up is 7 semitones, nearest register -5; one fifth down +5
        const int shift = upward(rng) ? -5 : 5;
        s.melody.midi = shift_into_range(s.melody.midi, shift);
      }
      if (step != 0) {
        if (!s.melody.is_rest()) s.melody.midi = shift_into_range(s.melody.midi, step);
        s.chord = s.chord.transposed(step);
      }
      v.slices.push_back(std::move(s));
    }
    out.push_back(std::move(v));
  }
  return out;
}

CurveLabels curve_labels(std::span<const double> values) {
  if (values.empty()) throw InputError("cannot label an empty curve");
  CurveLabels l;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  l.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - l.mean) * (v - l.mean);
  l.std = std::sqrt(ss / n);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  l.range = *mx - *mn;
  if (values.size() >= 2) {
    l.crossing_density_mean = crossing_density(values, l.mean);
    l.crossing_density_median = crossing_density(values, median_of(values));
  }
  if (values.size() >= 3) {
    std::vector<double> grad;
    for (std::size_t i = 1; i < values.size(); ++i) grad.push_back(values[i] - values[i - 1]);
    l.zcr_of_gradient = static_cast<double>(sign_flips(grad)) / static_cast<double>(values.size() - 2);
  }
  const std::size_t bins = std::min(kFftBins, values.size());
  for (std::size_t k = 0; k < bins; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t) / n;
      acc += (values[t] - l.mean) * std::polar(1.0, angle);
    }
    l.fft_magnitudes.push_back(std::abs(acc));
  }
  return l;
}

SampleLabels annotate_labels(const FeatureSequence& f) {
  return {curve_labels(f.tension), curve_labels(f.distance), curve_labels(f.strain)};
}

Json to_json(const DatasetSample& s) {
  Json j;
  j["id"] = s.id;
  j["title"] = s.title;
  j["mode"] = s.tonality().mode() == Mode::kMajor ? "major" : "minor";
  j["tonality"] = s.tonality().index();
  j["length"] = s.length();
  j["melody"] = s.melody_tokens;
  j["chords"] = chords_to_json(s.chords);
  j["features"] = to_json(s.features);
  j["labels"] = {{"tension", labels_json(s.labels.tension)},
                 {"distance", labels_json(s.labels.distance)},
                 {"strain", labels_json(s.labels.strain)}};
  j["split"] = s.train ? "train" : "test";
  return j;
}

DatasetSample dataset_sample_from_json(const Json& j) {
  try {
    DatasetSample s;
    s.id = j.at("id").get<std::string>();
    s.title = j.at("title").get<std::string>();
    s.melody_tokens = j.at("melody").get<std::vector<int>>();
    s.chords = chords_from_json(j.at("chords"));
    s.features = features_from_json(j.at("features"));
    const auto& labels = j.at("labels");
    s.labels = {labels_from(labels.at("tension")), labels_from(labels.at("distance")),
                labels_from(labels.at("strain"))};
    const std::string split = j.at("split").get<std::string>();
    if (split != "train" && split != "test") throw InputError("split must be \"train\" or \"test\"");
    s.train = split == "train";
    if (j.at("tonality").get<int>() != s.tonality().index()) throw InputError("sample tonality disagrees");
    if (j.at("length").get<std::size_t>() != s.length() || s.chords.size() != s.length() ||
        s.melody_tokens.size() != s.length()) {
      throw InputError("sample length disagrees with its arrays");
    }
    return s;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed dataset sample: ") + e.what());
  }
}

void DatasetConfig::validate() const {
  augment.validate();
  if (window_beats < 2) throw ConfigError("window_beats must be at least 2");
  if (hop_beats < 1) throw ConfigError("hop_beats must be at least 1");
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) throw ConfigError("train_fraction must be within [0, 1]");
  if (beam_width < 1) throw ConfigError("beam_width must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

DatasetConfig dataset_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("dataset config must be a JSON object");
  DatasetConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "density_drop_prob") c.augment.density_drop_prob = v.get<double>();
      else if (key == "melodic_alteration_prob") c.augment.melodic_alteration_prob = v.get<double>();
      else if (key == "transposition_steps") c.augment.transposition_steps = v.get<std::vector<int>>();
      else if (key == "seed") c.augment.seed = v.get<std::uint64_t>();
      else if (key == "key_balance") c.augment.key_balance = v.get<bool>();
      else if (key == "window_beats") c.window_beats = v.get<int>();
      else if (key == "hop_beats") c.hop_beats = v.get<int>();
      else if (key == "target_count") c.target_count = v.get<std::size_t>();
      else if (key == "train_fraction") c.train_fraction = v.get<double>();
      else if (key == "split_seed") c.split_seed = v.get<std::uint64_t>();
      else if (key == "beam_width") c.beam_width = v.get<int>();
      else if (key == "threads") c.threads = v.get<int>();
      else throw ConfigError("unknown dataset config field \"" + key + "\"");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad dataset config value: ") + e.what());
  }
  c.validate();
  return c;
}

Json to_json(const DatasetConfig& c) {
  return {{"density_drop_prob", c.augment.density_drop_prob},
          {"melodic_alteration_prob", c.augment.melodic_alteration_prob},
          {"transposition_steps", c.augment.transposition_steps},
          {"seed", c.augment.seed},
          {"key_balance", c.augment.key_balance},
          {"window_beats", c.window_beats},
          {"hop_beats", c.hop_beats},
          {"target_count", c.target_count},
          {"train_fraction", c.train_fraction},
          {"split_seed", c.split_seed},
          {"beam_width", c.beam_width},
          {"threads", c.threads}};
}

Json to_json(const Manifest& m) {
  Json counts = Json::object();
  for (int k = 0; k < 24; ++k) counts[std::to_string(k)] = m.counts_per_key[static_cast<std::size_t>(k)];
  return {{"counts_per_key", counts},
          {"norm_stats", to_json(m.norm_stats)},
          {"feature_ranges", to_json(m.feature_ranges)},
          {"noise_ranges", to_json(m.noise_ranges)},
          {"noise_range_quantiles", {kNoiseRangeLowQuantile, kNoiseRangeHighQuantile}},
          {"split_seed", m.split_seed},
          {"sample_count", m.sample_count},
          {"train_count", m.train_count},
          {"test_count", m.test_count},
          {"source_count", m.source_count}};
}

Manifest manifest_from_json(const Json& j) {
  try {
    Manifest m;
    const auto& counts = j.at("counts_per_key");
    for (int k = 0; k < 24; ++k) m.counts_per_key[static_cast<std::size_t>(k)] = counts.at(std::to_string(k));
    m.norm_stats = norm_stats_from_json(j.at("norm_stats"));
    m.feature_ranges = feature_ranges_from_json(j.at("feature_ranges"));
    m.noise_ranges = j.contains("noise_ranges") ? feature_ranges_from_json(j.at("noise_ranges")) : m.feature_ranges;
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.sample_count = j.value("sample_count", std::size_t{0});
    m.train_count = j.value("train_count", std::size_t{0});
    m.test_count = j.value("test_count", std::size_t{0});
    m.source_count = j.value("source_count", std::size_t{0});
    return m;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
}

Dataset build_dataset(std::span<const Score> corpus, const DatasetConfig& config) {
  config.validate();
  if (corpus.empty()) throw InputError("corpus is empty");

  std::vector<std::vector<DatasetSample>> per_score(corpus.size());
  for_each_index(corpus.size(), config.threads, [&](std::size_t i) {
    const Score& score = corpus[i];
    const auto wins = score_windows(score, config.window_beats, config.hop_beats);
    for (std::size_t w = 0; w < wins.size(); ++w) {
      const std::string base = score.title + "/" + window_tag(w);
      const auto variants = augment(wins[w], config.augment, fnv1a(base));
      for (std::size_t v = 0; v < variants.size(); ++v) {
        const Score& var = variants[v];
        const auto chords = var.chords();
        const auto melody = var.melody();
        DatasetSample s;
        s.id = base + "/t" + step_tag(config.augment.transposition_steps[v]);
        s.title = score.title;
        s.chords = chords;
        s.features = analyze_chords(chords, BeamConfig{config.beam_width}, std::nullopt, melody).features;
        s.features.melody = melody;
        for (const auto& n : melody) s.melody_tokens.push_back(n.is_rest() ? kRestToken : n.midi);
        s.labels = annotate_labels(s.features);
        per_score[i].push_back(std::move(s));
      }
    }
  });

  std::vector<DatasetSample> all;
  for (auto& v : per_score) std::move(v.begin(), v.end(), std::back_inserter(all));
  if (all.empty()) throw InputError("corpus produced no samples (scores need at least 2 beats)");

  auto hash_order = [&](std::uint64_t salt) {
    return [&, salt](const DatasetSample& a, const DatasetSample& b) {
      const auto ha = fnv1a(a.id, config.split_seed ^ salt);
      const auto hb = fnv1a(b.id, config.split_seed ^ salt);
      return ha != hb ? ha < hb : a.id < b.id;
    };
  };
  // Selection order is independent of the split order.
  std::sort(all.begin(), all.end(), hash_order(0x5e1ec7ull));

  std::vector<DatasetSample> kept;
  if (config.augment.key_balance) {
    std::array<std::vector<std::size_t>, 24> by_key;
    for (std::size_t i = 0; i < all.size(); ++i) by_key[static_cast<std::size_t>(all[i].tonality().index())].push_back(i);
    const std::size_t quota =
        config.target_count > 0 ? (config.target_count + 23) / 24 : std::numeric_limits<std::size_t>::max();
    for (int mode = 0; mode < 2; ++mode) {
      std::size_t cap = quota;
      for (int k = 0; k < 12; ++k) cap = std::min(cap, by_key[static_cast<std::size_t>(mode * 12 + k)].size());
      for (int k = 0; k < 12; ++k) {
        const auto& idx = by_key[static_cast<std::size_t>(mode * 12 + k)];
        for (std::size_t c = 0; c < cap; ++c) kept.push_back(std::move(all[idx[c]]));
      }
    }
    if (kept.empty()) {
      throw InputError("key balancing removed every sample; use transpositions covering all 12 keys or disable key_balance");
    }
  } else {
    const std::size_t n = config.target_count > 0 ? std::min(config.target_count, all.size()) : all.size();
    std::move(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), std::back_inserter(kept));
  }

  std::sort(kept.begin(), kept.end(), hash_order(0));
  const auto n_train =
      static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(kept.size())));
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].train = i < n_train;
  std::sort(kept.begin(), kept.end(), [](const DatasetSample& a, const DatasetSample& b) { return a.id < b.id; });

  Dataset out;
  Manifest& m = out.manifest;
  std::vector<const DatasetSample*> train;
  for (const auto& s : kept) {
    ++m.counts_per_key[static_cast<std::size_t>(s.tonality().index())];
    if (s.train) train.push_back(&s);
  }
  if (train.empty()) {
    for (const auto& s : kept) train.push_back(&s);
  }
  m.norm_stats = {stats_over(train, Feature::kTension), stats_over(train, Feature::kDistance),
                  stats_over(train, Feature::kStrain)};
  m.feature_ranges = {range_over(kept, Feature::kTension), range_over(kept, Feature::kDistance),
                      range_over(kept, Feature::kStrain)};
  m.noise_ranges = {quantile_range_over(kept, Feature::kTension), quantile_range_over(kept, Feature::kDistance),
                    quantile_range_over(kept, Feature::kStrain)};
  m.split_seed = config.split_seed;
  m.sample_count = kept.size();
  m.train_count = n_train;
  m.test_count = kept.size() - n_train;
  m.source_count = corpus.size();
  out.samples = std::move(kept);
  return out;
}

std::vector<Score> ingest_corpus(const std::filesystem::path& corpus_dir, int threads) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(corpus_dir)) throw InputError("corpus directory not found: " + corpus_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".json" || ext == ".mid" || ext == ".midi") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("corpus directory has no .json/.mid/.midi files: " + corpus_dir.string());
  std::vector<Score> scores(files.size());
  for_each_index(files.size(), threads, [&](std::size_t i) { scores[i] = ingest(files[i]); });
  return scores;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& out_path) {
  auto p = out_path;
  p.replace_extension(".manifest.json");
  return p;
}

void write_samples(const std::filesystem::path& path, std::span<const DatasetSample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<DatasetSample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<DatasetSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(dataset_sample_from_json(parse_json(line)));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Manifest build_dataset(const std::filesystem::path& corpus_dir, const DatasetConfig& config,
                       const std::filesystem::path& out_path) {
  config.validate();
  const auto corpus = ingest_corpus(corpus_dir, config.threads);
  const Dataset ds = build_dataset(corpus, config);
  write_samples(out_path, ds.samples);
  Json manifest = to_json(ds.manifest);
  manifest["config"] = to_json(config);
  write_text_file(manifest_path_for(out_path), manifest.dump(2) + "\n");
  return ds.manifest;
}

}  // namespace tonal
