#include "tonal/recovery.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "tonal/error.h"

namespace tonal {

namespace {

// A (library entry, spelling row) pair. The flattened order (entry size,
// then pitch-class set, then spelling tie-break) is the candidate tie-break,
// so a smaller index wins among equal costs.
struct Candidate {
  std::size_t entry = 0;
  std::size_t row = 0;
  double tension = 0.0;
  double strain = 0.0;
  Point3 center;
};

struct Node {
  std::size_t candidate = 0;
  double cost = 0.0;
  std::size_t parent = 0;  // index into the previous step's beam
};

bool node_precedes(double cost_a, std::size_t idx_a, double cost_b, std::size_t idx_b) {
  if (cost_a < cost_b - kTieTolerance) return true;
  if (cost_a > cost_b + kTieTolerance) return false;
  return idx_a < idx_b;
}

void offer(std::vector<Node>& beam, const Node& n, std::size_t width) {
  if (beam.size() >= width &&
      !node_precedes(n.cost, n.candidate, beam.back().cost, beam.back().candidate)) {
    return;
  }
  auto pos = std::find_if(beam.begin(), beam.end(), [&](const Node& b) {
    return node_precedes(n.cost, n.candidate, b.cost, b.candidate);
  });
  beam.insert(pos, n);
  if (beam.size() > width) beam.pop_back();
}

// Runs fn(begin, end) over [0, n) split across `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2 * workers) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    pool.emplace_back([&fn, begin, end = std::min(n, begin + chunk)] { fn(begin, end); });
  }
}

struct Search {
  const FeatureSequence& targets;
  const std::vector<Candidate>& candidates;
  StepWeights first;
  StepWeights rest;
  int threads;

  // Best path for one beam width: chosen candidate per step and its cost.
  std::pair<std::vector<std::size_t>, double> run(std::size_t width) const {
    const std::size_t steps = targets.length();
    const std::size_t n = candidates.size();
    std::vector<std::vector<Node>> history;
    history.reserve(steps);

    std::vector<Node> beam;
    for (std::size_t c = 0; c < n; ++c) {
      const auto& cand = candidates[c];
      const double cost = first.alpha * std::abs(cand.tension - targets.tension[0]) +
                          first.gamma * std::abs(cand.strain - targets.strain[0]);
      offer(beam, {c, cost, 0}, width);
    }
    history.push_back(beam);

    std::vector<double> best_cost(n);
    std::vector<std::size_t> best_parent(n);
    for (std::size_t t = 1; t < steps; ++t) {
      const auto& prev = history.back();
      const double tt = targets.tension[t];
      const double td = targets.distance[t];
      const double ts = targets.strain[t];
      parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          const auto& cand = candidates[c];
          const double local = rest.alpha * std::abs(cand.tension - tt) + rest.gamma * std::abs(cand.strain - ts);
          double best = 0.0;
          std::size_t arg = 0;
          for (std::size_t p = 0; p < prev.size(); ++p) {
            const double d = distance(candidates[prev[p].candidate].center, cand.center);
            const double total = prev[p].cost + rest.beta * std::abs(d - td);
            if (p == 0 || total < best - kTieTolerance) {
              best = total;
              arg = p;
            }
          }
          best_cost[c] = best + local;
          best_parent[c] = arg;
        }
      });
      std::vector<Node> next;
      for (std::size_t c = 0; c < n; ++c) offer(next, {c, best_cost[c], best_parent[c]}, width);
      history.push_back(std::move(next));
    }

    std::vector<std::size_t> path(steps);
    std::size_t idx = 0;
    const double cost = history.back().front().cost;
    for (std::size_t t = steps; t-- > 0;) {
      const Node& node = history[t][idx];
      path[t] = node.candidate;
      idx = node.parent;
    }
    return {std::move(path), cost};
  }
};

}  // namespace

void RecoveryConfig::validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("recovery weights must be finite and non-negative");
  }
  if (alpha + beta + gamma <= 0.0) throw ConfigError("recovery weights must not all be zero");
  if (beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (threads < 1) throw ConfigError("thread count must be at least 1");
}

StepWeights effective_weights(const RecoveryConfig& config, bool first_step) {
  if (first_step) {
    const double s = config.alpha + config.gamma;
    if (s <= 0.0) return {};
    return {config.alpha / s, 0.0, config.gamma / s};
  }
  const double s = config.alpha + config.beta + config.gamma;
  return {config.alpha / s, config.beta / s, config.gamma / s};
}

std::vector<double> recovery_deviation(const FeatureSequence& achieved, const FeatureSequence& targets) {
  if (achieved.length() != targets.length()) throw InputError("achieved and target lengths differ");
  std::vector<double> rd(targets.length());
  for (std::size_t t = 0; t < rd.size(); ++t) {
    rd[t] = std::abs(achieved.tension[t] - targets.tension[t]) +
            std::abs(achieved.strain[t] - targets.strain[t]);
    if (t > 0) rd[t] += std::abs(achieved.distance[t] - targets.distance[t]);
  }
  return rd;
}

RecoveryResult recover(const FeatureSequence& targets_in, const ChordLibrary& library,
                       const RecoveryConfig& config) {
  config.validate();
  if (library.empty()) throw ConfigError("chord library is empty after filtering");
  targets_in.validate();
  const FeatureSequence targets = denormalize(targets_in);

  // The 24-class label leaves the tonic's spelling open (F# vs Gb, G vs
  // the far-flat G). Each placement is searched; the canonical one goes
  // first so it keeps ties.
  const int canonical = canonical_tonic_index(config.tonality);
  std::vector<int> tonics = {canonical};
  for (int k : label_candidates(pitch_from_class(config.tonality.tonic_pc()))) {
    if (k != canonical) tonics.push_back(k);
  }

  const auto entries = library.entries();
  std::vector<Candidate> candidates;
  std::vector<Candidate> best_candidates;
  std::vector<std::size_t> best_path;
  double best_cost = 0.0;
  KeyEstimate key;
  for (int tonic : tonics) {
    const KeyEstimate trial{config.tonality, key_coordinate(tonic, config.tonality.mode(), library.params()), tonic};
    candidates.clear();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      for (std::size_t r = 0; r < entries[e].spellings.size(); ++r) {
        const auto& sp = entries[e].spellings[r];
        candidates.push_back({e, r, sp.diameter, strain(sp.center, trial.key_point), sp.center});
      }
    }
    const Search search{targets, candidates, effective_weights(config, true), effective_weights(config, false),
                        config.threads};
    // Widths W, W-1, ..., 1: the cheapest path wins (ties keep the wider
    // beam), which makes the result monotone in the configured width.
    for (int w = config.beam_width; w >= 1; --w) {
      auto [path, cost] = search.run(static_cast<std::size_t>(w));
      if (best_path.empty() || cost < best_cost - kTieTolerance) {
        best_path = std::move(path);
        best_cost = cost;
        best_candidates = candidates;
        key = trial;
      }
      if (best_cost <= kTieTolerance) break;
    }
    if (best_cost <= kTieTolerance) break;
  }

  RecoveryResult out;
  out.total_cost = best_cost;
  std::vector<Spelling> spelled;
  out.tonic_k = key.tonic_k;
  for (std::size_t c : best_path) {
    const auto& cand = best_candidates[c];
    const auto& entry = entries[cand.entry];
    out.chords.push_back(entry.chord);
    out.spellings.push_back(entry.spellings[cand.row].indices);
    spelled.push_back(entry.spellings[cand.row]);
  }
  out.achieved = features_from_spellings(spelled, key);
  out.per_step_rd = recovery_deviation(out.achieved, targets);
  return out;
}

double mrda(std::span<const std::vector<double>> per_step_rd) {
  if (per_step_rd.empty()) throw InputError("MRDA needs at least one sample");
  double total = 0.0;
  for (const auto& sample : per_step_rd) {
    if (sample.empty()) throw InputError("MRDA sample has no steps");
    double s = 0.0;
    for (double v : sample) s += v;
    total += s / static_cast<double>(sample.size());
  }
  return total / static_cast<double>(per_step_rd.size());
}

FeatureSequence random_features(const FeatureRanges& ranges, std::size_t length, std::uint64_t seed,
                                Tonality tonality) {
  if (length == 0) throw InputError("random feature length must be at least 1");
  for (const auto* r : {&ranges.tension, &ranges.distance, &ranges.strain}) {
    if (!std::isfinite(r->min) || !std::isfinite(r->max) || r->min > r->max) {
      throw InputError("feature ranges need finite min <= max");
    }
  }
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const FeatureRange& r) {
    if (r.min == r.max) return r.min;
    return std::uniform_real_distribution<double>(r.min, r.max)(rng);
  };
  FeatureSequence out;
  out.tonality = tonality;
  for (std::size_t t = 0; t < length; ++t) {
    out.tension.push_back(draw(ranges.tension));
    const double d = draw(ranges.distance);
    out.distance.push_back(t == 0 ? 0.0 : d);
    out.strain.push_back(draw(ranges.strain));
  }
  return out;
}

}  // namespace tonal
