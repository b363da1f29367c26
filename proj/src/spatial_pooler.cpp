#include "htmsp/spatial_pooler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "htmsp/errors.hpp"
#include "htmsp/random.hpp"

namespace htmsp {
namespace {

void check_frame(const SpState& state, const BinaryFrame& frame) {
  if (frame.size() != static_cast<std::size_t>(state.config.input_size)) {
    throw InputError("frame has " + std::to_string(frame.size()) + " bits, expected " +
                     std::to_string(state.config.input_size));
  }
}

// Floyd's algorithm: `count` distinct values from [0, range), returned sorted.
std::vector<int> sample_without_replacement(int range, int count, Rng& rng,
                                            std::vector<char>& taken) {
  std::vector<int> out;
  out.reserve(count);
  for (int j = range - count; j < range; ++j) {
    const int t = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(j) + 1));
    const int pick = taken[t] ? j : t;
    taken[pick] = 1;
    out.push_back(pick);
  }
  for (int v : out) taken[v] = 0;
  std::sort(out.begin(), out.end());
  return out;
}

// Maximum of values over each column's neighborhood (self included).
std::vector<double> neighborhood_max(std::span<const double> values, int radius) {
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  std::deque<int> window;  // indices with decreasing values
  int next = 0;
  for (int c = 0; c < n; ++c) {
    const auto range = neighborhood(c, radius, n);
    for (; next <= range.hi; ++next) {
      while (!window.empty() && values[window.back()] <= values[next]) window.pop_back();
      window.push_back(next);
    }
    while (window.front() < range.lo) window.pop_front();
    out[c] = values[window.front()];
  }
  return out;
}

// Presence counts over value ranks; answers "k-th largest present value".
class RankCounter {
 public:
  explicit RankCounter(int size) : tree_(size + 1, 0), log_(1) {
    while ((1 << log_) <= size) ++log_;
  }
  void add(int rank, int delta) {
    for (int i = rank + 1; i < static_cast<int>(tree_.size()); i += i & -i) tree_[i] += delta;
  }
  // Smallest rank r such that ranks [0, r] hold at least k entries (k >= 1).
  int kth(int k) const {
    int pos = 0;
    for (int step = 1 << log_; step > 0; step >>= 1) {
      const int next = pos + step;
      if (next < static_cast<int>(tree_.size()) && tree_[next] < k) {
        pos = next;
        k -= tree_[next];
      }
    }
    return pos;  // 0-based rank
  }

 private:
  std::vector<int> tree_;
  int log_;
};

}  // namespace

SpState init_sp(const SpConfig& config) {
  config.validate();
  SpState state;
  state.config = config;
  state.inhibition_radius = config.initial_inhibition_radius;
  state.iteration = 0;
  state.columns.resize(config.num_columns);
  std::vector<char> taken(config.input_size, 0);
  for (int c = 0; c < config.num_columns; ++c) {
    Rng rng(derive_seed(config.rng_seed, static_cast<std::uint64_t>(c)));
    auto& col = state.columns[c];
    col.synapse_inputs =
        sample_without_replacement(config.input_size, config.synapses_per_column, rng, taken);
    col.permanences.assign(config.synapses_per_column, config.initial_permanence);
  }
  return state;
}

std::vector<double> compute_overlap(SpState& state, const BinaryFrame& frame) {
  check_frame(state, frame);
  const auto& cfg = state.config;
  std::vector<double> overlaps(state.columns.size());
  for (std::size_t c = 0; c < state.columns.size(); ++c) {
    auto& col = state.columns[c];
    int raw = 0;
    for (std::size_t s = 0; s < col.synapse_inputs.size(); ++s) {
      raw += (is_connected(col.permanences[s], cfg.connected_threshold) &&
              frame.test(col.synapse_inputs[s]))
                 ? 1
                 : 0;
    }
    overlaps[c] = boosted_overlap(raw, cfg.min_overlap, col.boost);
    col.overlap = overlaps[c];
  }
  return overlaps;
}

std::vector<int> compute_inhibition(SpState& state, std::span<const double> overlaps) {
  const int num = static_cast<int>(state.columns.size());
  if (overlaps.size() != state.columns.size()) {
    throw InputError("overlap vector has " + std::to_string(overlaps.size()) +
                     " entries, expected " + std::to_string(num));
  }
  const int radius = state.inhibition_radius;
  const int n = state.config.winners_set_size;

  // rank 0 = largest overlap
  std::vector<int> by_rank(num);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](int a, int b) { return overlaps[a] > overlaps[b]; });
  std::vector<int> rank_of(num);
  for (int r = 0; r < num; ++r) rank_of[by_rank[r]] = r;

  RankCounter present(num);
  int win_lo = 0;
  int win_hi = -1;
  std::vector<int> active;
  for (int c = 0; c < num; ++c) {
    const auto range = neighborhood(c, radius, num);
    while (win_hi < range.hi) present.add(rank_of[++win_hi], +1);
    while (win_lo < range.lo) present.add(rank_of[win_lo++], -1);

    bool is_active = false;
    if (overlaps[c] > 1.0) {
      const int competitors = range.hi - range.lo;
      double nth = 0.0;
      if (competitors >= n) {
        present.add(rank_of[c], -1);
        nth = overlaps[by_rank[present.kth(n)]];
        present.add(rank_of[c], +1);
      }
      is_active = overlaps[c] > activation_threshold(nth);
    }
    state.columns[c].active = is_active;
    if (is_active) active.push_back(c);
  }
  return active;
}

void learn(SpState& state, const BinaryFrame& frame, std::span<const int> active) {
  check_frame(state, frame);
  const auto& cfg = state.config;
  const int num = cfg.num_columns;

  std::vector<char> is_active(num, 0);
  for (int a : active) {
    if (a < 0 || a >= num) throw InputError("active column index out of range: " + std::to_string(a));
    is_active[a] = 1;
  }

  for (int a : active) {
    auto& col = state.columns[a];
    for (std::size_t s = 0; s < col.permanences.size(); ++s) {
      double p = col.permanences[s];
      p = frame.test(col.synapse_inputs[s]) ? p + cfg.perm_increment : p - cfg.perm_decrement;
      col.permanences[s] = std::clamp(p, 0.0, 1.0);
    }
  }

  const double alpha = 1.0 / cfg.duty_cycle_period;
  std::vector<double> active_duty(num);
  std::vector<double> overlap_duty(num);
  for (int c = 0; c < num; ++c) {
    auto& col = state.columns[c];
    col.active_duty_cycle = (1.0 - alpha) * col.active_duty_cycle + alpha * (is_active[c] ? 1.0 : 0.0);
    col.overlap_duty_cycle =
        (1.0 - alpha) * col.overlap_duty_cycle + alpha * (col.overlap >= cfg.min_overlap ? 1.0 : 0.0);
    active_duty[c] = col.active_duty_cycle;
    overlap_duty[c] = col.overlap_duty_cycle;
  }

  const auto max_active_duty = neighborhood_max(active_duty, state.inhibition_radius);
  const auto max_overlap_duty = neighborhood_max(overlap_duty, state.inhibition_radius);
  const double bump = 0.1 * cfg.connected_threshold;
  for (int c = 0; c < num; ++c) {
    auto& col = state.columns[c];
    const double min_duty = 0.01 * max_active_duty[c];
    if (col.active_duty_cycle >= min_duty) {
      col.boost = 1.0;
    } else {
      col.boost = 1.0 + (min_duty - col.active_duty_cycle) / min_duty * (cfg.max_boost - 1.0);
    }
    if (col.overlap_duty_cycle < 0.01 * max_overlap_duty[c]) {
      for (auto& p : col.permanences) p = std::min(p + bump, 1.0);
    }
  }

  state.inhibition_radius = adapted_inhibition_radius(state);
  ++state.iteration;
}

int adapted_inhibition_radius(const SpState& state) {
  const auto& cfg = state.config;
  double total = 0.0;
  for (const auto& col : state.columns) {
    int first = -1;
    int last = -1;
    for (std::size_t s = 0; s < col.permanences.size(); ++s) {
      if (!is_connected(col.permanences[s], cfg.connected_threshold)) continue;
      if (first < 0) first = col.synapse_inputs[s];
      last = col.synapse_inputs[s];
    }
    const int span = first < 0 ? 0 : last - first + 1;
    total += static_cast<double>(span) * cfg.num_columns / cfg.input_size;
  }
  const double mean = total / static_cast<double>(state.columns.size());
  const auto radius = static_cast<long>(std::lround(mean / 2.0));
  return static_cast<int>(std::clamp<long>(radius, 1, cfg.num_columns));
}

std::vector<int> sp_step(SpState& state, const BinaryFrame& frame, bool learning_enabled) {
  const auto overlaps = compute_overlap(state, frame);
  auto active = compute_inhibition(state, overlaps);
  if (learning_enabled) learn(state, frame, active);
  return active;
}

void commit_outputs(SpState& state, std::span<const double> overlaps, std::span<const int> active) {
  if (overlaps.size() != state.columns.size()) {
    throw InputError("overlap vector size does not match column count");
  }
  for (std::size_t c = 0; c < state.columns.size(); ++c) {
    state.columns[c].overlap = overlaps[c];
    state.columns[c].active = false;
  }
  for (int a : active) {
    if (a < 0 || a >= static_cast<int>(state.columns.size())) {
      throw InputError("active column index out of range: " + std::to_string(a));
    }
    state.columns[a].active = true;
  }
}

}  // namespace htmsp
