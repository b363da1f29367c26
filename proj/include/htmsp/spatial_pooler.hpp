#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "htmsp/binary_frame.hpp"
#include "htmsp/sp_config.hpp"

namespace htmsp {

struct Column {
  std::vector<int> synapse_inputs;  // potential pool, fixed after init
  std::vector<double> permanences;
  double boost = 1.0;
  double overlap = 0.0;  // last boosted overlap, 0 when below min_overlap
  bool active = false;
  double active_duty_cycle = 0.0;
  double overlap_duty_cycle = 0.0;

  bool operator==(const Column&) const = default;
};

/// Mutable learned state of one Spatial Pooler instance.
struct SpState {
  SpConfig config;
  std::vector<Column> columns;
  int inhibition_radius = 1;
  std::uint64_t iteration = 0;

  bool operator==(const SpState&) const = default;
};

/// Inclusive column index range [lo, hi] within `radius` of `column`,
/// truncated at the array ends.
struct ColumnRange {
  int lo = 0;
  int hi = 0;
};

inline ColumnRange neighborhood(int column, int radius, int num_columns) {
  return {column - radius < 0 ? 0 : column - radius,
          column + radius >= num_columns ? num_columns - 1 : column + radius};
}

/// Cutoff and boost for one column. Every backend goes through here so the
/// boosted value is produced by exactly one multiply.
inline double boosted_overlap(int raw_count, int min_overlap, double boost) {
  return raw_count < min_overlap ? 0.0 : static_cast<double>(raw_count) * boost;
}

/// Activation threshold from the n-th largest competitor overlap (0 when the
/// neighborhood has fewer than n competitors).
inline double activation_threshold(double nth_largest) {
  return nth_largest > 1.0 ? nth_largest : 1.0;
}

inline bool is_connected(double permanence, double threshold) {
  return permanence >= threshold;
}

SpState init_sp(const SpConfig& config);

/// Boosted, cutoff-filtered overlap per column. Updates Column::overlap.
std::vector<double> compute_overlap(SpState& state, const BinaryFrame& frame);

/// Local winner-take-all. Updates Column::active and returns the active
/// column indices in ascending order.
std::vector<int> compute_inhibition(SpState& state, std::span<const double> overlaps);

/// Permanence reinforcement, duty cycles, boosting and inhibition radius
/// adaptation. Reads Column::overlap from the preceding overlap pass.
void learn(SpState& state, const BinaryFrame& frame, std::span<const int> active);

std::vector<int> sp_step(SpState& state, const BinaryFrame& frame, bool learning_enabled);

/// Stores overlaps and activity produced elsewhere (e.g. by the parallel
/// backend) into the state so that learn() can follow.
void commit_outputs(SpState& state, std::span<const double> overlaps, std::span<const int> active);

/// Mean connected receptive-field span mapped into column space, halved.
int adapted_inhibition_radius(const SpState& state);

}  // namespace htmsp
