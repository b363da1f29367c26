#pragma once

#include <cstdint>

namespace htmsp {

/// Tunable Spatial Pooler parameters. Defaults follow the baseline
/// experiment configuration (2048 columns, 128 synapses, ...).
struct SpConfig {
  int num_columns = 2048;
  int synapses_per_column = 128;
  int min_overlap = 8;
  int winners_set_size = 40;
  double perm_increment = 0.1;
  double perm_decrement = 0.1;
  double initial_permanence = 0.21;
  double connected_threshold = 0.2;
  int initial_inhibition_radius = 80;
  double max_boost = 2.0;
  int duty_cycle_period = 1000;
  int input_size = 240 * 134;
  std::uint64_t rng_seed = 1;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  bool operator==(const SpConfig&) const = default;
};

}  // namespace htmsp
