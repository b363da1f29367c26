#include "htmsp/sp_config.hpp"

#include <string>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid SpConfig: " + what);
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void SpConfig::validate() const {
  require(num_columns > 0, "num_columns must be positive");
  require(synapses_per_column > 0, "synapses_per_column must be positive");
  require(min_overlap >= 0, "min_overlap must be non-negative");
  require(winners_set_size > 0, "winners_set_size must be positive");
  require(input_size > 0, "input_size must be positive");
  require(initial_inhibition_radius > 0, "initial_inhibition_radius must be positive");
  require(duty_cycle_period > 0, "duty_cycle_period must be positive");
  require(is_fraction(initial_permanence), "initial_permanence must be in [0, 1]");
  require(is_fraction(connected_threshold), "connected_threshold must be in [0, 1]");
  require(is_fraction(perm_increment), "perm_increment must be in [0, 1]");
  require(is_fraction(perm_decrement), "perm_decrement must be in [0, 1]");
  require(max_boost >= 1.0, "max_boost must be >= 1");
  require(winners_set_size <= num_columns, "winners_set_size must be <= num_columns");
  require(min_overlap <= synapses_per_column, "min_overlap must be <= synapses_per_column");
  require(synapses_per_column <= input_size, "synapses_per_column must be <= input_size");
}

}  // namespace htmsp
