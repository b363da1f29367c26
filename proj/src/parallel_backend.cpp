#include "htmsp/parallel_backend.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <ostream>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

inline bool device_bit(const std::vector<std::uint32_t>& words, int index) {
  return (words[static_cast<std::size_t>(index) >> 5] >> (index & 31)) & 1U;
}

}  // namespace

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::staging_in: return "staging_in";
    case Phase::kernel_overlap: return "kernel_overlap";
    case Phase::kernel_inhibition: return "kernel_inhibition";
    case Phase::staging_out: return "staging_out";
  }
  return "unknown";
}

Phase parse_phase(std::string_view name) {
  for (auto p : {Phase::staging_in, Phase::kernel_overlap, Phase::kernel_inhibition, Phase::staging_out}) {
    if (phase_name(p) == name) return p;
  }
  throw InputError("unknown profile phase: " + std::string(name));
}

KernelPlan plan_kernels(const SpConfig& config, bool fused, int max_group_size) {
  if (max_group_size < 1 || (max_group_size & (max_group_size - 1)) != 0) {
    throw ConfigError("max_group_size must be a power of two");
  }
  KernelPlan plan;
  plan.group_size = std::min(next_pow2(config.synapses_per_column), max_group_size);
  plan.num_groups = config.num_columns;
  plan.fused = fused;
  plan.items_per_lane = (config.synapses_per_column + plan.group_size - 1) / plan.group_size;
  return plan;
}

int tree_reduce_sum(std::span<int> local) {
  const std::size_t size = local.size();
  if (size == 0) return 0;
  if ((size & (size - 1)) != 0) throw InputError("tree reduction needs a power-of-two buffer");
  for (std::size_t stride = size / 2; stride > 0; stride /= 2) {
    for (std::size_t i = 0; i < stride; ++i) local[i] += local[i + stride];
  }
  return local[0];
}

void ParallelBackend::stage_in(const SpState& state, const BinaryFrame& frame) {
  const int bits = static_cast<int>(frame.size());
  device_frame_.assign((bits + 31) / 32, 0);
  const auto src = frame.bits();
  for (int i = 0; i < bits; ++i) {
    device_frame_[i >> 5] |= static_cast<std::uint32_t>(src[i] != 0) << (i & 31);
  }
  device_boost_.resize(state.columns.size());
  for (std::size_t c = 0; c < state.columns.size(); ++c) device_boost_[c] = state.columns[c].boost;
  device_overlap_.assign(state.columns.size(), 0.0);
  device_active_.assign(state.columns.size(), 0);
  if (static_cast<int>(lane_scratch_.size()) != pool_.lanes()) {
    lane_scratch_.resize(pool_.lanes());
    lane_slice_.resize(pool_.lanes());
  }
}

void ParallelBackend::overlap_kernel(const SpState& state, const KernelPlan& plan) {
  const auto& cfg = state.config;
  pool_.run(plan.num_groups, [&](int lane, int begin, int end) {
    auto& local = lane_scratch_[lane];
    local.assign(plan.group_size, 0);
    for (int group = begin; group < end; ++group) {
      const auto& col = state.columns[group];
      const int synapses = static_cast<int>(col.synapse_inputs.size());
      for (int item = 0; item < plan.group_size; ++item) {
        int acc = 0;
        for (int s = item; s < synapses; s += plan.group_size) {
          acc += (is_connected(col.permanences[s], cfg.connected_threshold) &&
                  device_bit(device_frame_, col.synapse_inputs[s]))
                     ? 1
                     : 0;
        }
        local[item] = acc;
      }
      const int raw = tree_reduce_sum(local);
      device_overlap_[group] = boosted_overlap(raw, cfg.min_overlap, device_boost_[group]);
    }
  });
}

void ParallelBackend::inhibition_kernel(const SpState& state) {
  const int num = static_cast<int>(state.columns.size());
  const int radius = state.inhibition_radius;
  const int n = state.config.winners_set_size;
  pool_.run(num, [&](int lane, int begin, int end) {
    auto& slice = lane_slice_[lane];
    for (int group = begin; group < end; ++group) {
      const double own = device_overlap_[group];
      if (own == 0.0) continue;  // nothing to compete with
      const auto range = neighborhood(group, radius, num);
      slice.clear();
      for (int c = range.lo; c <= range.hi; ++c) {
        if (c != group) slice.push_back(device_overlap_[c]);
      }
      double nth = 0.0;
      if (static_cast<int>(slice.size()) >= n) {
        std::nth_element(slice.begin(), slice.begin() + (n - 1), slice.end(), std::greater<>());
        nth = slice[n - 1];
      }
      device_active_[group] = own > activation_threshold(nth) ? 1 : 0;
    }
  });
}

OverlapResult ParallelBackend::parallel_overlap(const SpState& state, const BinaryFrame& frame,
                                                const KernelPlan& plan) {
  if (frame.size() != static_cast<std::size_t>(state.config.input_size)) {
    throw InputError("frame has " + std::to_string(frame.size()) + " bits, expected " +
                     std::to_string(state.config.input_size));
  }
  if (plan.num_groups != static_cast<int>(state.columns.size())) {
    throw InputError("kernel plan group count does not match column count");
  }
  OverlapResult result;
  const auto iteration = state.iteration;

  auto t0 = Clock::now();
  stage_in(state, frame);
  result.records.push_back({Phase::staging_in, elapsed_ns(t0), iteration});

  t0 = Clock::now();
  overlap_kernel(state, plan);
  result.records.push_back({Phase::kernel_overlap, elapsed_ns(t0), iteration});

  t0 = Clock::now();
  result.overlaps = device_overlap_;
  result.records.push_back({Phase::staging_out, elapsed_ns(t0), iteration});
  return result;
}

InhibitionResult ParallelBackend::parallel_inhibition_fused(const SpState& state,
                                                            const BinaryFrame& frame,
                                                            const KernelPlan& plan) {
  if (frame.size() != static_cast<std::size_t>(state.config.input_size)) {
    throw InputError("frame has " + std::to_string(frame.size()) + " bits, expected " +
                     std::to_string(state.config.input_size));
  }
  if (plan.num_groups != static_cast<int>(state.columns.size())) {
    throw InputError("kernel plan group count does not match column count");
  }
  InhibitionResult result;
  const auto iteration = state.iteration;

  auto t0 = Clock::now();
  stage_in(state, frame);
  result.records.push_back({Phase::staging_in, elapsed_ns(t0), iteration});

  // pass 1 writes the global overlap buffer, pass 2 re-reads neighborhood slices
  t0 = Clock::now();
  overlap_kernel(state, plan);
  result.records.push_back({Phase::kernel_overlap, elapsed_ns(t0), iteration});

  t0 = Clock::now();
  inhibition_kernel(state);
  result.records.push_back({Phase::kernel_inhibition, elapsed_ns(t0), iteration});

  t0 = Clock::now();
  result.overlaps = device_overlap_;
  for (std::size_t c = 0; c < device_active_.size(); ++c) {
    if (device_active_[c]) result.active.push_back(static_cast<int>(c));
  }
  result.records.push_back({Phase::staging_out, elapsed_ns(t0), iteration});
  return result;
}

double overlap_share(std::span<const ProfileRecord> records) {
  double overlap = 0.0;
  double inhibition = 0.0;
  int overlap_samples = 0;
  int inhibition_samples = 0;
  for (const auto& r : records) {
    if (r.phase == Phase::kernel_overlap) {
      overlap += static_cast<double>(r.duration_ns);
      ++overlap_samples;
    } else if (r.phase == Phase::kernel_inhibition) {
      inhibition += static_cast<double>(r.duration_ns);
      ++inhibition_samples;
    }
  }
  if (overlap_samples == 0 || inhibition_samples == 0) {
    throw ComputationError("overlap share needs kernel_overlap and kernel_inhibition samples");
  }
  if (overlap + inhibition <= 0.0) throw ComputationError("overlap share: total kernel time is zero");
  return overlap / (overlap + inhibition);
}

void write_profile_csv(std::ostream& out, std::span<const ProfileRecord> records,
                       const ProfileContext& context, bool header) {
  if (header) out << kProfileCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.iteration << ',' << phase_name(r.phase) << ',' << r.duration_ns << ','
        << context.backend << ',' << context.num_columns << ',' << context.synapses << ','
        << context.min_overlap << ',' << context.winners_set_size << '\n';
  }
}

}  // namespace htmsp
