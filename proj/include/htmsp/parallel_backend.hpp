#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htmsp/binary_frame.hpp"
#include "htmsp/lane_pool.hpp"
#include "htmsp/spatial_pooler.hpp"

namespace htmsp {

enum class Phase { staging_in, kernel_overlap, kernel_inhibition, staging_out };

std::string_view phase_name(Phase phase);
Phase parse_phase(std::string_view name);

struct ProfileRecord {
  Phase phase = Phase::kernel_overlap;
  std::int64_t duration_ns = 0;
  std::uint64_t iteration = 0;

  bool operator==(const ProfileRecord&) const = default;
};

/// Launch geometry: one work group per column, group_size work-items each.
struct KernelPlan {
  int group_size = 1;
  int num_groups = 1;
  bool fused = true;
  /// Synapses folded by each work-item before the tree reduction.
  int items_per_lane = 1;
};

inline constexpr int kDefaultMaxGroupSize = 1024;

KernelPlan plan_kernels(const SpConfig& config, bool fused = true,
                        int max_group_size = kDefaultMaxGroupSize);

/// In-place binary-tree sum over a power-of-two sized scratch buffer.
/// Returns the total; the buffer contents are clobbered.
int tree_reduce_sum(std::span<int> local);

struct OverlapResult {
  std::vector<double> overlaps;
  std::vector<ProfileRecord> records;
};

struct InhibitionResult {
  std::vector<double> overlaps;
  std::vector<int> active;
  std::vector<ProfileRecord> records;
};

/// Host realization of the work-group-per-column kernels. Frames are packed
/// into 32-bit words and boosts copied into device-side buffers during
/// staging; kernels run one column group at a time across worker lanes.
/// The state is only read.
class ParallelBackend {
 public:
  explicit ParallelBackend(int lanes = 0) : pool_(lanes) {}

  int lanes() const { return pool_.lanes(); }

  OverlapResult parallel_overlap(const SpState& state, const BinaryFrame& frame,
                                 const KernelPlan& plan);

  InhibitionResult parallel_inhibition_fused(const SpState& state, const BinaryFrame& frame,
                                             const KernelPlan& plan);

 private:
  void stage_in(const SpState& state, const BinaryFrame& frame);
  void overlap_kernel(const SpState& state, const KernelPlan& plan);
  void inhibition_kernel(const SpState& state);

  LanePool pool_;
  std::vector<std::uint32_t> device_frame_;
  std::vector<double> device_boost_;
  std::vector<double> device_overlap_;
  std::vector<std::uint8_t> device_active_;
  std::vector<std::vector<int>> lane_scratch_;
  std::vector<std::vector<double>> lane_slice_;
};

/// Σ kernel_overlap / (Σ kernel_overlap + Σ kernel_inhibition).
double overlap_share(std::span<const ProfileRecord> records);

struct ProfileContext {
  std::string backend;
  int num_columns = 0;
  int synapses = 0;
  int min_overlap = 0;
  int winners_set_size = 0;
};

inline constexpr std::string_view kProfileCsvHeader =
    "iteration,phase,duration_ns,backend,num_columns,synapses,min_overlap,winners_set_size";

void write_profile_csv(std::ostream& out, std::span<const ProfileRecord> records,
                       const ProfileContext& context, bool header = true);

}  // namespace htmsp
