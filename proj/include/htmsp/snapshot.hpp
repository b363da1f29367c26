#pragma once

#include <filesystem>
#include <iosfwd>

#include "htmsp/spatial_pooler.hpp"

namespace htmsp {

// Versioned binary dump of SpConfig plus every Column field. Reals are
// stored as their raw IEEE-754 bits, so a round trip is exact.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void save_snapshot(const SpState& state, std::ostream& out);
SpState load_snapshot(std::istream& in);

void save_snapshot(const SpState& state, const std::filesystem::path& path);
SpState load_snapshot(const std::filesystem::path& path);

}  // namespace htmsp
