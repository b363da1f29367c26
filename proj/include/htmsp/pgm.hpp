#pragma once

#include <filesystem>
#include <iosfwd>

#include "htmsp/gray_frame.hpp"

namespace htmsp {

// Binary PGM (P5) with maxval 255.
GrayFrame read_pgm(std::istream& in);
GrayFrame read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& out, const GrayFrame& frame);
void write_pgm(const std::filesystem::path& path, const GrayFrame& frame);

}  // namespace htmsp
