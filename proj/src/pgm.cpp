#include "htmsp/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

// Skips whitespace and '#' comments, then reads a decimal header field.
int read_header_int(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw InputError("malformed PGM header");
  return value;
}

}  // namespace

GrayFrame read_pgm(std::istream& in) {
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') throw InputError("not a binary PGM (P5) file");
  const int width = read_header_int(in);
  const int height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (width <= 0 || height <= 0) throw InputError("PGM has non-positive dimensions");
  if (maxval != 255) throw InputError("only 8-bit PGM (maxval 255) is supported");
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) throw InputError("malformed PGM header");
  GrayFrame frame(width, height);
  in.read(reinterpret_cast<char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    throw InputError("PGM pixel data truncated");
  }
  return frame;
}

GrayFrame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_pgm(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const GrayFrame& frame) {
  out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_pgm(out, frame);
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace htmsp
