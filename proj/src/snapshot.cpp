#include "htmsp/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

constexpr std::array<char, 8> kMagic = {'H', 'T', 'M', 'S', 'P', 'S', 'N', 'P'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u64(std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(b.data(), b.size());
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t u64() {
    std::array<unsigned char, 8> b;
    in_.read(reinterpret_cast<char*>(b.data()), b.size());
    if (!in_) throw InputError("snapshot truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  int i32() { return static_cast<int>(i64()); }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::istream& in_;
};

}  // namespace

void save_snapshot(const SpState& state, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  Writer w(out);
  w.u64(kSnapshotVersion);
  const auto& c = state.config;
  w.i64(c.num_columns);
  w.i64(c.synapses_per_column);
  w.i64(c.min_overlap);
  w.i64(c.winners_set_size);
  w.f64(c.perm_increment);
  w.f64(c.perm_decrement);
  w.f64(c.initial_permanence);
  w.f64(c.connected_threshold);
  w.i64(c.initial_inhibition_radius);
  w.f64(c.max_boost);
  w.i64(c.duty_cycle_period);
  w.i64(c.input_size);
  w.u64(c.rng_seed);
  w.i64(state.inhibition_radius);
  w.u64(state.iteration);
  w.u64(state.columns.size());
  for (const auto& col : state.columns) {
    w.u64(col.synapse_inputs.size());
    for (int s : col.synapse_inputs) w.i64(s);
    for (double p : col.permanences) w.f64(p);
    w.f64(col.boost);
    w.f64(col.overlap);
    w.u64(col.active ? 1 : 0);
    w.f64(col.active_duty_cycle);
    w.f64(col.overlap_duty_cycle);
  }
  if (!out) throw InputError("failed writing snapshot");
}

SpState load_snapshot(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InputError("not an SP snapshot");
  Reader r(in);
  const auto version = r.u64();
  if (version != kSnapshotVersion) {
    throw InputError("unsupported snapshot version " + std::to_string(version));
  }
  SpState state;
  auto& c = state.config;
  c.num_columns = r.i32();
  c.synapses_per_column = r.i32();
  c.min_overlap = r.i32();
  c.winners_set_size = r.i32();
  c.perm_increment = r.f64();
  c.perm_decrement = r.f64();
  c.initial_permanence = r.f64();
  c.connected_threshold = r.f64();
  c.initial_inhibition_radius = r.i32();
  c.max_boost = r.f64();
  c.duty_cycle_period = r.i32();
  c.input_size = r.i32();
  c.rng_seed = r.u64();
  c.validate();
  state.inhibition_radius = r.i32();
  state.iteration = r.u64();
  const auto num = r.u64();
  if (num != static_cast<std::uint64_t>(c.num_columns)) throw InputError("snapshot column count mismatch");
  state.columns.resize(num);
  for (auto& col : state.columns) {
    const auto syn = r.u64();
    if (syn != static_cast<std::uint64_t>(c.synapses_per_column)) {
      throw InputError("snapshot synapse count mismatch");
    }
    col.synapse_inputs.resize(syn);
    col.permanences.resize(syn);
    for (auto& s : col.synapse_inputs) s = r.i32();
    for (auto& p : col.permanences) p = r.f64();
    col.boost = r.f64();
    col.overlap = r.f64();
    col.active = r.u64() != 0;
    col.active_duty_cycle = r.f64();
    col.overlap_duty_cycle = r.f64();
  }
  return state;
}

void save_snapshot(const SpState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  save_snapshot(state, out);
}

SpState load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return load_snapshot(in);
}

}  // namespace htmsp
