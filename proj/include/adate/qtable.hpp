#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adate/grid.hpp"
#include "adate/io.hpp"
#include "adate/state.hpp"
#include "adate/version.hpp"

namespace adate {

// Dense (state x joint action) value table. Rows exist for the two terminal
// indices as well and stay exactly zero; bootstrapping through a terminal row
// then contributes nothing without special-casing.
struct QTable {
  std::uint64_t grid_hash = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  int horizon = -1;  // number of steps the values cover; -1 = stationary
  int n_actions = 0;
  CellIndex n_states = 0;  // grid cells + 2 terminal rows
  std::vector<double> values;

  static QTable zeros(const GridSpec& g, double gamma, int horizon) {
    QTable t;
    t.grid_hash = g.hash();
    t.gamma = gamma;
    t.horizon = horizon;
    t.n_actions = g.n_actions();
    t.n_states = g.state_count();
    t.values.assign(static_cast<std::size_t>(t.n_states) * t.n_actions, 0.0);
    return t;
  }

  double at(CellIndex s, int a) const {
    return values[static_cast<std::size_t>(s) * n_actions + a];
  }
  double& at(CellIndex s, int a) {
    return values[static_cast<std::size_t>(s) * n_actions + a];
  }
  const double* row(CellIndex s) const {
    return values.data() + static_cast<std::size_t>(s) * n_actions;
  }

  std::string to_csv() const {
    std::string out = "state_index,action_index,value\n";
    for (CellIndex s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        out += std::to_string(s);
        out += ',';
        out += std::to_string(a);
        out += ',';
        out += fmt_double(at(s, a));
        out += '\n';
      }
    }
    return out;
  }

  void save(const std::string& path, std::uint32_t kind = 0) const;
  static QTable load(const std::string& path, std::uint32_t expect_kind = 0);
};

namespace detail {

inline constexpr char kQTableMagic[8] = {'A', 'D', 'A', 'T', 'E', 'Q', 'T', '\0'};
inline constexpr std::uint32_t kQTableFormatVersion = 1;

template <class T>
void put_raw(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_raw(const std::string& in, std::size_t& off, const std::string& path) {
  if (off + sizeof(T) > in.size()) {
    throw std::runtime_error("truncated table file: " + path);
  }
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace detail

// Little-endian binary layout: magic, format version, kind (0 = values,
// 1 = visit counts), tool version, grid hash, config hash, seed, gamma,
// horizon, n_actions, n_states, then row-major float64 payload.
inline void QTable::save(const std::string& path, std::uint32_t kind) const {
  std::string out;
  out.append(detail::kQTableMagic, sizeof(detail::kQTableMagic));
  detail::put_raw(out, detail::kQTableFormatVersion);
  detail::put_raw(out, kind);
  detail::put_raw(out, static_cast<std::uint32_t>(kVersionMajor));
  detail::put_raw(out, static_cast<std::uint32_t>(kVersionMinor));
  detail::put_raw(out, grid_hash);
  detail::put_raw(out, config_hash);
  detail::put_raw(out, seed);
  detail::put_raw(out, gamma);
  detail::put_raw(out, static_cast<std::int32_t>(horizon));
  detail::put_raw(out, static_cast<std::int32_t>(n_actions));
  detail::put_raw(out, static_cast<std::int64_t>(n_states));
  const std::size_t n = values.size();
  out.reserve(out.size() + n * sizeof(double));
  for (double v : values) detail::put_raw(out, v);
  write_text_file(path, out);
}

inline QTable QTable::load(const std::string& path, std::uint32_t expect_kind) {
  const std::string in = read_text_file(path);
  std::size_t off = 0;
  char magic[8];
  if (in.size() < sizeof(magic)) {
    throw std::runtime_error("not a table file: " + path);
  }
  std::memcpy(magic, in.data(), sizeof(magic));
  off = sizeof(magic);
  if (std::memcmp(magic, detail::kQTableMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("bad magic in table file: " + path);
  }
  const auto version = detail::get_raw<std::uint32_t>(in, off, path);
  if (version != detail::kQTableFormatVersion) {
    throw std::runtime_error("unsupported table format version in " + path);
  }
  const auto kind = detail::get_raw<std::uint32_t>(in, off, path);
  if (kind != expect_kind) {
    throw std::runtime_error("table kind mismatch in " + path);
  }
  detail::get_raw<std::uint32_t>(in, off, path);  // tool major
  detail::get_raw<std::uint32_t>(in, off, path);  // tool minor
  QTable t;
  t.grid_hash = detail::get_raw<std::uint64_t>(in, off, path);
  t.config_hash = detail::get_raw<std::uint64_t>(in, off, path);
  t.seed = detail::get_raw<std::uint64_t>(in, off, path);
  t.gamma = detail::get_raw<double>(in, off, path);
  t.horizon = detail::get_raw<std::int32_t>(in, off, path);
  t.n_actions = detail::get_raw<std::int32_t>(in, off, path);
  t.n_states = detail::get_raw<std::int64_t>(in, off, path);
  if (t.n_actions <= 0 || t.n_states <= 2) {
    throw std::runtime_error("corrupt table header in " + path);
  }
  const std::size_t n =
      static_cast<std::size_t>(t.n_states) * static_cast<std::size_t>(t.n_actions);
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.values[i] = detail::get_raw<double>(in, off, path);
  }
  return t;
}

}  // namespace adate
