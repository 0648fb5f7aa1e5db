#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "zagff/error.hpp"
#include "zagff/sampler.hpp"

namespace zagff {

namespace {

constexpr std::array<char, 8> kMagic = {'Z', 'A', 'G', 'F', 'F', 'L', 'D', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::uint64_t bits = 0;
  if constexpr (sizeof(T) == 8) {
    std::memcpy(&bits, &value, 8);
  } else {
    std::uint32_t b32 = 0;
    std::memcpy(&b32, &value, 4);
    bits = b32;
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw Error(ErrorKind::kIo, "truncated field file");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T value{};
  if constexpr (sizeof(T) == 8) {
    std::memcpy(&value, &bits, 8);
  } else {
    const auto b32 = static_cast<std::uint32_t>(bits);
    std::memcpy(&value, &b32, 4);
  }
  return value;
}

}  // namespace

void write_field_binary(const TorusField& field, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.cfg.d()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.cfg.n()));
  put_le<std::uint64_t>(out, field.seed);
  for (double v : field.values) put_le<double>(out, v);
  if (!out) throw Error(ErrorKind::kIo, "failed writing field");
}

TorusField read_field_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorKind::kIo, "not a field file (bad magic)");
  }
  const auto d = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  const auto seed = get_le<std::uint64_t>(in);
  const FieldConfig cfg(static_cast<int>(d), static_cast<int>(n));
  TorusField field{cfg, std::vector<double>(static_cast<std::size_t>(cfg.sites())), seed};
  for (auto& v : field.values) v = get_le<double>(in);
  return field;
}

void write_field_csv(const TorusField& field, std::ostream& out) {
  const auto& cfg = field.cfg;
  for (int j = 1; j <= cfg.d(); ++j) out << 'x' << j << ',';
  out << "value\n";
  std::vector<Coord> c(static_cast<std::size_t>(cfg.d()));
  char buf[40];
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    site_coords(idx, cfg, c);
    for (Coord v : c) out << v << ',';
    std::snprintf(buf, sizeof buf, "%.17g", field.values[static_cast<std::size_t>(idx)]);
    out << buf << '\n';
  }
}

TorusField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kIo, "empty field CSV");
  int d = 0;
  for (char ch : line) d += ch == ',' ? 1 : 0;
  std::vector<std::vector<Coord>> coords;
  std::vector<double> values;
  Coord max_coord = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<Coord> c;
    for (int j = 0; j < d; ++j) {
      if (!std::getline(row, cell, ',')) throw Error(ErrorKind::kIo, "short CSV row");
      c.push_back(std::stoll(cell));
      max_coord = std::max(max_coord, c.back());
    }
    if (!std::getline(row, cell)) throw Error(ErrorKind::kIo, "CSV row without value");
    values.push_back(std::strtod(cell.c_str(), nullptr));
    coords.push_back(std::move(c));
  }
  const FieldConfig cfg(d, static_cast<int>(max_coord + 1));
  if (static_cast<std::int64_t>(values.size()) != cfg.sites()) {
    throw Error(ErrorKind::kIo, "CSV does not cover every torus site");
  }
  TorusField field{cfg, std::vector<double>(values.size()), 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto idx = site_index(TorusPoint(coords[i], cfg), cfg);
    field.values[static_cast<std::size_t>(idx)] = values[i];
  }
  return field;
}

}  // namespace zagff
