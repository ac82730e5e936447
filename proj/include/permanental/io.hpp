#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permanental/errors.hpp"
#include "permanental/sampling.hpp"

namespace permanental {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// Hash of the compact dump; nlohmann keeps object keys sorted, so equal
// configs hash equally regardless of how they were written.
inline std::string config_hash(const nlohmann::json& cfg) { return hex64(fnv1a64(cfg.dump())); }

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw usage_error("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw usage_error("cannot write " + p.string());
  out << text;
}

// ---- sample batches ----

inline std::string batch_to_csv(const SampleBatch& b) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < b.n_points(); ++j) os << (j ? "," : "") << "t=" << b.points[j];
  os << '\n';
  for (std::size_t r = 0; r < b.n_rep; ++r) {
    for (std::size_t j = 0; j < b.n_points(); ++j) os << (j ? "," : "") << b(r, j);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json batch_to_json(const SampleBatch& b) {
  return {{"seed", b.seed}, {"sampler", sampler_name(b.sampler)}, {"sampler_id", static_cast<std::uint64_t>(b.sampler)},
          {"points", b.points}, {"n_rep", b.n_rep}, {"draws", b.draws}};
}

namespace detail {

inline void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
  return v;
}

}  // namespace detail

// Header: seed, sampler id, n_points, n_rep as little-endian u64, then the
// draws row-major as little-endian f64.
inline std::string batch_to_binary(const SampleBatch& b) {
  std::string s;
  s.reserve(32 + 8 * b.draws.size());
  detail::put_u64(s, b.seed);
  detail::put_u64(s, static_cast<std::uint64_t>(b.sampler));
  detail::put_u64(s, b.n_points());
  detail::put_u64(s, b.n_rep);
  for (double x : b.draws) detail::put_u64(s, std::bit_cast<std::uint64_t>(x));
  return s;
}

inline SampleBatch batch_from_binary(const std::string& s) {
  if (s.size() < 32) throw parameter_error("binary batch: truncated header");
  SampleBatch b;
  b.seed = detail::get_u64(s, 0);
  b.sampler = static_cast<SamplerId>(detail::get_u64(s, 8));
  const auto np = detail::get_u64(s, 16);
  b.n_rep = detail::get_u64(s, 24);
  if (s.size() != 32 + 8 * np * b.n_rep) throw parameter_error("binary batch: size does not match header");
  b.points.assign(np, 0.0);
  b.draws.resize(np * b.n_rep);
  for (std::size_t i = 0; i < b.draws.size(); ++i) b.draws[i] = std::bit_cast<double>(detail::get_u64(s, 32 + 8 * i));
  return b;
}

}  // namespace permanental
