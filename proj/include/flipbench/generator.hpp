#pragma once

// Seeded graph construction and smoothed edge-weight sampling.
//
// Every random draw is a pure function of (seed, stream, index), so sampling is
// bit-exact across runs and independent of evaluation order.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flipbench/core.hpp"
#include "flipbench/instance_io.hpp"

namespace flipbench {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) + b);
}

/// Counter-based generator; also usable as a UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi]; rejection sampling keeps it unbiased and
  /// platform independent.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>((*this)());
    const std::uint64_t limit = max() - max() % span;
    std::uint64_t x;
    do x = (*this)();
    while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class GraphKind { complete, gnp, edge_list };

inline std::vector<Edge> complete_graph(std::size_t n) {
  if (n < 2) throw InvalidParameter("graph needs n >= 2");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  return edges;
}

inline std::vector<Edge> gnp_graph(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw InvalidParameter("graph needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("gnp edge probability must lie in [0,1]");
  std::vector<Edge> edges;
  std::uint64_t pair = 0;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v, ++pair) {
      SplitMix64 rng(mix_seed(seed, 0x67eULL, pair));
      if (rng.uniform01() < p) edges.push_back({u, v});
    }
  return edges;
}

/// One `u v` pair per line ('#' comments allowed). Errors carry the line number.
inline std::vector<Edge> read_edge_list(std::istream& in, std::size_t n) {
  if (n < 2) throw InvalidParameter("graph needs n >= 2");
  std::vector<Edge> edges;
  std::set<std::uint64_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    long long u = -1, v = -1;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra)) throw ParseError(lineno, "expected 'u v'");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw ParseError(lineno, "vertex out of range");
    if (u == v) throw ParseError(lineno, "self-loop");
    auto a = static_cast<Vertex>(std::min(u, v)), b = static_cast<Vertex>(std::max(u, v));
    if (!seen.insert((std::uint64_t{a} << 32) | b).second) throw ParseError(lineno, "duplicate edge");
    edges.push_back({a, b});
  }
  return edges;
}

inline std::vector<Edge> build_graph(GraphKind kind, std::size_t n, double p = 0.0,
                                     std::uint64_t seed = 0) {
  switch (kind) {
    case GraphKind::complete: return complete_graph(n);
    case GraphKind::gnp: return gnp_graph(n, p, seed);
    case GraphKind::edge_list: break;
  }
  throw InvalidParameter("edge-list graphs are built with read_edge_list");
}

/// Uniform density of height exactly phi on [c_e - 1/(2 phi), c_e + 1/(2 phi)].
struct SmoothingProfile {
  Rational phi{1, 2};
  std::vector<Ticks> centers;  // per edge, in ticks; empty means all zero
  std::uint64_t seed = 0;
};

struct WeightSupport {
  Ticks lo;
  Ticks hi;
};

/// Integer grid support of edge e's weight distribution (in ticks).
inline WeightSupport weight_support(const SmoothingProfile& prof, std::size_t e, Ticks denom) {
  if (prof.phi < Rational(1, 2)) throw InvalidParameter("phi < 1/2: support would exceed [-1,1]");
  const Rational half = Rational(1) / (prof.phi * 2);
  const Ticks c = prof.centers.empty() ? 0 : prof.centers.at(e);
  const Rational center(c, denom);
  if (center - half < -1 || center + half > 1)
    throw InvalidParameter("center of edge " + std::to_string(e) + " puts support outside [-1,1]");
  const Ticks h = floor(half * denom);
  return {c - h, c + h};
}

inline Ticks sample_weight(const SmoothingProfile& prof, std::size_t e, Ticks denom) {
  const auto [lo, hi] = weight_support(prof, e, denom);
  SplitMix64 rng(mix_seed(prof.seed, 0x3e1947ULL, e));
  return rng.uniform_int(lo, hi);
}

inline std::vector<Ticks> sample_weights(std::size_t edge_count, const SmoothingProfile& prof,
                                         Ticks denom = kDefaultDenominator) {
  if (!prof.centers.empty() && prof.centers.size() != edge_count)
    throw InvalidParameter("profile has " + std::to_string(prof.centers.size()) +
                           " centers for " + std::to_string(edge_count) + " edges");
  std::vector<Ticks> w(edge_count);
  for (std::size_t e = 0; e < edge_count; ++e) w[e] = sample_weight(prof, e, denom);
  return w;
}

/// Centers taken from an existing instance's weights, clamped so each support
/// stays inside [-1,1]. Models noise added on top of an adversarial instance.
inline std::vector<Ticks> centers_from_instance(const Instance& base, Rational phi) {
  if (phi < Rational(1, 2)) throw InvalidParameter("phi < 1/2: support would exceed [-1,1]");
  const Ticks denom = base.denominator();
  const Ticks bound = floor((Rational(1) - Rational(1) / (phi * 2)) * denom);
  std::vector<Ticks> c(base.edge_count());
  for (EdgeId e = 0; e < base.edge_count(); ++e)
    c[e] = std::clamp(base.weight(e), -bound, bound);
  return c;
}

inline Instance make_instance(std::size_t n, Part k, std::vector<Edge> edges,
                              const SmoothingProfile& prof, bool complete,
                              Ticks denom = kDefaultDenominator) {
  auto w = sample_weights(edges.size(), prof, denom);
  return Instance(n, k, std::move(edges), std::move(w), denom, prof.phi, complete);
}

inline Instance random_complete_instance(std::size_t n, Part k, Rational phi, std::uint64_t seed) {
  return make_instance(n, k, complete_graph(n), SmoothingProfile{phi, {}, seed}, true);
}

inline Configuration random_configuration(std::size_t n, Part k, std::uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, 0x7a0ULL));
  std::vector<Part> parts(n);
  for (auto& p : parts) p = static_cast<Part>(rng.uniform_int(1, k));
  return Configuration(std::move(parts));
}

/// Profile file: `phi <rational>`, `seed <u64>`, optional `centers <instance path>`.
struct ProfileFile {
  SmoothingProfile profile;
  std::string centers_path;
};

inline ProfileFile read_profile(std::istream& in) {
  ProfileFile pf;
  std::string line;
  std::size_t lineno = 0;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (value.empty()) throw ParseError(lineno, "expected 'key value'");
    try {
      if (key == "phi")
        pf.profile.phi = parse_rational(value);
      else if (key == "seed")
        pf.profile.seed = std::stoull(value);
      else if (key == "centers")
        pf.centers_path = value;
      else
        throw ParseError(lineno, "unknown profile key '" + key + "'");
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "bad value '" + value + "'");
    } catch (const ParseError& e) {
      if (e.line() == 0) throw ParseError(lineno, e.what());
      throw;
    }
  }
  return pf;
}

}  // namespace flipbench
