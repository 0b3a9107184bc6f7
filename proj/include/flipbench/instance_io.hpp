#pragma once

// Line-based text formats for instances and configurations.
//
// Instance:       header `n k D phi complete`, then one `u v num` line per edge.
// Configuration:  one line of n part labels.
//
// Vertices are 0-based, part labels 1-based. Lines starting with '#' are ignored.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "flipbench/core.hpp"

namespace flipbench {

namespace detail {

/// Next non-blank, non-comment line; false at end of input.
inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

inline void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.n() << ' ' << inst.k() << ' ' << inst.denominator() << ' ' << to_string(inst.phi())
      << ' ' << (inst.complete() ? 1 : 0) << '\n';
  for (EdgeId e = 0; e < inst.edge_count(); ++e)
    out << inst.edge(e).u << ' ' << inst.edge(e).v << ' ' << inst.weight(e) << '\n';
}

inline Instance read_instance(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::next_content_line(in, line, lineno)) throw ParseError(0, "empty instance");
  std::size_t n = 0;
  Part k = 0;
  Ticks denom = 0;
  std::string phi_text;
  int complete = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> k >> denom >> phi_text >> complete))
      throw ParseError(lineno, "expected header 'n k D phi complete'");
  }
  Rational phi;
  try {
    phi = parse_rational(phi_text);
  } catch (const ParseError& e) {
    throw ParseError(lineno, e.what());
  }
  std::vector<Edge> edges;
  std::vector<Ticks> weights;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    long long u = -1, v = -1;
    Ticks w = 0;
    std::string extra;
    if (!(ls >> u >> v >> w) || (ls >> extra) || u < 0 || v < 0)
      throw ParseError(lineno, "expected 'u v num'");
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    weights.push_back(w);
  }
  return Instance(n, k, std::move(edges), std::move(weights), denom, phi, complete != 0);
}

inline Instance load_instance(const std::string& path) {
  auto in = detail::open_input(path);
  return read_instance(in);
}

inline void save_instance(const std::string& path, const Instance& inst) {
  auto out = detail::open_output(path);
  write_instance(out, inst);
}

inline void write_configuration(std::ostream& out, const Configuration& tau) {
  for (std::size_t i = 0; i < tau.size(); ++i) out << (i ? " " : "") << tau[static_cast<Vertex>(i)];
  out << '\n';
}

inline Configuration read_configuration(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::next_content_line(in, line, lineno)) throw ParseError(0, "empty configuration");
  std::istringstream ls(line);
  std::vector<Part> parts;
  long long p;
  while (ls >> p) {
    if (p < 1) throw ParseError(lineno, "part labels must be positive");
    parts.push_back(static_cast<Part>(p));
  }
  if (!ls.eof()) throw ParseError(lineno, "non-numeric part label");
  return Configuration(std::move(parts));
}

/// 64-bit FNV-1a, used to tie traces and reports to the instance they came from.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return s;
}

inline std::uint64_t instance_hash(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return fnv1a(os.str());
}

}  // namespace flipbench
