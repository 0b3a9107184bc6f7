#pragma once

// Trace files.
//
//   # flipbench trace
//   instance_hash <16 hex digits>
//   n <vertices>
//   k <parts>
//   rule <first|best|random|replay>
//   seed <u64>
//   tau0 <n part labels>
//   cap_hit <0|1>
//   steps <count>
//   <t> <v> <p> <q> <delta_num>      one line per step, t is 1-based
//
// delta_num is the exact improvement in units of 1/D of the instance.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "flipbench/engine.hpp"
#include "flipbench/instance_io.hpp"

namespace flipbench {

struct TraceHeader {
  std::string instance_hash;
  std::size_t n = 0;
  Part k = 0;
  std::string rule = "replay";
  std::uint64_t seed = 0;
};

struct TraceFile {
  TraceHeader header;
  Trace trace;
};

inline void write_trace(std::ostream& out, const TraceHeader& h, const Trace& tr) {
  out << "# flipbench trace\n";
  out << "instance_hash " << h.instance_hash << '\n';
  out << "n " << h.n << '\n';
  out << "k " << h.k << '\n';
  out << "rule " << h.rule << '\n';
  out << "seed " << h.seed << '\n';
  out << "tau0";
  for (auto p : tr.tau0.parts()) out << ' ' << p;
  out << '\n';
  out << "cap_hit " << (tr.cap_hit ? 1 : 0) << '\n';
  out << "steps " << tr.length() << '\n';
  for (std::size_t t = 0; t < tr.length(); ++t) {
    const auto& s = tr.steps[t];
    out << t + 1 << ' ' << s.move.v << ' ' << s.move.from << ' ' << s.move.to << ' ' << s.delta
        << '\n';
  }
}

/// Parses a trace file without an instance. Deltas are taken as written; use
/// `load_trace_checked` to re-validate them.
inline TraceFile read_trace(std::istream& in) {
  TraceFile tf;
  std::string line;
  std::size_t lineno = 0;
  std::size_t declared_steps = 0;
  bool in_steps = false;
  bool have_tau0 = false;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    if (in_steps) {
      long long t, v, p, q;
      Ticks d;
      std::string extra;
      if (!(ls >> t >> v >> p >> q >> d) || (ls >> extra))
        throw ParseError(lineno, "expected 't v p q delta_num'");
      if (t != static_cast<long long>(tf.trace.steps.size()) + 1)
        throw ParseError(lineno, "step index out of sequence");
      if (v < 0 || p < 1 || q < 1) throw ParseError(lineno, "negative vertex or part label");
      tf.trace.steps.push_back(
          {{static_cast<Vertex>(v), static_cast<Part>(p), static_cast<Part>(q)}, d});
      if (d <= 0) tf.trace.non_improving.push_back(tf.trace.steps.size() - 1);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "instance_hash") {
      ls >> tf.header.instance_hash;
    } else if (key == "n") {
      if (!(ls >> tf.header.n)) throw ParseError(lineno, "bad n");
    } else if (key == "k") {
      if (!(ls >> tf.header.k)) throw ParseError(lineno, "bad k");
    } else if (key == "rule") {
      ls >> tf.header.rule;
    } else if (key == "seed") {
      if (!(ls >> tf.header.seed)) throw ParseError(lineno, "bad seed");
    } else if (key == "tau0") {
      std::vector<Part> parts;
      long long p;
      while (ls >> p) {
        if (p < 1) throw ParseError(lineno, "part labels must be positive");
        parts.push_back(static_cast<Part>(p));
      }
      if (!ls.eof()) throw ParseError(lineno, "non-numeric part label");
      tf.trace.tau0 = Configuration(std::move(parts));
      have_tau0 = true;
    } else if (key == "cap_hit") {
      int c = 0;
      if (!(ls >> c)) throw ParseError(lineno, "bad cap_hit");
      tf.trace.cap_hit = c != 0;
    } else if (key == "steps") {
      if (!(ls >> declared_steps)) throw ParseError(lineno, "bad step count");
      in_steps = true;
    } else {
      throw ParseError(lineno, "unknown trace key '" + key + "'");
    }
  }
  if (!have_tau0) throw ParseError(0, "trace has no tau0 line");
  if (tf.header.n && tf.trace.tau0.size() != tf.header.n)
    throw ParseError(0, "tau0 length does not match n");
  if (tf.trace.steps.size() != declared_steps)
    throw ParseError(0, "declared " + std::to_string(declared_steps) + " steps, found " +
                            std::to_string(tf.trace.steps.size()));
  return tf;
}

inline TraceFile load_trace(const std::string& path) {
  auto in = detail::open_input(path);
  return read_trace(in);
}

inline void save_trace(const std::string& path, const TraceHeader& h, const Trace& tr) {
  auto out = detail::open_output(path);
  write_trace(out, h, tr);
}

/// Loads a trace and replays it against `inst`, so every delta is recomputed
/// exactly. Rejects a mismatching instance hash or recorded delta.
inline TraceFile load_trace_checked(const std::string& path, const Instance& inst) {
  auto tf = load_trace(path);
  const auto hash = hex64(instance_hash(inst));
  if (!tf.header.instance_hash.empty() && tf.header.instance_hash != hash)
    throw InvalidInput("trace was recorded on instance " + tf.header.instance_hash +
                       ", given instance hashes to " + hash);
  auto replayed = replay(inst, tf.trace.tau0, tf.trace.moves());
  for (std::size_t t = 0; t < replayed.length(); ++t)
    if (replayed.steps[t].delta != tf.trace.steps[t].delta)
      throw InvalidInput("recorded delta at step " + std::to_string(t + 1) +
                         " does not match the instance");
  replayed.cap_hit = tf.trace.cap_hit;
  tf.trace = std::move(replayed);
  return tf;
}

inline std::uint64_t trace_hash(const Trace& tr) {
  std::ostringstream os;
  write_trace(os, TraceHeader{}, tr);
  return fnv1a(os.str());
}

}  // namespace flipbench
