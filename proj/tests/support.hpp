#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <string>
#include <vector>

#include "flipbench/flipbench.hpp"

namespace fbtest {

using namespace flipbench;

/// k=2 flip sequence from a word: letter 'a' is vertex 0, 'b' vertex 1, ...
/// Every vertex starts in part 1 and alternates.
inline std::vector<Move> flips(const std::string& word) {
  std::vector<Part> part(26, 1);
  std::vector<Move> out;
  for (char ch : word) {
    const auto v = static_cast<Vertex>(ch - 'a');
    const Part p = part[v], q = p == 1 ? 2 : 1;
    out.push_back({v, p, q});
    part[v] = q;
  }
  return out;
}

/// Sequence of moves of a single vertex following the given parts, e.g.
/// walk(0, {1,2,3,1}) is 1->2, 2->3, 3->1.
inline std::vector<Move> walk(Vertex v, const std::vector<Part>& parts) {
  std::vector<Move> out;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) out.push_back({v, parts[i], parts[i + 1]});
  return out;
}

/// Uniformly random valid moves over n vertices, starting from tau0.
inline std::vector<Move> random_sequence(const Configuration& tau0, Part k, std::size_t length,
                                         std::uint64_t seed) {
  SplitMix64 rng(seed);
  auto tau = tau0;
  std::vector<Move> out;
  for (std::size_t i = 0; i < length; ++i) {
    const auto v = static_cast<Vertex>(rng.uniform_int(0, tau.size() - 1));
    Part q = static_cast<Part>(rng.uniform_int(1, k - 1));
    if (q >= tau[v]) ++q;
    out.push_back({v, tau[v], q});
    tau[v] = q;
  }
  return out;
}

/// Random valid moves where each move picks one of `active` vertices, which
/// makes repeats (and hence cycles) frequent.
inline std::vector<Move> random_sequence_on(std::size_t n, std::size_t active, Part k, std::size_t length,
                                            std::uint64_t seed) {
  SplitMix64 rng(seed);
  Configuration tau = random_configuration(n, k, seed ^ 0x55);
  std::vector<Move> out;
  for (std::size_t i = 0; i < length; ++i) {
    const auto v = static_cast<Vertex>(rng.uniform_int(0, active - 1));
    Part q = static_cast<Part>(rng.uniform_int(1, k - 1));
    if (q >= tau[v]) ++q;
    out.push_back({v, tau[v], q});
    tau[v] = q;
  }
  return out;
}

/// Trace of an engine run on a fresh random instance.
struct Run {
  Instance inst;
  Trace trace;
};

inline Run engine_run(std::size_t n, Part k, std::uint64_t seed, bool complete = true, double p = 0.5,
                      PivotKind rule = PivotKind::first_improving) {
  auto edges = complete ? complete_graph(n) : gnp_graph(n, p, mix_seed(seed, 1));
  auto inst = make_instance(n, k, std::move(edges), SmoothingProfile{Rational(1), {}, mix_seed(seed, 2)}, complete);
  auto tr = run_flip(inst, random_configuration(n, k, mix_seed(seed, 3)), PivotRule{rule, seed}, kDefaultStepCap);
  return {std::move(inst), std::move(tr)};
}

}  // namespace fbtest
