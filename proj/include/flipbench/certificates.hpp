#pragma once

// Rank certificates: good arcs, the singleton-path procedure, the k=2
// reverse-BFS DAG with augmentation, leaping and tricky cycles for k=3, the
// neighbor-wise independent arc selection, the c(L)/2 certificate, and an
// independent validator.
//
// A certificate is a directed graph on moving vertices. Every arc vu carries a
// witness column of P (a pair or cycle over v) with a nonzero entry on edge
// {u, v}. The order of a node's out-arcs in `arcs` is its independence order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "flipbench/analysis.hpp"
#include "flipbench/engine.hpp"
#include "flipbench/matrices.hpp"

namespace flipbench {

struct Arc {
  Vertex tail;
  Vertex head;
  std::size_t witness;  // column of P
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct CertificateGraph {
  std::vector<Vertex> nodes;  // S(L), ascending
  std::vector<Arc> arcs;

  std::size_t size() const noexcept { return arcs.size(); }
  std::vector<Arc> out(Vertex v) const {
    std::vector<Arc> o;
    for (const auto& a : arcs)
      if (a.tail == v) o.push_back(a);
    return o;
  }
};

// ---------------------------------------------------------------------------
// Good arcs

/// First column over v (in column order) with a nonzero entry on {u, v}.
inline std::optional<std::size_t> is_good_arc(const Instance& inst, const SignMatrix& P, Vertex v,
                                              Vertex u) {
  const auto e = inst.edge_id(u, v);
  if (!e) return std::nullopt;
  for (std::size_t c = 0; c < P.cols(); ++c)
    if (P.info(c).v == v && P.at(*e, c) != 0) return c;
  return std::nullopt;
}

/// k=2 shortcut: vu is good iff u occurs an odd number of times strictly
/// inside some pair of v. Returns that pair.
inline std::optional<PairRef> is_good_arc_parity(Sequence seq, Vertex v, Vertex u) {
  for (const auto& pr : pairs(seq)) {
    if (pr.v != v) continue;
    std::size_t cnt = 0;
    for (std::size_t t = pr.t1 + 1; t < pr.t2; ++t) cnt += seq[t].v == u;
    if (cnt % 2 == 1) return pr;
  }
  return std::nullopt;
}

/// Column index of every P column keyed by (vertex, times).
inline std::map<std::pair<Vertex, std::vector<std::size_t>>, std::size_t> column_index(
    const SignMatrix& P) {
  std::map<std::pair<Vertex, std::vector<std::size_t>>, std::size_t> idx;
  for (std::size_t c = 0; c < P.cols(); ++c) idx.emplace(std::make_pair(P.info(c).v, P.info(c).times), c);
  return idx;
}

// ---------------------------------------------------------------------------
// Singleton paths (k = 2)

struct PathArc {
  Vertex tail;
  Vertex head;
  PairRef witness;  // pair of `tail` with `head` occurring once inside it
};

namespace detail {

/// Vertices occurring exactly once in seq[lo, hi], ascending.
inline std::vector<Vertex> singletons_in(Sequence seq, std::size_t lo, std::size_t hi) {
  std::map<Vertex, std::size_t> cnt;
  for (std::size_t t = lo; t <= hi; ++t) ++cnt[seq[t].v];
  std::vector<Vertex> out;
  for (const auto& [v, c] : cnt)
    if (c == 1) out.push_back(v);
  return out;
}

inline std::size_t position_in(Sequence seq, std::size_t lo, std::size_t hi, Vertex u) {
  for (std::size_t t = lo; t <= hi; ++t)
    if (seq[t].v == u) return t;
  throw ContractViolation("vertex not found in block");
}

}  // namespace detail

/// Path of good arcs from a repeating vertex v of the block to a singleton of
/// the block, built by growing a nested chain of sub-blocks B_0 < B_1 < ...
/// from the first pair of v. Arbitrary choices resolve to the smallest vertex;
/// a chain block is extended toward the earlier adjacent occurrence when one
/// exists outside it, otherwise toward the later one.
inline std::vector<PathArc> singleton_path(Sequence block, Vertex v) {
  const auto occ = occurrence_stats(block);
  if (occ.singletons.empty()) throw Refused("block has no singleton vertex");
  if (occ.count(v) < 2) throw Refused("vertex " + std::to_string(v) + " is not repeating in the block");
  const auto& vt = occ.times.at(v);

  struct Stage {
    std::size_t lo, hi;           // B_i = block[lo, hi]
    std::vector<Vertex> single;   // S1(B_i)
  };
  std::vector<Stage> chain;
  std::vector<Vertex> us{v};
  std::vector<std::pair<std::size_t, std::size_t>> link;  // (r_u, q_u) for u_1..u_k

  std::size_t lo = vt[0], hi = vt[1];
  chain.push_back({lo, hi, detail::singletons_in(block, lo, hi)});
  auto pick = [&](const Stage& st) {
    std::vector<Vertex> cand;
    for (auto u : st.single)
      if (std::find(us.begin(), us.end(), u) == us.end()) cand.push_back(u);
    if (cand.empty()) throw ContractViolation("sub-block without a fresh singleton; block is not critical");
    return cand.front();
  };
  Vertex u = pick(chain.back());
  std::size_t r_u = detail::position_in(block, lo, hi, u);
  for (std::size_t guard = 0; occ.count(u) != 1; ++guard) {
    if (guard > block.size()) throw ContractViolation("singleton path did not terminate");
    us.push_back(u);
    const auto& ut = occ.times.at(u);
    const auto it = std::find(ut.begin(), ut.end(), r_u);
    std::size_t q_u;
    if (it != ut.begin() && *(it - 1) < lo)
      q_u = *(it - 1);
    else if (it + 1 != ut.end() && *(it + 1) > hi)
      q_u = *(it + 1);
    else
      throw ContractViolation("singleton of a sub-block has no adjacent outer occurrence");
    link.push_back({r_u, q_u});
    if (q_u < lo)
      lo = q_u;
    else
      hi = q_u;
    chain.push_back({lo, hi, detail::singletons_in(block, lo, hi)});
    u = pick(chain.back());
    r_u = detail::position_in(block, lo, hi, u);
  }
  us.push_back(u);  // u_{k+1}

  // parent of u_i is u_h, h the first chain index with u_i in S1(B_h)
  const std::size_t last = us.size() - 1;
  std::vector<std::size_t> parent(us.size(), 0);
  std::vector<PairRef> witness(us.size());
  for (std::size_t i = 1; i <= last; ++i) {
    std::size_t h = 0;
    while (!contains(chain[h].single, us[i])) ++h;
    parent[i] = h;
    if (h == 0) {
      witness[i] = {v, vt[0], vt[1]};
    } else {
      const auto [r, q] = link[h - 1];
      witness[i] = {us[h], std::min(r, q), std::max(r, q)};
    }
  }
  std::vector<PathArc> path;
  for (std::size_t i = last; i != 0; i = parent[i]) path.push_back({us[parent[i]], us[i], witness[i]});
  std::reverse(path.begin(), path.end());
  return path;
}

// ---------------------------------------------------------------------------
// k = 2 certificate

struct K2Certificate {
  CertificateGraph graph;
  std::size_t bfs_arcs = 0;
  std::size_t added_arcs = 0;
  std::size_t discarded_arcs = 0;
  std::size_t s = 0, s1 = 0, s2 = 0, r = 0;
  std::size_t sum_b_minus_1 = 0;       // sum over S2 of (b(v) - 1)
  std::int64_t lemma_bound = 0;        // s2 - r + sum (b(v) - 1)
  double corollary_bound = 0;          // max{s2, beta/(1+beta) s1}
  std::size_t target = 0;              // ceil(beta/(1+2beta) s)
};

inline std::size_t k2_target(std::size_t s, double beta) {
  return static_cast<std::size_t>(std::ceil(beta / (1 + 2 * beta) * static_cast<double>(s) - 1e-9));
}

/// Functional reverse-BFS DAG over all good arcs from S1(B), augmented with one
/// arc per pair of adjacent transition blocks of each v in R(B). The witness
/// of an augmenting arc is v's pair spanning the gap; the singleton target
/// occurs once inside it. Augmenting arcs with a nonzero entry in the BFS
/// arc's witness column are discarded to keep the staircase order.
inline K2Certificate build_k2_certificate(const Instance& inst, const Trace& block, double beta,
                                          const SignMatrix* P_in = nullptr) {
  if (inst.k() != 2) throw Refused("k2 certificate needs k = 2");
  const auto moves = block.moves();
  const Sequence seq(moves);
  if (!(beta > 0 && beta <= 1)) throw Refused("k2 certificate needs 0 < beta <= 1");
  if (!is_beta_critical(seq, beta)) throw Refused("block is not beta-critical");
  const auto occ = occurrence_stats(seq);
  if (occ.singletons.empty()) throw Refused("block has no singleton vertex");
  const SignMatrix P = P_in ? *P_in : build_P_pairs(inst, block);
  const auto colidx = column_index(P);

  K2Certificate cert;
  cert.graph.nodes = occ.moving;
  cert.s = occ.s();
  cert.s1 = occ.s1();
  cert.s2 = occ.s2();

  // reverse BFS from the singletons over all good arcs
  std::map<Vertex, std::pair<Vertex, std::size_t>> parent;
  std::set<Vertex> visited(occ.singletons.begin(), occ.singletons.end());
  std::vector<Vertex> frontier = occ.singletons;
  while (!frontier.empty()) {
    std::vector<Vertex> next;
    for (auto w : frontier)
      for (auto v : occ.repeating) {
        if (visited.count(v)) continue;
        if (auto c = is_good_arc(inst, P, v, w)) {
          parent[v] = {w, *c};
          visited.insert(v);
          next.push_back(v);
        }
      }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  for (auto v : occ.repeating)
    if (!parent.count(v))
      throw ContractViolation("repeating vertex " + std::to_string(v) +
                              " has no good-arc path to a singleton");

  const auto view = transition_blocks(seq);
  cert.r = multi_block_vertices(view).size();
  for (auto v : occ.repeating) cert.sum_b_minus_1 += view.b_of(v) - 1;
  cert.lemma_bound = static_cast<std::int64_t>(cert.s2) - static_cast<std::int64_t>(cert.r) +
                     static_cast<std::int64_t>(cert.sum_b_minus_1);
  cert.corollary_bound = std::max(static_cast<double>(cert.s2),
                                  beta / (1 + beta) * static_cast<double>(cert.s1));
  cert.target = k2_target(cert.s, beta);

  const auto trans = view.marked();
  for (auto v : occ.repeating) {
    const auto [w, c1] = parent.at(v);
    cert.graph.arcs.push_back({v, w, c1});
    ++cert.bfs_arcs;
    if (view.b_of(v) < 2) continue;
    std::vector<std::size_t> mine;  // transition blocks containing v
    for (std::size_t i = 0; i < trans.size(); ++i)
      for (std::size_t t = trans[i].begin; t < trans[i].end; ++t)
        if (seq[t].v == v) {
          mine.push_back(i);
          break;
        }
    for (std::size_t j = 0; j + 1 < mine.size(); ++j) {
      const Block& a = trans[mine[j]];
      const Block& b = trans[mine[j + 1]];
      std::optional<Vertex> u;
      for (std::size_t t = a.end; t < b.begin; ++t)
        if (occ.count(seq[t].v) == 1 && (!u || seq[t].v < *u)) u = seq[t].v;
      if (!u) throw ContractViolation("no singleton between adjacent transition blocks");
      std::size_t t1 = a.end - 1;
      while (seq[t1].v != v) --t1;
      std::size_t t2 = b.begin;
      while (seq[t2].v != v) ++t2;
      const auto it = colidx.find({v, {t1, t2}});
      if (it == colidx.end()) throw ContractViolation("gap pair is not a pair column");
      const auto e = inst.edge_id(v, *u);
      if (!e || P.at(*e, it->second) == 0) {
        ++cert.discarded_arcs;  // no edge or zero entry: cannot certify this gap
        continue;
      }
      if (P.at(*e, c1) != 0) {
        ++cert.discarded_arcs;
        continue;
      }
      cert.graph.arcs.push_back({v, *u, it->second});
      ++cert.added_arcs;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// k-cut analysis shared by the k = 3 and c(L)/2 certificates

struct CutAnalysis {
  std::vector<Move> moves;
  OccurrenceStats occ;
  CyclicClassification cls;
  BlockView view;  // cyclic (marked) and acyclic blocks
  CycleSet cycles;
  SignMatrix P;    // columns follow `cycles.cycles`

  Sequence seq() const { return Sequence(moves); }

  /// Positions of the marked segments containing v, in order.
  std::vector<std::size_t> cyclic_blocks_of(Vertex v) const {
    std::vector<std::size_t> out;
    for (auto t : occ.times.at(v)) {
      const auto s = view.segment_of(t);
      if (out.empty() || out.back() != s) out.push_back(s);
    }
    return out;
  }
};

inline CutAnalysis analyze_cut(const Instance& inst, const Trace& tr,
                               std::size_t cycle_cap = kDefaultCycleCap) {
  CutAnalysis a;
  a.moves = tr.moves();
  const Sequence seq(a.moves);
  a.occ = occurrence_stats(seq);
  a.cls = classify_cyclic(seq, inst.k());
  a.view = cyclic_blocks(seq, inst.k());
  a.cycles = cycles(seq, inst.k(), cycle_cap);
  if (a.cycles.truncated) throw Refused("cycle enumeration truncated");
  a.P = build_P_cycles(inst, tr, a.cycles);
  return a;
}

// ---------------------------------------------------------------------------
// c(L)/2 certificate

struct HalfCertificate {
  CertificateGraph graph;
  std::size_t c = 0;
  std::size_t removed = 0;  // one arc per directed cycle of the functional graph
  std::size_t target = 0;   // ceil(c/2)
};

/// One arc per cyclic vertex (its first cycle, smallest u with a nonzero
/// entry), then one arc removed from each directed cycle.
inline HalfCertificate build_half_certificate(const Instance& inst, const CutAnalysis& a) {
  HalfCertificate h;
  h.graph.nodes = a.occ.moving;
  h.c = a.cls.c();
  h.target = (h.c + 1) / 2;
  std::map<Vertex, Arc> out;
  for (auto v : a.cls.cyclic) {
    std::optional<std::size_t> col;
    for (std::size_t c = 0; c < a.P.cols(); ++c)
      if (a.P.info(c).v == v) {
        col = c;
        break;
      }
    if (!col) throw ContractViolation("cyclic vertex " + std::to_string(v) + " has no cycle");
    std::optional<Vertex> best;
    for (const auto& [u, e] : inst.neighbors(v))
      if (a.P.at(e, *col) != 0 && (!best || u < *best)) best = u;
    if (!best)
      throw ContractViolation("cycle over vertex " + std::to_string(v) +
                              " has an all-zero column; the sequence is not improving");
    out.emplace(v, Arc{v, *best, *col});
  }
  // break directed cycles: walk from each unvisited node
  std::map<Vertex, int> state;  // 1 on current walk, 2 done
  std::set<Vertex> drop;
  for (const auto& [start, arc] : out) {
    if (state[start]) continue;
    std::vector<Vertex> walk;
    Vertex x = start;
    while (true) {
      state[x] = 1;
      walk.push_back(x);
      auto it = out.find(x);
      if (it == out.end()) break;
      const Vertex y = it->second.head;
      if (state[y] == 1) {
        // cycle y .. x; drop the arc leaving its smallest vertex
        auto pos = std::find(walk.begin(), walk.end(), y);
        drop.insert(*std::min_element(pos, walk.end()));
        break;
      }
      if (state[y] == 2) break;
      x = y;
    }
    for (auto w : walk) state[w] = 2;
  }
  for (const auto& [v, arc] : out)
    if (!drop.count(v)) h.graph.arcs.push_back(arc);
  h.removed = drop.size();
  return h;
}

inline HalfCertificate build_half_certificate(const Instance& inst, const Trace& tr) {
  return build_half_certificate(inst, analyze_cut(inst, tr));
}

// ---------------------------------------------------------------------------
// k = 3: leaping and tricky cycles

struct LeapingCycle {
  std::size_t cycle;  // index into the cycle set (= P column)
  int which_case;     // 1, 2 or 3 as in the case analysis
};

/// For occurrences t1 < t2 < t3 of v in three distinct cyclic blocks (the
/// blocks are taken as consecutive among v's cyclic blocks for case 3), finds
/// a leaping cycle over v inside [t1, last occurrence of v in t3's block].
inline LeapingCycle leaping_cycle(const CutAnalysis& a, Vertex v, std::size_t t1, std::size_t t2,
                                  std::size_t t3) {
  const auto seq = a.seq();
  if (!(t1 < t2 && t2 < t3) || t3 >= seq.size() || seq[t1].v != v || seq[t2].v != v ||
      seq[t3].v != v)
    throw Refused("leaping_cycle needs three ordered occurrences of the vertex");
  const auto s1 = a.view.segment_of(t1), s2 = a.view.segment_of(t2), s3 = a.view.segment_of(t3);
  if (!a.view.segments[s1].marked || !a.view.segments[s2].marked || !a.view.segments[s3].marked)
    throw Refused("occurrences must lie in cyclic blocks");
  if (s1 == s2 || s2 == s3) throw Refused("occurrences must lie in distinct cyclic blocks");
  const auto last_in = [&](std::size_t seg) {
    std::size_t t = a.view.segments[seg].block.end - 1;
    while (seq[t].v != v) --t;
    return t;
  };
  const std::size_t e1 = last_in(s1), e2 = last_in(s2), e3 = last_in(s3);
  const Part pa = seq[e1].from, pb = seq[e1].to;
  Part pc = 1;
  while (pc == pa || pc == pb) ++pc;
  const auto& vt = a.occ.times.at(v);
  auto first_move = [&](std::size_t lo, std::size_t hi, Part p, Part q) -> std::optional<std::size_t> {
    for (auto t : vt)
      if (t >= lo && t <= hi && seq[t].from == p && seq[t].to == q) return t;
    return std::nullopt;
  };
  auto lookup = [&](std::vector<std::size_t> times, int cs) {
    std::sort(times.begin(), times.end());
    auto idx = a.cycles.find(v, times);
    if (!idx) throw ContractViolation("case-" + std::to_string(cs) + " cycle is not a minimal cycle");
    return LeapingCycle{*idx, cs};
  };
  if (auto t = first_move(e1, e3, pb, pa)) return lookup({e1, *t}, 1);
  if (auto t = first_move(e1, e3, pc, pa)) {
    auto mid = first_move(e1, *t, pb, pc);
    if (!mid) throw ContractViolation("walk reaches part " + std::to_string(pc) + " without a move into it");
    return lookup({e1, *mid, *t}, 2);
  }
  std::size_t f3 = a.view.segments[s3].block.begin;
  while (seq[f3].v != v) ++f3;
  const auto& m2 = seq[e2];
  const auto& m3 = seq[f3];
  const bool swap_bc = m2.from == pb && m2.to == pc && m3.from == pc && m3.to == pb;
  const bool swap_cb = m2.from == pc && m2.to == pb && m3.from == pb && m3.to == pc;
  if (!swap_bc && !swap_cb) throw Refused("case 3 needs consecutive cyclic blocks of the vertex");
  return lookup({e2, f3}, 3);
}

/// Acyclic vertices moving in seq[lo, hi] (inclusive), ascending.
inline std::vector<Vertex> acyclic_between(const CutAnalysis& a, std::size_t lo, std::size_t hi) {
  std::vector<Vertex> out;
  for (std::size_t t = lo; t <= hi && t < a.moves.size(); ++t)
    if (a.cls.is_acyclic(a.moves[t].v)) out.push_back(a.moves[t].v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::size_t distinct_cyclic_blocks(const CutAnalysis& a, const CycleRef& c) {
  std::set<std::size_t> segs;
  for (auto t : c.times) segs.insert(a.view.segment_of(t));
  return segs.size();
}

inline bool is_leaping(const CutAnalysis& a, const CycleRef& c) {
  return distinct_cyclic_blocks(a, c) >= 2;
}

/// A 3-cycle whose moves lie in three distinct cyclic blocks with the same
/// acyclic vertices between the first two and between the last two moves.
inline bool is_tricky(const CutAnalysis& a, const CycleRef& c) {
  if (c.size() != 3 || distinct_cyclic_blocks(a, c) != 3) return false;
  return acyclic_between(a, c.times[0], c.times[1]) == acyclic_between(a, c.times[1], c.times[2]);
}

/// Witness u for a non-tricky leaping cycle: candidates follow the case
/// analysis (the acyclic vertices inside the part of the cycle that crosses
/// blocks), and the smallest candidate with a nonzero entry is returned
/// together with that entry.
inline std::optional<std::pair<Vertex, std::int32_t>> nontricky_witness(const Instance& inst,
                                                                       const CutAnalysis& a,
                                                                       std::size_t cycle) {
  const auto& c = a.cycles.cycles.at(cycle);
  std::vector<Vertex> cand;
  if (c.size() == 2) {
    cand = acyclic_between(a, c.times[0], c.times[1]);
  } else if (c.size() == 3) {
    const auto g0 = a.view.segment_of(c.times[0]), g1 = a.view.segment_of(c.times[1]),
               g2 = a.view.segment_of(c.times[2]);
    const auto x = acyclic_between(a, c.times[0], c.times[1]);
    const auto y = acyclic_between(a, c.times[1], c.times[2]);
    if (g0 == g1)
      cand = y;
    else if (g1 == g2)
      cand = x;
    else
      std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(cand));
  } else {
    return std::nullopt;
  }
  for (auto u : cand) {
    const auto e = inst.edge_id(u, c.v);
    if (!e) continue;
    if (const auto val = a.P.at(*e, cycle); val != 0) return std::make_pair(u, val);
  }
  return std::nullopt;
}

struct NeighborwiseArcs {
  std::vector<Arc> arcs;  // independence order
  std::size_t windows = 0;  // R
  std::size_t required = 0; // ceil(R/2)
};

/// Groups v's cyclic blocks into windows of four (consecutive windows share a
/// block), takes a non-tricky leaping cycle and an acyclic witness per window,
/// then selects distinct witnesses greedily (smallest remaining window first,
/// discarding every window whose acyclic range contains the pick) and reverses
/// the selection to obtain the staircase order.
inline NeighborwiseArcs neighborwise_arcs_3cut(const Instance& inst, const CutAnalysis& a, Vertex v) {
  if (inst.k() != 3) throw Refused("neighbor-wise arcs need k = 3");
  if (!inst.complete()) throw Refused("neighbor-wise arcs need a complete graph");
  if (!a.cls.is_cyclic(v)) throw Refused("vertex " + std::to_string(v) + " is not cyclic");
  const auto blocks = a.cyclic_blocks_of(v);
  const std::size_t b = blocks.size();
  NeighborwiseArcs res;
  res.windows = b >= 1 ? (b - 1) / 3 : 0;
  res.required = (res.windows + 1) / 2;
  if (res.windows == 0) return res;
  const auto seq = a.seq();
  auto first_in = [&](std::size_t seg) {
    std::size_t t = a.view.segments[seg].block.begin;
    while (seq[t].v != v) ++t;
    return t;
  };
  std::vector<Vertex> u(res.windows);
  std::vector<std::size_t> col(res.windows);
  std::vector<std::vector<Vertex>> span(res.windows);  // S(A_r)
  for (std::size_t r = 0; r < res.windows; ++r) {
    const auto B1 = blocks[3 * r], B2 = blocks[3 * r + 1], B3 = blocks[3 * r + 2], B4 = blocks[3 * r + 3];
    const auto C = leaping_cycle(a, v, first_in(B1), first_in(B2), first_in(B3));
    const auto Cp = leaping_cycle(a, v, first_in(B2), first_in(B3), first_in(B4));
    const bool tc = is_tricky(a, a.cycles.cycles[C.cycle]);
    const bool tcp = is_tricky(a, a.cycles.cycles[Cp.cycle]);
    if (tc && tcp) throw ContractViolation("both window cycles are tricky");
    col[r] = tc ? Cp.cycle : C.cycle;
    const auto w = nontricky_witness(inst, a, col[r]);
    if (!w) throw ContractViolation("non-tricky leaping cycle without an acyclic witness");
    if (std::abs(w->second) < 1 || std::abs(w->second) > 2)
      throw ContractViolation("witness entry outside {+-1, +-2}");
    u[r] = w->first;
    const std::size_t lo = a.view.segments[B1].block.end;
    const std::size_t hi = a.view.segments[B4].block.begin;
    span[r] = hi > lo ? acyclic_between(a, lo, hi - 1) : std::vector<Vertex>{};
    if (!contains(span[r], u[r])) throw ContractViolation("witness outside its window");
  }
  std::set<std::size_t> I;
  for (std::size_t r = 0; r < res.windows; ++r) I.insert(r);
  std::vector<std::size_t> picked;
  while (!I.empty()) {
    const std::size_t r = *I.begin();
    picked.push_back(r);
    for (std::size_t i = 0; i < res.windows; ++i)
      if (contains(span[i], u[r])) I.erase(i);
  }
  std::reverse(picked.begin(), picked.end());
  for (auto r : picked) res.arcs.push_back({v, u[r], col[r]});
  if (res.arcs.size() < res.required)
    throw ContractViolation("selection produced fewer than ceil(R/2) arcs");
  return res;
}

struct ThreeCutCertificate {
  HalfCertificate half;
  CertificateGraph neighborwise;
  std::size_t s = 0, c = 0, a = 0;
  std::int64_t sum_b_minus_3 = 0;    // sum over cyclic v of (b(v) - 3)
  std::size_t target = 0;            // ceil(s/32)

  const CertificateGraph& best() const {
    return neighborwise.size() > half.graph.size() ? neighborwise : half.graph;
  }
};

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

/// Both certificates of a 2-critical improving block on a complete 3-cut
/// instance: the c(B)/2 graph and the cyclic-to-acyclic neighbor-wise graph.
inline ThreeCutCertificate build_3cut_certificate(const Instance& inst, const Trace& block) {
  if (inst.k() != 3) throw Refused("3-cut certificate needs k = 3");
  if (!inst.complete()) throw Refused("3-cut certificate needs a complete graph");
  if (!block.improving()) throw Refused("block is not improving");
  const auto moves = block.moves();
  if (!is_two_critical(Sequence(moves))) throw Refused("block is not 2-critical");
  const auto a = analyze_cut(inst, block);
  ThreeCutCertificate cert;
  cert.s = a.occ.s();
  cert.c = a.cls.c();
  cert.a = a.cls.a();
  cert.target = ceil_div(cert.s, 32);
  cert.half = build_half_certificate(inst, a);
  cert.neighborwise.nodes = a.occ.moving;
  for (auto v : a.cls.cyclic) {
    cert.sum_b_minus_3 += static_cast<std::int64_t>(a.cyclic_blocks_of(v).size()) - 3;
    auto arcs = neighborwise_arcs_3cut(inst, a, v);
    cert.neighborwise.arcs.insert(cert.neighborwise.arcs.end(), arcs.arcs.begin(), arcs.arcs.end());
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Validation

struct CertificateVerdict {
  bool valid = true;
  std::string reason;
  std::size_t arcs = 0;
  std::size_t row_rank = 0;  // exact rank of the rows {u, v} of the arcs
};

/// Re-checks a certificate against P from scratch: good arcs with witnesses
/// over the tail, acyclicity, the per-node staircase zero pattern, and full
/// row rank of the selected rows by exact elimination.
inline CertificateVerdict validate_certificate(const Instance& inst, const SignMatrix& P,
                                               const CertificateGraph& g) {
  CertificateVerdict vd;
  vd.arcs = g.size();
  auto fail = [&](std::string why) {
    vd.valid = false;
    vd.reason = std::move(why);
    return vd;
  };
  auto name = [](const Arc& a) { return std::to_string(a.tail) + "->" + std::to_string(a.head); };
  std::vector<std::uint32_t> rows;
  std::map<Vertex, std::vector<Arc>> by_tail;
  for (const auto& a : g.arcs) {
    if (a.witness >= P.cols()) return fail("arc " + name(a) + " references a missing column");
    if (P.info(a.witness).v != a.tail) return fail("arc " + name(a) + " witness is not over its tail");
    const auto e = inst.edge_id(a.tail, a.head);
    if (!e) return fail("arc " + name(a) + " has no edge");
    if (P.at(*e, a.witness) == 0) return fail("arc " + name(a) + " is not good: zero witness entry");
    rows.push_back(*e);
    by_tail[a.tail].push_back(a);
  }
  {
    auto sorted = rows;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      return fail("two arcs share an edge row");
  }
  // Kahn's algorithm
  std::map<Vertex, std::size_t> indeg;
  for (const auto& a : g.arcs) {
    ++indeg[a.head];
    indeg.emplace(a.tail, 0);
  }
  std::vector<Vertex> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const Vertex v = ready.back();
    ready.pop_back();
    ++seen;
    if (auto it = by_tail.find(v); it != by_tail.end())
      for (const auto& a : it->second)
        if (--indeg[a.head] == 0) ready.push_back(a.head);
  }
  if (seen != indeg.size()) return fail("certificate graph has a directed cycle");
  for (const auto& [v, arcs] : by_tail)
    for (std::size_t i = 0; i < arcs.size(); ++i)
      for (std::size_t j = i + 1; j < arcs.size(); ++j) {
        const auto e = *inst.edge_id(v, arcs[j].head);
        if (P.at(e, arcs[i].witness) != 0)
          return fail("independence order broken at " + name(arcs[i]) + " / " + name(arcs[j]));
      }
  vd.row_rank = exact_rank(dense_rows(P, rows));
  if (vd.row_rank != rows.size())
    return fail("selected rows have rank " + std::to_string(vd.row_rank) + " < " +
                std::to_string(rows.size()));
  return vd;
}

// ---------------------------------------------------------------------------
// Dump
//
//   # flipbench certificate
//   bound <name> <value>         any number of bound lines
//   arcs <count>
//   <v> <u> <column>             one line per arc, in independence order

inline void write_certificate(std::ostream& out, const CertificateGraph& g,
                              const std::vector<std::pair<std::string, std::string>>& bounds) {
  out << "# flipbench certificate\n";
  for (const auto& [k, v] : bounds) out << "bound " << k << ' ' << v << '\n';
  out << "arcs " << g.size() << '\n';
  for (const auto& a : g.arcs) out << a.tail << ' ' << a.head << ' ' << a.witness << '\n';
}

}  // namespace flipbench
