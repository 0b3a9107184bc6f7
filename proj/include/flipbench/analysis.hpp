#pragma once

// Combinatorial structure of move sequences: occurrence counts, pairs,
// cycles, cyclic/acyclic classification, block decompositions, critical
// blocks and surplus.
//
// All functions take the sequence as a span of moves. Positions are 0-based
// indices into that span; a block [begin, end) is a half-open index range.
// None of this depends on the initial configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "flipbench/core.hpp"

namespace flipbench {

using Sequence = std::span<const Move>;

struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - begin; }
  friend bool operator==(const Block&, const Block&) = default;
};

inline Sequence subsequence(Sequence seq, Block b) { return seq.subspan(b.begin, b.length()); }

inline bool contains(const std::vector<Vertex>& sorted, Vertex v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

struct OccurrenceStats {
  std::map<Vertex, std::vector<std::size_t>> times;  // per moving vertex, ascending
  std::vector<Vertex> moving;       // S(L)
  std::vector<Vertex> singletons;   // S1(L): move exactly once
  std::vector<Vertex> repeating;    // S2(L): move at least twice
  std::size_t length = 0;

  std::size_t s() const noexcept { return moving.size(); }
  std::size_t s1() const noexcept { return singletons.size(); }
  std::size_t s2() const noexcept { return repeating.size(); }
  std::size_t count(Vertex v) const {
    auto it = times.find(v);
    return it == times.end() ? 0 : it->second.size();
  }
};

inline OccurrenceStats occurrence_stats(Sequence seq) {
  OccurrenceStats st;
  st.length = seq.size();
  for (std::size_t t = 0; t < seq.size(); ++t) st.times[seq[t].v].push_back(t);
  for (const auto& [v, ts] : st.times) {
    st.moving.push_back(v);
    (ts.size() == 1 ? st.singletons : st.repeating).push_back(v);
  }
  return st;
}

/// Number of distinct vertices in a sequence.
inline std::size_t distinct_vertices(Sequence seq) {
  std::vector<Vertex> vs;
  vs.reserve(seq.size());
  for (const auto& m : seq) vs.push_back(m.v);
  std::sort(vs.begin(), vs.end());
  return static_cast<std::size_t>(std::unique(vs.begin(), vs.end()) - vs.begin());
}

// ---------------------------------------------------------------------------
// Pairs and cycles

struct PairRef {
  Vertex v;
  std::size_t t1;
  std::size_t t2;
  friend bool operator==(const PairRef&, const PairRef&) = default;
};

/// Consecutive occurrences of each vertex, ordered by (vertex, t1).
inline std::vector<PairRef> pairs(Sequence seq) {
  std::vector<PairRef> out;
  const auto st = occurrence_stats(seq);
  for (const auto& [v, ts] : st.times)
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) out.push_back({v, ts[i], ts[i + 1]});
  return out;
}

struct CycleRef {
  Vertex v;
  std::vector<std::size_t> times;  // ascending
  std::vector<Part> parts;         // departure part of each move, in time order
  std::size_t t_beg() const { return times.front(); }
  std::size_t t_end() const { return times.back(); }
  std::size_t size() const { return times.size(); }
};

struct CycleSet {
  std::vector<CycleRef> cycles;  // ordered by (vertex, times)
  bool truncated = false;
  std::vector<Vertex> truncated_vertices;

  /// Index of the cycle over v with exactly these times, if present.
  std::optional<std::size_t> find(Vertex v, const std::vector<std::size_t>& times) const {
    for (std::size_t i = 0; i < cycles.size(); ++i)
      if (cycles[i].v == v && cycles[i].times == times) return i;
    return std::nullopt;
  }
};

inline constexpr std::size_t kDefaultCycleCap = 100'000;

namespace detail {

struct CycleSearch {
  const std::vector<Move>* walk;  // moves of one vertex, in time order
  const std::vector<std::size_t>* times;
  std::size_t cap;
  std::vector<std::size_t> stack;
  std::vector<bool> used_part;
  std::vector<std::vector<std::size_t>>* found;
  bool truncated = false;

  void extend(std::size_t start) {
    const Part target = (*walk)[stack.front()].from;
    const Part here = (*walk)[stack.back()].to;
    if (here == target) {
      if (found->size() >= cap) {
        truncated = true;
        return;
      }
      found->push_back(stack);
      return;
    }
    for (std::size_t j = start; j < walk->size() && !truncated; ++j) {
      const auto& m = (*walk)[j];
      if (m.from != here || used_part[m.from]) continue;
      used_part[m.from] = true;
      stack.push_back(j);
      extend(j + 1);
      stack.pop_back();
      used_part[m.from] = false;
    }
  }
};

}  // namespace detail

/// All inclusion-minimal circuits. A circuit is minimal exactly when its
/// departure parts are pairwise distinct, so a depth-first search over chains
/// with distinct departure parts enumerates them without a minimality test.
/// At most `cap` cycles are produced per vertex; exceeding it sets `truncated`.
inline CycleSet cycles(Sequence seq, Part k, std::size_t cap = kDefaultCycleCap) {
  CycleSet out;
  const auto st = occurrence_stats(seq);
  for (const auto& [v, ts] : st.times) {
    std::vector<Move> walk;
    walk.reserve(ts.size());
    for (auto t : ts) {
      const auto& m = seq[t];
      if (m.from < 1 || m.to < 1 || m.from > k || m.to > k || m.from == m.to)
        throw InvalidInput("move " + to_string(m) + " has labels outside 1.." + std::to_string(k));
      walk.push_back(m);
    }
    std::vector<std::vector<std::size_t>> found;
    detail::CycleSearch search{&walk, &ts, cap, {}, std::vector<bool>(k + 1, false), &found};
    for (std::size_t i = 0; i < walk.size() && !search.truncated; ++i) {
      search.stack = {i};
      search.used_part[walk[i].from] = true;
      search.extend(i + 1);
      search.used_part[walk[i].from] = false;
    }
    if (search.truncated) {
      out.truncated = true;
      out.truncated_vertices.push_back(v);
    }
    std::sort(found.begin(), found.end());
    for (const auto& idx : found) {
      CycleRef c{v, {}, {}};
      for (auto i : idx) {
        c.times.push_back(ts[i]);
        c.parts.push_back(walk[i].from);
      }
      out.cycles.push_back(std::move(c));
    }
  }
  return out;
}

/// True iff the moves at `times` (ascending, all over v) chain and close up.
inline bool is_circuit(Sequence seq, Vertex v, const std::vector<std::size_t>& times) {
  if (times.empty()) return false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= seq.size() || seq[times[i]].v != v) return false;
    if (i && times[i] <= times[i - 1]) return false;
    const auto& next = seq[times[(i + 1) % times.size()]];
    if (seq[times[i]].to != next.from) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Cyclic classification

struct CyclicClassification {
  std::vector<Vertex> cyclic;   // C(L)
  std::vector<Vertex> acyclic;  // A(L)
  std::size_t c() const noexcept { return cyclic.size(); }
  std::size_t a() const noexcept { return acyclic.size(); }
  bool is_cyclic(Vertex v) const { return contains(cyclic, v); }
  bool is_acyclic(Vertex v) const { return contains(acyclic, v); }
};

/// A vertex is cyclic iff its walk revisits a part: the moves between two
/// visits of the same part form a circuit, and conversely a walk through
/// distinct parts cannot close any chain of its moves.
inline CyclicClassification classify_cyclic(Sequence seq, Part k) {
  CyclicClassification cls;
  const auto st = occurrence_stats(seq);
  std::vector<bool> seen(k + 1);
  for (const auto& [v, ts] : st.times) {
    std::fill(seen.begin(), seen.end(), false);
    seen[seq[ts.front()].from] = true;
    bool cyc = false;
    for (auto t : ts) {
      if (seq[t].to > k) throw InvalidInput("move " + to_string(seq[t]) + " exceeds k");
      if (seen[seq[t].to]) {
        cyc = true;
        break;
      }
      seen[seq[t].to] = true;
    }
    (cyc ? cls.cyclic : cls.acyclic).push_back(v);
  }
  return cls;
}

// ---------------------------------------------------------------------------
// Block decompositions

struct Segment {
  Block block;
  bool marked;  // transition block (k=2 view) or cyclic block (k-cut view)
};

struct BlockView {
  Block block;                          // range inside the parent sequence
  std::vector<Segment> segments;        // alternating partition of the block
  std::map<Vertex, std::size_t> b;      // marked segments containing each vertex

  std::vector<Block> marked() const {
    std::vector<Block> out;
    for (const auto& s : segments)
      if (s.marked) out.push_back(s.block);
    return out;
  }
  std::vector<Block> unmarked() const {
    std::vector<Block> out;
    for (const auto& s : segments)
      if (!s.marked) out.push_back(s.block);
    return out;
  }
  std::size_t b_of(Vertex v) const {
    auto it = b.find(v);
    return it == b.end() ? 0 : it->second;
  }
  /// Index into `segments` of the segment containing position t.
  std::size_t segment_of(std::size_t t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](std::size_t x, const Segment& s) { return x < s.block.begin; });
    return static_cast<std::size_t>(it - segments.begin()) - 1;
  }
};

namespace detail {

template <class Pred>
BlockView segment_by(Sequence seq, Pred marked) {
  BlockView view;
  view.block = {0, seq.size()};
  for (std::size_t t = 0; t < seq.size();) {
    const bool m = marked(seq[t].v);
    std::size_t e = t;
    while (e < seq.size() && marked(seq[e].v) == m) ++e;
    view.segments.push_back({{t, e}, m});
    if (m) {
      std::vector<Vertex> vs;
      for (std::size_t i = t; i < e; ++i) vs.push_back(seq[i].v);
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      for (auto v : vs) ++view.b[v];
    }
    t = e;
  }
  return view;
}

}  // namespace detail

/// k=2 view: maximal runs of repeating vertices (transition blocks, marked)
/// alternating with maximal runs of singletons.
inline BlockView transition_blocks(Sequence seq) {
  const auto st = occurrence_stats(seq);
  return detail::segment_by(seq, [&](Vertex v) { return st.count(v) >= 2; });
}

/// k-cut view: maximal runs of cyclic vertices (cyclic blocks, marked)
/// alternating with maximal runs of acyclic vertices.
inline BlockView cyclic_blocks(Sequence seq, Part k) {
  const auto cls = classify_cyclic(seq, k);
  return detail::segment_by(seq, [&](Vertex v) { return cls.is_cyclic(v); });
}

/// R(L): repeating vertices that occur in at least two transition blocks.
inline std::vector<Vertex> multi_block_vertices(const BlockView& view) {
  std::vector<Vertex> out;
  for (const auto& [v, cnt] : view.b)
    if (cnt >= 2) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Critical blocks

namespace detail {

/// Maps vertices to dense ids 0..m-1 for counter arrays.
inline std::vector<std::uint32_t> dense_ids(Sequence seq, std::size_t& m) {
  std::unordered_map<Vertex, std::uint32_t> id;
  std::vector<std::uint32_t> out(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    auto [it, fresh] = id.emplace(seq[t].v, static_cast<std::uint32_t>(id.size()));
    out[t] = it->second;
  }
  m = id.size();
  return out;
}

/// Shortest, then leftmost, block with length >= f(s). Sliding windows with
/// counters keep each length pass linear.
template <class Qualifies>
std::optional<Block> shortest_block(Sequence seq, Qualifies ok) {
  std::size_t m = 0;
  const auto ids = dense_ids(seq, m);
  std::vector<std::uint32_t> cnt(m);
  for (std::size_t len = 1; len <= seq.size(); ++len) {
    std::fill(cnt.begin(), cnt.end(), 0);
    std::size_t s = 0;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (cnt[ids[t]]++ == 0) ++s;
      if (t >= len && --cnt[ids[t - len]] == 0) --s;
      if (t + 1 >= len && ok(len, s)) return Block{t + 1 - len, t + 1};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// True iff length >= (1+beta) s.
inline bool meets_beta(std::size_t length, std::size_t s, double beta) {
  return static_cast<double>(length) >= (1.0 + beta) * static_cast<double>(s);
}

inline std::size_t ceil_one_plus_beta(std::size_t s, double beta) {
  return static_cast<std::size_t>(std::ceil((1.0 + beta) * static_cast<double>(s)));
}

/// The shortest (then leftmost) block with l(B) >= (1+beta) s(B). Every strictly
/// shorter block fails the test, so the result is beta-critical, and dropping
/// its last move shows l(B) = ceil((1+beta) s(B)).
inline Block find_critical_block(Sequence seq, double beta) {
  if (!(beta > 0)) throw InvalidParameter("beta must be positive");
  auto b = detail::shortest_block(seq, [&](std::size_t len, std::size_t s) {
    return meets_beta(len, s, beta);
  });
  if (!b) throw NotFound("no block with l(B) >= (1+beta) s(B)");
  const std::size_t s = distinct_vertices(subsequence(seq, *b));
  if (b->length() != ceil_one_plus_beta(s, beta))
    throw ContractViolation("critical block length " + std::to_string(b->length()) +
                            " != ceil((1+beta) s) for s=" + std::to_string(s));
  return *b;
}

/// Threshold 3 with integer arithmetic.
inline Block two_critical_block(Sequence seq) {
  auto b = detail::shortest_block(seq, [](std::size_t len, std::size_t s) { return len >= 3 * s; });
  if (!b) throw NotFound("no block with l(B) >= 3 s(B)");
  return *b;
}

/// Brute-force criticality check: l(B) >= (1+beta) s(B) and every strictly
/// contained block fails. Quadratic in the block length.
inline bool is_beta_critical(Sequence block, double beta) {
  if (!meets_beta(block.size(), distinct_vertices(block), beta)) return false;
  std::size_t m = 0;
  const auto ids = detail::dense_ids(block, m);
  std::vector<std::uint32_t> cnt(m);
  for (std::size_t i = 0; i < block.size(); ++i) {
    std::fill(cnt.begin(), cnt.end(), 0);
    std::size_t s = 0;
    for (std::size_t j = i; j < block.size(); ++j) {
      if (cnt[ids[j]]++ == 0) ++s;
      if (j - i + 1 == block.size()) break;
      if (meets_beta(j - i + 1, s, beta)) return false;
    }
  }
  return true;
}

inline bool is_two_critical(Sequence block) {
  if (block.size() < 3 * distinct_vertices(block)) return false;
  std::size_t m = 0;
  const auto ids = detail::dense_ids(block, m);
  std::vector<std::uint32_t> cnt(m);
  for (std::size_t i = 0; i < block.size(); ++i) {
    std::fill(cnt.begin(), cnt.end(), 0);
    std::size_t s = 0;
    for (std::size_t j = i; j < block.size(); ++j) {
      if (cnt[ids[j]]++ == 0) ++s;
      if (j - i + 1 == block.size()) break;
      if (j - i + 1 >= 3 * s) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Surplus and alpha-cyclic blocks

/// z(L) = l(L) - sum over acyclic v of #(v) - c(L) = sum over cyclic v of (#(v) - 1).
inline std::int64_t surplus(Sequence seq, Part k) {
  const auto st = occurrence_stats(seq);
  const auto cls = classify_cyclic(seq, k);
  std::int64_t acyclic_moves = 0;
  for (auto v : cls.acyclic) acyclic_moves += static_cast<std::int64_t>(st.count(v));
  return static_cast<std::int64_t>(seq.size()) - acyclic_moves - static_cast<std::int64_t>(cls.c());
}

namespace detail {

/// Incremental per-start scan: extends [i, j) one move at a time while
/// tracking, per vertex, its visited parts, count and cyclicity. Calls
/// visit(i, j+1, c, z) for every block.
template <class Visit>
void scan_blocks(Sequence seq, Part k, Visit visit) {
  std::size_t m = 0;
  const auto ids = dense_ids(seq, m);
  std::vector<std::uint32_t> count(m), seen(m);
  std::vector<bool> cyc(m);
  std::vector<std::uint64_t> parts(m);
  if (k > 63) throw InvalidParameter("block scan supports k <= 63");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::fill(count.begin(), count.end(), 0);
    std::fill(cyc.begin(), cyc.end(), false);
    std::fill(parts.begin(), parts.end(), 0);
    std::int64_t c = 0, z = 0;
    for (std::size_t j = i; j < seq.size(); ++j) {
      const auto id = ids[j];
      const auto& mv = seq[j];
      if (count[id]++ == 0) parts[id] = std::uint64_t{1} << mv.from;
      if (!cyc[id]) {
        if (parts[id] & (std::uint64_t{1} << mv.to)) {
          cyc[id] = true;
          ++c;
          z += count[id] - 1;
        } else {
          parts[id] |= std::uint64_t{1} << mv.to;
        }
      } else {
        ++z;
      }
      visit(i, j + 1, c, z);
    }
  }
}

}  // namespace detail

/// m_L(t): the largest surplus over blocks of length t.
inline std::int64_t max_surplus(Sequence seq, Part k, std::size_t t) {
  if (t == 0 || t > seq.size()) throw InvalidParameter("block length out of range");
  std::int64_t best = 0;
  detail::scan_blocks(seq, k, [&](std::size_t i, std::size_t j, std::int64_t, std::int64_t z) {
    if (j - i == t) best = std::max(best, z);
  });
  return best;
}

/// (alpha - k + 1) / ((2k - 1) alpha lg(alpha n)).
inline double alpha_cyclic_ratio(double alpha, Part k, std::size_t n) {
  const double kk = static_cast<double>(k);
  return (alpha - kk + 1) / ((2 * kk - 1) * alpha * std::log2(alpha * static_cast<double>(n)));
}

struct AlphaCyclicBlock {
  Block block;
  std::size_t c;         // cyclic vertices of the block, classified within it
  double ratio;          // c / l
  double threshold;
};

/// The block with the largest c(B)/l(B) (ties: shorter, then leftmost). It is
/// alpha-cyclic whenever any block is, which the surplus argument guarantees
/// for l(L) = alpha n with alpha > k - 1.
inline AlphaCyclicBlock find_alpha_cyclic_block(Sequence seq, Part k, double alpha, std::size_t n) {
  if (seq.empty()) throw NotFound("empty sequence has no alpha-cyclic block");
  if (!(alpha > 1)) throw InvalidParameter("alpha must exceed 1");
  const double thr = alpha_cyclic_ratio(alpha, k, n);
  std::optional<AlphaCyclicBlock> best;
  detail::scan_blocks(seq, k, [&](std::size_t i, std::size_t j, std::int64_t c, std::int64_t) {
    const auto len = j - i;
    const auto cc = static_cast<std::size_t>(c);
    if (!best) {
      best = AlphaCyclicBlock{{i, j}, cc, 0, thr};
      return;
    }
    // c/len > best.c/best.len, exact; then shorter; then leftmost
    const auto lhs = cc * best->block.length(), rhs = best->c * len;
    if (lhs > rhs || (lhs == rhs && len < best->block.length()))
      best = AlphaCyclicBlock{{i, j}, cc, 0, thr};
  });
  best->ratio = static_cast<double>(best->c) / static_cast<double>(best->block.length());
  if (best->ratio < thr) throw NotFound("no block reaches the alpha-cyclic ratio");
  return *best;
}

}  // namespace flipbench
