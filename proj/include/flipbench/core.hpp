#pragma once

// Exact graphs, weights, configurations and single-vertex moves for max-k-cut.
//
// Edge weights are fixed-point: X_e = num_e / D with a power-of-two D shared
// by all edges. All cut values, Hamiltonians and move improvements are exact.
// Improvements of single moves are integers in units of 1/D ("ticks").

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flipbench/error.hpp"
#include "flipbench/rational.hpp"

namespace flipbench {

using Vertex = std::uint32_t;
using Part = std::uint32_t;   // part labels are 1..k
using EdgeId = std::uint32_t;
using Ticks = std::int64_t;   // a weight or improvement in units of 1/D

inline constexpr Ticks kDefaultDenominator = Ticks{1} << 20;

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  Vertex other;
  EdgeId edge;
};

class Instance {
 public:
  Instance(std::size_t n, Part k, std::vector<Edge> edges, std::vector<Ticks> weights,
           Ticks denominator = kDefaultDenominator, Rational phi = Rational(1, 2),
           bool complete = false)
      : n_(n), k_(k), edges_(std::move(edges)), weights_(std::move(weights)),
        denominator_(denominator), phi_(phi), complete_(complete) {
    if (k_ < 2) throw InvalidParameter("instance needs k >= 2, got " + std::to_string(k_));
    if (denominator_ <= 0 || (denominator_ & (denominator_ - 1)) != 0)
      throw InvalidParameter("weight denominator must be a positive power of two");
    if (phi_ < Rational(1, 2)) throw InvalidParameter("phi must be at least 1/2");
    if (weights_.size() != edges_.size())
      throw InvalidInput("edge count " + std::to_string(edges_.size()) + " != weight count " +
                         std::to_string(weights_.size()));
    index_.reserve(edges_.size() * 2);
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      auto& ed = edges_[e];
      if (ed.u == ed.v) throw InvalidInput("self-loop at vertex " + std::to_string(ed.u));
      if (ed.u >= n_ || ed.v >= n_) throw InvalidInput("edge endpoint out of range");
      if (ed.u > ed.v) std::swap(ed.u, ed.v);
      if (!index_.emplace(key(ed.u, ed.v), e).second)
        throw InvalidInput("duplicate edge " + std::to_string(ed.u) + "-" + std::to_string(ed.v));
      if (weights_[e] > denominator_ || weights_[e] < -denominator_)
        throw InvalidInput("weight of edge " + std::to_string(e) + " exceeds 1 in magnitude");
    }
    if (complete_ && edges_.size() != n_ * (n_ - 1) / 2)
      throw InvalidInput("complete instance must contain all vertex pairs");
    build_adjacency();
  }

  std::size_t n() const noexcept { return n_; }
  Part k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Ticks> weights() const noexcept { return weights_; }
  Ticks weight(EdgeId e) const { return weights_[e]; }
  Rational weight_value(EdgeId e) const { return Rational(weights_[e], denominator_); }
  Ticks denominator() const noexcept { return denominator_; }
  Rational phi() const noexcept { return phi_; }
  bool complete() const noexcept { return complete_; }

  std::span<const Incidence> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<EdgeId> edge_id(Vertex a, Vertex b) const {
    if (a == b) return std::nullopt;
    if (a > b) std::swap(a, b);
    auto it = index_.find(key(a, b));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Ticks total_weight() const {
    return std::accumulate(weights_.begin(), weights_.end(), Ticks{0});
  }

  /// Same graph and weights with a different part count.
  Instance with_parts(Part k) const {
    return Instance(n_, k, edges_, weights_, denominator_, phi_, complete_);
  }

 private:
  static std::uint64_t key(Vertex a, Vertex b) { return (std::uint64_t{a} << 32) | b; }

  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      adjacency_[fill[edges_[e].u]++] = {edges_[e].v, e};
      adjacency_[fill[edges_[e].v]++] = {edges_[e].u, e};
    }
  }

  std::size_t n_;
  Part k_;
  std::vector<Edge> edges_;
  std::vector<Ticks> weights_;
  Ticks denominator_;
  Rational phi_;
  bool complete_;
  std::unordered_map<std::uint64_t, EdgeId> index_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
};

/// Assignment of every vertex to a part label in 1..k.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<Part> parts) : parts_(std::move(parts)) {}
  Configuration(std::size_t n, Part part) : parts_(n, part) {}

  std::size_t size() const noexcept { return parts_.size(); }
  Part operator[](Vertex v) const { return parts_[v]; }
  Part& operator[](Vertex v) { return parts_[v]; }
  std::span<const Part> parts() const noexcept { return parts_; }

  /// k=2 view: part 1 is +1, part 2 is -1.
  int sign(Vertex v) const { return parts_[v] == 1 ? 1 : -1; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Part> parts_;
};

struct Move {
  Vertex v;
  Part from;
  Part to;
  friend bool operator==(const Move&, const Move&) = default;
};

inline std::string to_string(const Move& m) {
  return "(" + std::to_string(m.v) + "," + std::to_string(m.from) + "," + std::to_string(m.to) + ")";
}

inline Move reverse(const Move& m) { return {m.v, m.to, m.from}; }

inline void check_configuration(const Instance& inst, const Configuration& tau) {
  if (tau.size() != inst.n())
    throw InvalidInput("configuration has " + std::to_string(tau.size()) + " labels, instance has " +
                       std::to_string(inst.n()) + " vertices");
  for (Vertex v = 0; v < tau.size(); ++v)
    if (tau[v] < 1 || tau[v] > inst.k())
      throw InvalidInput("vertex " + std::to_string(v) + " has label " + std::to_string(tau[v]) +
                         " outside 1.." + std::to_string(inst.k()));
}

inline bool is_valid_move(const Configuration& tau, const Move& m, Part k) {
  return m.v < tau.size() && m.from != m.to && m.from >= 1 && m.to >= 1 && m.from <= k &&
         m.to <= k && tau[m.v] == m.from;
}

inline void check_move(const Configuration& tau, const Move& m, Part k) {
  if (!is_valid_move(tau, m, k)) {
    std::string cur = m.v < tau.size() ? std::to_string(tau[m.v]) : "none";
    throw InvalidMove("invalid move " + to_string(m) + ": vertex " + std::to_string(m.v) +
                      " is in part " + cur);
  }
}

/// Sum of weights of edges whose endpoints lie in different parts, in ticks.
inline Ticks cut_ticks(const Instance& inst, const Configuration& tau) {
  check_configuration(inst, tau);
  Ticks total = 0;
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    const auto& ed = inst.edge(e);
    if (tau[ed.u] != tau[ed.v]) total += inst.weight(e);
  }
  return total;
}

inline Rational cut_value(const Instance& inst, const Configuration& tau) {
  return Rational(cut_ticks(inst, tau), inst.denominator());
}

/// H(tau) = cut(tau) - (k-1)/k * sum_e X_e, evaluated in crossing-edge form.
inline Rational hamiltonian(const Instance& inst, const Configuration& tau) {
  const auto k = static_cast<std::int64_t>(inst.k());
  return Rational(k * cut_ticks(inst, tau) - (k - 1) * inst.total_weight(), k * inst.denominator());
}

/// Improvement of H caused by moving m.v from m.from to m.to: neighbors in the
/// departed part contribute +X, neighbors in the destination part -X.
inline Ticks move_delta_ticks(const Instance& inst, const Configuration& tau, const Move& m) {
  check_move(tau, m, inst.k());
  Ticks d = 0;
  for (const auto& [u, e] : inst.neighbors(m.v)) {
    if (tau[u] == m.from)
      d += inst.weight(e);
    else if (tau[u] == m.to)
      d -= inst.weight(e);
  }
  return d;
}

inline Rational move_delta(const Instance& inst, const Configuration& tau, const Move& m) {
  return Rational(move_delta_ticks(inst, tau, m), inst.denominator());
}

inline void apply_move_in_place(Configuration& tau, const Move& m, Part k) {
  check_move(tau, m, k);
  tau[m.v] = m.to;
}

inline Configuration apply_move(Configuration tau, const Move& m, Part k) {
  apply_move_in_place(tau, m, k);
  return tau;
}

struct ImprovingMove {
  Move move;
  Ticks delta;
};

/// Every single-vertex move with strictly positive improvement, ordered by
/// (vertex, destination part).
inline std::vector<ImprovingMove> improving_moves(const Instance& inst, const Configuration& tau) {
  check_configuration(inst, tau);
  std::vector<ImprovingMove> out;
  std::vector<Ticks> sums(inst.k() + 1);
  for (Vertex v = 0; v < inst.n(); ++v) {
    std::fill(sums.begin(), sums.end(), 0);
    for (const auto& [u, e] : inst.neighbors(v)) sums[tau[u]] += inst.weight(e);
    const Part p = tau[v];
    for (Part q = 1; q <= inst.k(); ++q) {
      if (q == p) continue;
      const Ticks d = sums[p] - sums[q];
      if (d > 0) out.push_back({{v, p, q}, d});
    }
  }
  return out;
}

inline bool is_local_optimum(const Instance& inst, const Configuration& tau) {
  return improving_moves(inst, tau).empty();
}

/// Vertices of a regular simplex centred at the origin, scaled to unit length.
/// Coordinates are integers; the true vector is coords / sqrt(norm2).
/// k=2 uses one dimension (+1, -1); k>=3 lives in the sum-zero hyperplane of
/// R^k with sigma(i) = (1 - k e_i) / sqrt(k(k-1)).
class SimplexFrame {
 public:
  explicit SimplexFrame(Part k) : k_(k) {
    if (k < 2) throw InvalidParameter("simplex frame needs k >= 2");
    if (k == 2) {
      coords_ = {{1}, {-1}};
      norm2_ = 1;
      return;
    }
    const auto kk = static_cast<std::int64_t>(k);
    coords_.assign(k, std::vector<std::int64_t>(k, 1));
    for (Part i = 0; i < k; ++i) coords_[i][i] = 1 - kk;
    norm2_ = kk * (kk - 1);
  }

  Part k() const noexcept { return k_; }
  std::size_t dimension() const { return coords_.front().size(); }
  std::span<const std::int64_t> coords(Part i) const { return coords_.at(i - 1); }
  std::int64_t norm2() const noexcept { return norm2_; }

  /// Exact <sigma(i), sigma(j)> for parts i, j in 1..k.
  Rational inner(Part i, Part j) const {
    const auto& a = coords_.at(i - 1);
    const auto& b = coords_.at(j - 1);
    std::int64_t dot = 0;
    for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
    return Rational(dot, norm2_);
  }

 private:
  Part k_;
  std::vector<std::vector<std::int64_t>> coords_;
  std::int64_t norm2_ = 1;
};

inline SimplexFrame simplex_vectors(Part k) { return SimplexFrame(k); }

/// H(tau) = -(k-1)/k * sum_e X_e <sigma(tau(u)), sigma(tau(v))>, summed over the
/// simplex inner products rather than the crossing-edge shortcut.
inline Rational hamiltonian_simplex(const Instance& inst, const Configuration& tau) {
  check_configuration(inst, tau);
  const SimplexFrame frame(inst.k());
  Rational sum = 0;
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    const auto& ed = inst.edge(e);
    sum += inst.weight_value(e) * frame.inner(tau[ed.u], tau[ed.v]);
  }
  const auto k = static_cast<std::int64_t>(inst.k());
  return -Rational(k - 1, k) * sum;
}

}  // namespace flipbench
