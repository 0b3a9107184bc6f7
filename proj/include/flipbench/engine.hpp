#pragma once

// FLIP execution with pluggable pivot rules, replay of external move lists and
// per-window improvement statistics.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flipbench/core.hpp"
#include "flipbench/generator.hpp"

namespace flipbench {

struct Step {
  Move move;
  Ticks delta;  // H(tau_t) - H(tau_{t-1}) in ticks
};

struct Trace {
  Configuration tau0;
  std::vector<Step> steps;
  bool cap_hit = false;
  std::vector<std::size_t> non_improving;  // 0-based indices of steps with delta <= 0

  std::size_t length() const noexcept { return steps.size(); }

  std::vector<Move> moves() const {
    std::vector<Move> m;
    m.reserve(steps.size());
    for (const auto& s : steps) m.push_back(s.move);
    return m;
  }

  /// Configuration after the first `t` steps (tau_t).
  Configuration configuration_at(std::size_t t, Part k) const {
    Configuration tau = tau0;
    for (std::size_t i = 0; i < t; ++i) apply_move_in_place(tau, steps[i].move, k);
    return tau;
  }

  Configuration final_configuration(Part k) const { return configuration_at(steps.size(), k); }

  Ticks total_improvement() const {
    Ticks t = 0;
    for (const auto& s : steps) t += s.delta;
    return t;
  }

  bool improving() const { return non_improving.empty(); }

  /// Steps [begin, end) as a trace of their own, starting from tau_begin.
  Trace slice(std::size_t begin, std::size_t end, Part k) const {
    Trace out;
    out.tau0 = configuration_at(begin, k);
    out.steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(begin),
                     steps.begin() + static_cast<std::ptrdiff_t>(end));
    for (auto i : non_improving)
      if (i >= begin && i < end) out.non_improving.push_back(i - begin);
    return out;
  }
};

enum class PivotKind { first_improving, best_improving, random_improving };

struct PivotRule {
  PivotKind kind = PivotKind::best_improving;
  std::uint64_t seed = 0;  // used by random_improving only
};

inline std::string to_string(PivotKind k) {
  switch (k) {
    case PivotKind::first_improving: return "first";
    case PivotKind::best_improving: return "best";
    case PivotKind::random_improving: return "random";
  }
  return "?";
}

inline PivotKind parse_pivot(const std::string& s) {
  if (s == "first") return PivotKind::first_improving;
  if (s == "best") return PivotKind::best_improving;
  if (s == "random") return PivotKind::random_improving;
  throw InvalidParameter("unknown pivot rule '" + s + "' (expected first|best|random)");
}

inline constexpr std::size_t kDefaultStepCap = 100'000'000;

/// Per-vertex, per-part neighbor weight sums; a move costs O(deg(v)) to apply
/// and the improvement of any candidate move is read in O(1).
class PartSums {
 public:
  PartSums(const Instance& inst, const Configuration& tau)
      : inst_(&inst), k_(inst.k()), tau_(tau), sums_(inst.n() * (inst.k() + 1), 0) {
    check_configuration(inst, tau);
    for (EdgeId e = 0; e < inst.edge_count(); ++e) {
      const auto& ed = inst.edge(e);
      at(ed.u, tau_[ed.v]) += inst.weight(e);
      at(ed.v, tau_[ed.u]) += inst.weight(e);
    }
  }

  const Configuration& configuration() const noexcept { return tau_; }

  Ticks delta(Vertex v, Part q) const { return at(v, tau_[v]) - at(v, q); }

  void apply(const Move& m) {
    check_move(tau_, m, k_);
    for (const auto& [u, e] : inst_->neighbors(m.v)) {
      at(u, m.from) -= inst_->weight(e);
      at(u, m.to) += inst_->weight(e);
    }
    tau_[m.v] = m.to;
  }

 private:
  Ticks& at(Vertex v, Part p) { return sums_[v * (k_ + 1) + p]; }
  Ticks at(Vertex v, Part p) const { return sums_[v * (k_ + 1) + p]; }

  const Instance* inst_;
  Part k_;
  Configuration tau_;
  std::vector<Ticks> sums_;
};

namespace detail {

inline std::optional<Step> pick_move(const PartSums& st, const Instance& inst, PivotKind kind,
                                     SplitMix64& rng, std::vector<Step>& scratch) {
  const auto& tau = st.configuration();
  const Part k = inst.k();
  if (kind == PivotKind::first_improving) {
    for (Vertex v = 0; v < inst.n(); ++v)
      for (Part q = 1; q <= k; ++q)
        if (q != tau[v]) {
          const Ticks d = st.delta(v, q);
          if (d > 0) return Step{{v, tau[v], q}, d};
        }
    return std::nullopt;
  }
  if (kind == PivotKind::best_improving) {
    std::optional<Step> best;
    for (Vertex v = 0; v < inst.n(); ++v)
      for (Part q = 1; q <= k; ++q)
        if (q != tau[v]) {
          const Ticks d = st.delta(v, q);
          if (d > 0 && (!best || d > best->delta)) best = Step{{v, tau[v], q}, d};
        }
    return best;
  }
  scratch.clear();
  for (Vertex v = 0; v < inst.n(); ++v)
    for (Part q = 1; q <= k; ++q)
      if (q != tau[v]) {
        const Ticks d = st.delta(v, q);
        if (d > 0) scratch.push_back({{v, tau[v], q}, d});
      }
  if (scratch.empty()) return std::nullopt;
  return scratch[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(scratch.size()) - 1))];
}

}  // namespace detail

/// Runs FLIP from tau0 until no improving move exists or `cap` steps were taken.
inline Trace run_flip(const Instance& inst, const Configuration& tau0, PivotRule rule,
                      std::size_t cap = kDefaultStepCap) {
  PartSums st(inst, tau0);
  Trace tr;
  tr.tau0 = tau0;
  SplitMix64 rng(mix_seed(rule.seed, 0x9170ULL));
  std::vector<Step> scratch;
  while (true) {
    auto next = detail::pick_move(st, inst, rule.kind, rng, scratch);
    if (!next) break;
    if (tr.steps.size() >= cap) {
      tr.cap_hit = true;
      break;
    }
    st.apply(next->move);
    tr.steps.push_back(*next);
  }
  return tr;
}

/// Raised by `replay` at the first move that is not valid for the running
/// configuration. `step()` is 1-based.
class InvalidAtStep : public InvalidMove {
 public:
  InvalidAtStep(std::size_t step, Move m)
      : InvalidMove("invalid move " + to_string(m) + " at step " + std::to_string(step)),
        step_(step), move_(m) {}
  std::size_t step() const noexcept { return step_; }
  const Move& move() const noexcept { return move_; }

 private:
  std::size_t step_;
  Move move_;
};

/// Validates an externally supplied move sequence and records exact deltas.
/// Non-improving steps are kept and listed in `non_improving`.
inline Trace replay(const Instance& inst, const Configuration& tau0, const std::vector<Move>& moves) {
  PartSums st(inst, tau0);
  Trace tr;
  tr.tau0 = tau0;
  tr.steps.reserve(moves.size());
  for (std::size_t t = 0; t < moves.size(); ++t) {
    const auto& m = moves[t];
    if (!is_valid_move(st.configuration(), m, inst.k())) throw InvalidAtStep(t + 1, m);
    const Ticks d = st.delta(m.v, m.to);
    st.apply(m);
    tr.steps.push_back({m, d});
    if (d <= 0) tr.non_improving.push_back(t);
  }
  return tr;
}

struct WindowRecord {
  std::size_t begin;      // 0-based first step
  std::size_t length;
  Ticks total;            // H after the window minus H before it
  Ticks max_step;         // largest single-step improvement inside the window
  bool truncated = false; // shorter than the requested window length
};

/// Disjoint windows of length w. A trailing partial window is reported with
/// `truncated` set; a trace shorter than w yields one truncated window.
inline std::vector<WindowRecord> window_stats(const Trace& tr, std::size_t w) {
  if (w == 0) throw InvalidParameter("window length must be >= 1");
  std::vector<WindowRecord> out;
  for (std::size_t b = 0; b < tr.length() || (b == 0 && out.empty()); b += w) {
    const std::size_t e = std::min(tr.length(), b + w);
    WindowRecord r{b, e - b, 0, 0, e - b < w};
    for (std::size_t t = b; t < e; ++t) {
      r.total += tr.steps[t].delta;
      r.max_step = (t == b) ? tr.steps[t].delta : std::max(r.max_step, tr.steps[t].delta);
    }
    out.push_back(r);
    if (tr.length() == 0) break;
  }
  return out;
}

}  // namespace flipbench
