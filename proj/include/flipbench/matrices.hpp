#pragma once

// The M and P sign matrices of a trace, exact rank, and the slowness events.
//
// Rows are edge ids of the instance. M has one column per time-step; P has one
// column per pair (k=2) or per cycle, equal to the sum of its M columns.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flipbench/analysis.hpp"
#include "flipbench/core.hpp"
#include "flipbench/engine.hpp"
#include "flipbench/instance_io.hpp"

namespace flipbench {

struct ColumnInfo {
  Vertex v = 0;
  std::vector<std::size_t> times;  // 0-based positions in the trace
};

struct MatrixEntry {
  std::uint32_t row;
  std::int32_t value;
  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Sparse small-integer matrix stored by columns; entries sorted by row.
class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(std::size_t rows, std::string scheme) : rows_(rows), scheme_(std::move(scheme)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::string& scheme() const noexcept { return scheme_; }

  const std::vector<MatrixEntry>& column(std::size_t c) const { return columns_.at(c); }
  const ColumnInfo& info(std::size_t c) const { return info_.at(c); }

  /// Appends a column; zero entries are dropped and rows sorted.
  void add_column(std::vector<MatrixEntry> entries, ColumnInfo info) {
    std::sort(entries.begin(), entries.end(),
              [](const MatrixEntry& a, const MatrixEntry& b) { return a.row < b.row; });
    std::vector<MatrixEntry> merged;
    for (const auto& e : entries) {
      if (e.row >= rows_) throw InvalidInput("matrix row out of range");
      if (!merged.empty() && merged.back().row == e.row)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const MatrixEntry& e) { return e.value == 0; });
    columns_.push_back(std::move(merged));
    info_.push_back(std::move(info));
  }

  std::int32_t at(std::size_t row, std::size_t col) const {
    const auto& c = columns_.at(col);
    auto it = std::lower_bound(c.begin(), c.end(), row,
                               [](const MatrixEntry& e, std::size_t r) { return e.row < r; });
    return (it != c.end() && it->row == row) ? it->value : 0;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }

  /// <column c, w> with w indexed by row.
  Ticks dot(std::size_t c, std::span<const Ticks> w) const {
    Ticks s = 0;
    for (const auto& e : columns_.at(c)) s += e.value * w[e.row];
    return s;
  }

  friend bool operator==(const SignMatrix& a, const SignMatrix& b) {
    return a.rows_ == b.rows_ && a.columns_ == b.columns_;
  }

 private:
  std::size_t rows_ = 0;
  std::string scheme_;
  std::vector<std::vector<MatrixEntry>> columns_;
  std::vector<ColumnInfo> info_;
};

/// M: column t has +1 on edges to neighbors in the departed part and -1 on
/// edges to neighbors in the destination part, so <M^t, X> is the step-t
/// improvement.
inline SignMatrix build_M(const Instance& inst, const Trace& tr) {
  SignMatrix m(inst.edge_count(), "steps");
  Configuration tau = tr.tau0;
  check_configuration(inst, tau);
  for (std::size_t t = 0; t < tr.length(); ++t) {
    const auto& mv = tr.steps[t].move;
    if (!is_valid_move(tau, mv, inst.k()))
      throw Refused("trace is invalid at step " + std::to_string(t + 1));
    std::vector<MatrixEntry> col;
    for (const auto& [u, e] : inst.neighbors(mv.v)) {
      if (tau[u] == mv.from)
        col.push_back({e, 1});
      else if (tau[u] == mv.to)
        col.push_back({e, -1});
    }
    m.add_column(std::move(col), {mv.v, {t}});
    tau[mv.v] = mv.to;
  }
  return m;
}

enum class ColumnScheme { pairs, cycles };

inline std::string to_string(ColumnScheme s) { return s == ColumnScheme::pairs ? "pairs" : "cycles"; }

inline ColumnScheme parse_scheme(const std::string& s) {
  if (s == "pairs") return ColumnScheme::pairs;
  if (s == "cycles") return ColumnScheme::cycles;
  throw InvalidParameter("unknown column scheme '" + s + "'");
}

/// Sum of the M columns at the given times.
inline SignMatrix columns_from_M(const SignMatrix& M, const std::vector<ColumnInfo>& groups,
                                 const std::string& scheme) {
  SignMatrix p(M.rows(), scheme);
  for (const auto& g : groups) {
    std::vector<MatrixEntry> col;
    for (auto t : g.times) {
      const auto& mc = M.column(t);
      col.insert(col.end(), mc.begin(), mc.end());
    }
    p.add_column(std::move(col), g);
  }
  return p;
}

inline SignMatrix build_P_pairs(const Instance& inst, const Trace& tr) {
  if (inst.k() != 2) throw Refused("pair columns need k = 2");
  const auto M = build_M(inst, tr);
  std::vector<ColumnInfo> groups;
  for (const auto& pr : pairs(tr.moves())) groups.push_back({pr.v, {pr.t1, pr.t2}});
  return columns_from_M(M, groups, "pairs");
}

inline SignMatrix build_P_cycles(const Instance& inst, const Trace& tr, const CycleSet& cs) {
  if (cs.truncated) throw Refused("cycle set is truncated; P would be incomplete");
  const auto M = build_M(inst, tr);
  std::vector<ColumnInfo> groups;
  for (const auto& c : cs.cycles) groups.push_back({c.v, c.times});
  return columns_from_M(M, groups, "cycles");
}

inline SignMatrix build_P(const Instance& inst, const Trace& tr, ColumnScheme scheme,
                          std::size_t cycle_cap = kDefaultCycleCap) {
  if (scheme == ColumnScheme::pairs) return build_P_pairs(inst, tr);
  const auto moves = tr.moves();
  return build_P_cycles(inst, tr, cycles(moves, inst.k(), cycle_cap));
}

// ---------------------------------------------------------------------------
// Exact rank

using DenseMatrix = std::vector<std::vector<std::int64_t>>;

namespace detail {

struct RankOverflow {};

inline std::int64_t checked_lin(std::int64_t a, std::int64_t x, std::int64_t b, std::int64_t y) {
  std::int64_t p, q, r;
  if (__builtin_mul_overflow(a, x, &p) || __builtin_mul_overflow(b, y, &q) ||
      __builtin_sub_overflow(p, q, &r))
    throw RankOverflow{};
  return r;
}

inline boost::multiprecision::cpp_int checked_lin(const boost::multiprecision::cpp_int& a,
                                                  const boost::multiprecision::cpp_int& x,
                                                  const boost::multiprecision::cpp_int& b,
                                                  const boost::multiprecision::cpp_int& y) {
  return a * x - b * y;
}

inline std::int64_t int_abs(std::int64_t x) { return x < 0 ? -x : x; }
inline boost::multiprecision::cpp_int int_abs(const boost::multiprecision::cpp_int& x) {
  return boost::multiprecision::abs(x);
}
inline std::int64_t int_gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }
inline boost::multiprecision::cpp_int int_gcd(const boost::multiprecision::cpp_int& a,
                                              const boost::multiprecision::cpp_int& b) {
  return boost::multiprecision::gcd(a, b);
}

/// Fraction-free row echelon: row_i <- (p/g) row_i - (a/g) row_piv, then the
/// row is divided by the gcd of its entries. Every step multiplies a row by a
/// nonzero integer or adds a multiple of another row, so the rank over Q is
/// preserved exactly while intermediate growth stays modest on sparse input.
template <class Int>
std::size_t echelon_rank(std::vector<std::vector<Int>> a) {
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t r = rank; r < rows; ++r)
      if (a[r][c] != 0 && (piv == rows || int_abs(a[r][c]) < int_abs(a[piv][c]))) piv = r;
    if (piv == rows) continue;
    std::swap(a[rank], a[piv]);
    const auto& pr = a[rank];
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const Int g = int_gcd(pr[c], a[r][c]);
      const Int x = pr[c] / g, y = a[r][c] / g;
      Int content = 0;
      for (std::size_t j = c; j < cols; ++j) {
        if (pr[j] == 0 && a[r][j] == 0) continue;
        a[r][j] = checked_lin(x, a[r][j], y, pr[j]);
        if (a[r][j] != 0) content = int_gcd(content, a[r][j]);
      }
      if (content > 1)
        for (std::size_t j = c; j < cols; ++j) a[r][j] /= content;
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// Exact rank over the rationals. Zero rows and columns are dropped first;
/// elimination runs in checked 64-bit arithmetic and restarts with
/// arbitrary-precision integers if any intermediate would overflow.
inline std::size_t exact_rank(const DenseMatrix& m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  std::vector<bool> col_used(cols, false);
  DenseMatrix rows;
  for (const auto& r : m) {
    if (r.size() != cols) throw InvalidInput("ragged matrix");
    if (std::any_of(r.begin(), r.end(), [](std::int64_t x) { return x != 0; })) rows.push_back(r);
    for (std::size_t j = 0; j < cols; ++j)
      if (r[j] != 0) col_used[j] = true;
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < cols; ++j)
    if (col_used[j]) keep.push_back(j);
  if (rows.empty()) return 0;
  for (auto& r : rows) {
    std::vector<std::int64_t> packed;
    packed.reserve(keep.size());
    for (auto j : keep) packed.push_back(r[j]);
    r = std::move(packed);
  }
  // eliminate along the shorter side
  if (rows.size() > keep.size()) {
    DenseMatrix t(keep.size(), std::vector<std::int64_t>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < keep.size(); ++j) t[j][i] = rows[i][j];
    rows = std::move(t);
  }
  try {
    return detail::echelon_rank(rows);
  } catch (const detail::RankOverflow&) {
    using boost::multiprecision::cpp_int;
    std::vector<std::vector<cpp_int>> big(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      big[i].assign(rows[i].begin(), rows[i].end());
    return detail::echelon_rank(std::move(big));
  }
}

/// Dense copy restricted to the given rows (all columns).
inline DenseMatrix dense_rows(const SignMatrix& m, const std::vector<std::uint32_t>& rows) {
  std::map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < rows.size(); ++i) pos.emplace(rows[i], i);
  DenseMatrix d(rows.size(), std::vector<std::int64_t>(m.cols(), 0));
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& e : m.column(c))
      if (auto it = pos.find(e.row); it != pos.end()) d[it->second][c] = e.value;
  return d;
}

inline std::size_t exact_rank(const SignMatrix& m) {
  std::vector<std::uint32_t> rows;
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& e : m.column(c)) rows.push_back(e.row);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return exact_rank(dense_rows(m, rows));
}

// ---------------------------------------------------------------------------
// Slowness events

struct SlownessReport {
  bool all_positive = true;   // <P^C, X> > 0 for every column
  Rational sum{0};            // sum over columns
  Rational max{0};            // largest column value (0 if no columns)
  bool e_event = true;        // all positive and sum <= 2 eps
  bool d_event = true;        // every column in (0, k eps]
  std::size_t columns = 0;
};

inline SlownessReport slowness_events(const SignMatrix& P, std::span<const Ticks> weights,
                                      Ticks denom, Rational eps, Part k) {
  SlownessReport rep;
  rep.columns = P.cols();
  Ticks sum = 0, mx = 0;
  const Rational keps = eps * static_cast<std::int64_t>(k);
  for (std::size_t c = 0; c < P.cols(); ++c) {
    const Ticks v = P.dot(c, weights);
    if (v <= 0) rep.all_positive = false;
    if (c == 0 || v > mx) mx = v;
    sum += v;
    const Rational val(v, denom);
    if (!(v > 0 && val <= keps)) rep.d_event = false;
  }
  rep.sum = Rational(sum, denom);
  rep.max = Rational(mx, denom);
  rep.e_event = rep.all_positive && rep.sum <= eps * 2;
  return rep;
}

// ---------------------------------------------------------------------------
// Text dump
//
//   # flipbench matrix
//   scheme <steps|pairs|cycles>
//   rows R cols C
//   column <id> <v> <t...>      one per column, times 1-based
//   <row> <col> <value>         nonzero entries, 0-based row and column

inline void write_matrix(std::ostream& out, const SignMatrix& m) {
  out << "# flipbench matrix\n";
  out << "scheme " << m.scheme() << '\n';
  out << "rows " << m.rows() << " cols " << m.cols() << '\n';
  for (std::size_t c = 0; c < m.cols(); ++c) {
    out << "column " << c << ' ' << m.info(c).v;
    for (auto t : m.info(c).times) out << ' ' << t + 1;
    out << '\n';
  }
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& e : m.column(c)) out << e.row << ' ' << c << ' ' << e.value << '\n';
}

inline SignMatrix read_matrix(std::istream& in) {
  std::string line, scheme;
  std::size_t lineno = 0, rows = 0, cols = 0;
  bool have_dims = false;
  std::vector<ColumnInfo> infos;
  std::vector<std::vector<MatrixEntry>> entries;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "scheme") {
      ls >> scheme;
    } else if (key == "rows") {
      std::string c;
      if (!(ls >> rows >> c >> cols) || c != "cols") throw ParseError(lineno, "expected 'rows R cols C'");
      have_dims = true;
      infos.resize(cols);
      entries.resize(cols);
    } else if (key == "column") {
      std::size_t id;
      long long v;
      if (!have_dims || !(ls >> id >> v) || id >= cols || v < 0)
        throw ParseError(lineno, "bad column line");
      infos[id].v = static_cast<Vertex>(v);
      long long t;
      while (ls >> t) {
        if (t < 1) throw ParseError(lineno, "times are 1-based");
        infos[id].times.push_back(static_cast<std::size_t>(t - 1));
      }
    } else {
      std::istringstream es(line);
      long long r, c, v;
      if (!have_dims || !(es >> r >> c >> v) || r < 0 || c < 0 ||
          static_cast<std::size_t>(r) >= rows || static_cast<std::size_t>(c) >= cols)
        throw ParseError(lineno, "expected 'row col value'");
      entries[static_cast<std::size_t>(c)].push_back(
          {static_cast<std::uint32_t>(r), static_cast<std::int32_t>(v)});
    }
  }
  if (!have_dims) throw ParseError(0, "matrix has no dimension line");
  SignMatrix m(rows, scheme);
  for (std::size_t c = 0; c < cols; ++c) m.add_column(std::move(entries[c]), infos[c]);
  return m;
}

}  // namespace flipbench
