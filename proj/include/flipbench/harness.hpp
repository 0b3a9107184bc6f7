#pragma once

// Experiment driver: scaling studies, rank-bound campaigns, Monte-Carlo checks
// of the slow-improvement probability bounds, and approximation checks. Every
// experiment returns a CsvTable whose content is a pure function of the
// config; trials may run on several threads but rows are assembled by index.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flipbench/analysis.hpp"
#include "flipbench/certificates.hpp"
#include "flipbench/core.hpp"
#include "flipbench/engine.hpp"
#include "flipbench/generator.hpp"
#include "flipbench/instance_io.hpp"
#include "flipbench/matrices.hpp"
#include "flipbench/trace_io.hpp"

namespace flipbench {

inline const double kDefaultBeta = 1.0 / std::sqrt(2.0);

// ---------------------------------------------------------------------------
// Config

enum class ExperimentMode { scaling, rank, mc, approx };

inline std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::scaling: return "scaling";
    case ExperimentMode::rank: return "rank";
    case ExperimentMode::mc: return "mc";
    case ExperimentMode::approx: return "approx";
  }
  return "?";
}

inline ExperimentMode parse_mode(const std::string& s) {
  if (s == "scaling") return ExperimentMode::scaling;
  if (s == "rank") return ExperimentMode::rank;
  if (s == "mc") return ExperimentMode::mc;
  if (s == "approx") return ExperimentMode::approx;
  throw InvalidParameter("unknown experiment mode '" + s + "'");
}

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::scaling;
  std::vector<std::size_t> n_grid{8};
  Part k = 2;
  std::vector<Rational> phi_grid{Rational(1)};
  double beta = kDefaultBeta;
  double eta = 0.1;  // reporting exponent only
  std::size_t trials = 10;
  PivotKind rule = PivotKind::first_improving;
  std::uint64_t seed = 1;
  std::uint64_t cap = kDefaultStepCap;
  GraphKind graph = GraphKind::complete;
  double p = 0.5;  // gnp edge probability
  std::string out;
  std::size_t threads = 1;
  bool timing = false;  // adds a wall_ms column; breaks byte-for-byte reproducibility
  // mc mode
  std::vector<Part> mc_k{1, 2, 3};
  double eps = 0.05;
  std::size_t samples = 1'000'000;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t lineno) {
  std::istringstream is(s);
  T v{};
  std::string extra;
  if (!(is >> v) || (is >> extra)) throw ParseError(lineno, "bad number '" + s + "'");
  return v;
}

}  // namespace detail

/// Reads `key value` lines; '#' starts a comment. Grids accept comma or space
/// separated lists.
inline ExperimentConfig read_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream ls(line);
    std::string key, rest;
    ls >> key;
    std::getline(ls, rest);
    const auto items = detail::split_list(rest);
    if (items.empty()) throw ParseError(lineno, "key '" + key + "' has no value");
    const auto& v = items.front();
    auto single = [&] {
      if (items.size() != 1) throw ParseError(lineno, "key '" + key + "' takes one value");
    };
    try {
      if (key == "mode") {
        single();
        cfg.mode = parse_mode(v);
      } else if (key == "n") {
        cfg.n_grid.clear();
        for (const auto& x : items) cfg.n_grid.push_back(detail::parse_number<std::size_t>(x, lineno));
      } else if (key == "k") {
        single();
        cfg.k = detail::parse_number<Part>(v, lineno);
      } else if (key == "phi") {
        cfg.phi_grid.clear();
        for (const auto& x : items) cfg.phi_grid.push_back(parse_rational(x));
      } else if (key == "beta") {
        single();
        cfg.beta = detail::parse_number<double>(v, lineno);
      } else if (key == "eta") {
        single();
        cfg.eta = detail::parse_number<double>(v, lineno);
      } else if (key == "trials") {
        single();
        cfg.trials = detail::parse_number<std::size_t>(v, lineno);
      } else if (key == "rule") {
        single();
        cfg.rule = parse_pivot(v);
      } else if (key == "seed") {
        single();
        cfg.seed = detail::parse_number<std::uint64_t>(v, lineno);
      } else if (key == "cap") {
        single();
        cfg.cap = detail::parse_number<std::uint64_t>(v, lineno);
      } else if (key == "graph") {
        single();
        if (v == "complete")
          cfg.graph = GraphKind::complete;
        else if (v == "gnp")
          cfg.graph = GraphKind::gnp;
        else
          throw ParseError(lineno, "graph must be complete or gnp");
      } else if (key == "p") {
        single();
        cfg.p = detail::parse_number<double>(v, lineno);
      } else if (key == "out") {
        single();
        cfg.out = v;
      } else if (key == "threads") {
        single();
        cfg.threads = detail::parse_number<std::size_t>(v, lineno);
      } else if (key == "timing") {
        single();
        cfg.timing = detail::parse_number<int>(v, lineno) != 0;
      } else if (key == "mc_k") {
        cfg.mc_k.clear();
        for (const auto& x : items) cfg.mc_k.push_back(detail::parse_number<Part>(x, lineno));
      } else if (key == "eps") {
        single();
        cfg.eps = detail::parse_number<double>(v, lineno);
      } else if (key == "samples") {
        single();
        cfg.samples = detail::parse_number<std::size_t>(v, lineno);
      } else {
        throw ParseError(lineno, "unknown config key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (cfg.n_grid.empty() || cfg.phi_grid.empty()) throw InvalidParameter("grids must be non-empty");
  if (cfg.trials == 0) throw InvalidParameter("trials must be positive");
  if (cfg.k < 2) throw InvalidParameter("k must be at least 2");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  auto in = detail::open_input(path);
  return read_config(in);
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw NotFound("no CSV column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  const std::string& at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

inline void write_csv(std::ostream& out, const CsvTable& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::string csv_string(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

inline std::string fmt_double(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string fmt_fixed(double x, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

// ---------------------------------------------------------------------------
// Parallel trial execution

/// Runs f(0..count-1) on up to `threads` workers and returns results by index.
/// The first exception (lowest index) is rethrown after all workers finish.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, std::size_t threads, F f) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errs(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const std::size_t t = std::max<std::size_t>(1, std::min(threads, count));
  if (t == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < t; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Theorem bound values, as log10

inline double log10_bound_complete_maxcut(double n, double phi, double eta) {
  return std::log10(1580.0 * phi) + (2 + std::sqrt(2.0)) * (std::sqrt(2.0) + eta) * std::log10(n);
}

inline double log10_bound_complete_3cut(double n, double phi, double eta) {
  return std::log10(phi) + (99 + eta) * std::log10(n);  // hidden constant taken as 1
}

inline double log10_bound_arbitrary_kcut(double n, double phi, double eta, Part k) {
  const double kk = k;
  return std::log10(phi) + (2 * (2 * kk - 1) * kk * std::log2(kk * n) + 3 + eta) * std::log10(n);
}

// ---------------------------------------------------------------------------
// Trial setup

struct TrialSetup {
  std::size_t cell;
  std::size_t n;
  Rational phi;
  std::size_t trial;
  std::uint64_t seed;
};

inline std::vector<TrialSetup> trial_grid(const ExperimentConfig& cfg) {
  std::vector<TrialSetup> g;
  std::size_t cell = 0;
  for (auto n : cfg.n_grid)
    for (const auto& phi : cfg.phi_grid) {
      for (std::size_t t = 0; t < cfg.trials; ++t) g.push_back({cell, n, phi, t, mix_seed(cfg.seed, cell, t)});
      ++cell;
    }
  return g;
}

inline Instance trial_instance(const ExperimentConfig& cfg, const TrialSetup& ts) {
  auto edges = build_graph(cfg.graph, ts.n, cfg.p, mix_seed(ts.seed, 1));
  return make_instance(ts.n, cfg.k, std::move(edges), SmoothingProfile{ts.phi, {}, mix_seed(ts.seed, 2)},
                       cfg.graph == GraphKind::complete);
}

inline Trace trial_trace(const ExperimentConfig& cfg, const TrialSetup& ts, const Instance& inst) {
  return run_flip(inst, random_configuration(ts.n, cfg.k, mix_seed(ts.seed, 3)),
                  PivotRule{cfg.rule, mix_seed(ts.seed, 4)}, cfg.cap);
}

// ---------------------------------------------------------------------------
// Scaling

/// One row per trial (row_type=trial) and one summary row per (n, phi) cell
/// with the observed maximum and median step counts next to the log10 of the
/// three run-time bounds.
inline CsvTable exp_scaling(const ExperimentConfig& cfg) {
  CsvTable t;
  t.header = {"row_type", "n", "k", "phi", "trial", "seed", "steps", "cap_hit", "local_opt",
              "h_start", "h_final", "trace_hash", "max_steps", "median_steps", "cap_hits",
              "log10_bound_maxcut_complete", "log10_bound_3cut_complete", "log10_bound_kcut_arbitrary"};
  if (cfg.timing) t.header.push_back("wall_ms");
  const auto grid = trial_grid(cfg);
  struct Res {
    std::size_t steps = 0;
    bool cap_hit = false;
    std::vector<std::string> row;
  };
  auto res = parallel_map<Res>(grid.size(), cfg.threads, [&](std::size_t i) {
    const auto& ts = grid[i];
    const auto start = std::chrono::steady_clock::now();
    const auto inst = trial_instance(cfg, ts);
    const auto tr = trial_trace(cfg, ts, inst);
    const auto fin = tr.final_configuration(cfg.k);
    Res r;
    r.steps = tr.length();
    r.cap_hit = tr.cap_hit;
    r.row = {"trial", std::to_string(ts.n), std::to_string(cfg.k), to_string(ts.phi),
             std::to_string(ts.trial), std::to_string(ts.seed), std::to_string(tr.length()),
             tr.cap_hit ? "1" : "0", is_local_optimum(inst, fin) ? "1" : "0",
             to_string(hamiltonian(inst, tr.tau0)), to_string(hamiltonian(inst, fin)),
             hex64(trace_hash(tr)), "", "", "", "", "", ""};
    if (cfg.timing)
      r.row.push_back(fmt_fixed(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(), 3));
    return r;
  });
  for (std::size_t i = 0; i < grid.size();) {
    std::size_t j = i;
    std::vector<std::size_t> steps;
    std::size_t caps = 0;
    while (j < grid.size() && grid[j].cell == grid[i].cell) {
      t.rows.push_back(res[j].row);
      steps.push_back(res[j].steps);
      caps += res[j].cap_hit;
      ++j;
    }
    std::sort(steps.begin(), steps.end());
    const std::size_t m = steps.size();
    const Rational median = m % 2 ? Rational(static_cast<std::int64_t>(steps[m / 2]))
                                  : Rational(static_cast<std::int64_t>(steps[m / 2 - 1] + steps[m / 2]), 2);
    const double n = static_cast<double>(grid[i].n);
    const double phi = to_double(grid[i].phi);
    std::vector<std::string> row = {"summary", std::to_string(grid[i].n), std::to_string(cfg.k),
                                    to_string(grid[i].phi), "", "", "", "", "", "", "", "",
                                    std::to_string(steps.back()), to_string(median), std::to_string(caps),
                                    fmt_fixed(log10_bound_complete_maxcut(n, phi, cfg.eta)),
                                    fmt_fixed(log10_bound_complete_3cut(n, phi, cfg.eta)),
                                    fmt_fixed(log10_bound_arbitrary_kcut(n, phi, cfg.eta, cfg.k))};
    if (cfg.timing) row.push_back("");
    t.rows.push_back(std::move(row));
    i = j;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Rank campaign

/// Lemma window lengths: ceil((1+beta) n) for k = 2, 3n for k = 3 on complete
/// graphs, kn otherwise.
inline std::size_t campaign_window(std::size_t n, Part k, double beta, bool complete) {
  if (k == 2) return ceil_one_plus_beta(n, beta);
  if (k == 3 && complete) return 3 * n;
  return static_cast<std::size_t>(k) * n;
}

struct RankRecord {
  std::string certificate;  // k2 | 3cut | half
  std::string skip;         // nonempty when no block was analysed
  std::size_t trace_len = 0, window_len = 0;
  std::size_t block_begin = 0, block_len = 0;
  std::size_t s = 0, c = 0, rows = 0, cols = 0, rank = 0, arcs = 0;
  bool valid = true;
  std::string reason;
  std::string lemma_bound;  // certificate lemma value (rational)
  std::size_t target = 0;   // corollary target
  bool arcs_meet_lemma = true;
  bool violation = false;
  std::string trace_hash;
};

/// Analyses one trace: takes the lemma window prefix, extracts the block the
/// corresponding lemma speaks about, builds P, its exact rank and the
/// certificate, and validates the certificate against P.
inline RankRecord rank_trial(const Instance& inst, const Trace& tr, double beta) {
  RankRecord r;
  const Part k = inst.k();
  r.trace_hash = hex64(trace_hash(tr));
  r.trace_len = tr.length();
  r.window_len = std::min(tr.length(), campaign_window(inst.n(), k, beta, inst.complete()));
  const auto window = tr.slice(0, r.window_len, k);
  const auto wmoves = window.moves();
  const Sequence wseq(wmoves);
  if (k == 2) {
    r.certificate = "k2";
    Block b;
    try {
      b = find_critical_block(wseq, beta);
    } catch (const NotFound&) {
      r.skip = "no_critical_block";
      return r;
    }
    r.block_begin = b.begin;
    r.block_len = b.length();
    const auto block = window.slice(b.begin, b.end, k);
    const auto P = build_P_pairs(inst, block);
    const auto cert = build_k2_certificate(inst, block, beta, &P);
    const auto vd = validate_certificate(inst, P, cert.graph);
    r.s = cert.s;
    r.c = cert.s2;
    r.rows = P.rows();
    r.cols = P.cols();
    r.rank = exact_rank(P);
    r.arcs = cert.graph.size();
    r.valid = vd.valid;
    r.reason = vd.reason;
    r.lemma_bound = std::to_string(cert.lemma_bound);
    r.target = cert.target;
    r.arcs_meet_lemma = r.arcs >= cert.s2;
  } else if (k == 3 && inst.complete()) {
    r.certificate = "3cut";
    Block b;
    try {
      b = two_critical_block(wseq);
    } catch (const NotFound&) {
      r.skip = "no_2critical_block";
      return r;
    }
    r.block_begin = b.begin;
    r.block_len = b.length();
    const auto block = window.slice(b.begin, b.end, k);
    const auto cert = build_3cut_certificate(inst, block);
    const auto cs = cycles(Sequence(block.moves()), k);
    const auto P = build_P_cycles(inst, block, cs);
    const auto v1 = validate_certificate(inst, P, cert.half.graph);
    const auto v2 = validate_certificate(inst, P, cert.neighborwise);
    r.s = cert.s;
    r.c = cert.c;
    r.rows = P.rows();
    r.cols = P.cols();
    r.rank = exact_rank(P);
    r.arcs = cert.best().size();
    r.valid = v1.valid && v2.valid;
    r.reason = !v1.valid ? "half: " + v1.reason : (!v2.valid ? "neighborwise: " + v2.reason : "");
    r.lemma_bound = to_string(Rational(cert.sum_b_minus_3, 6));
    r.target = cert.target;
    r.arcs_meet_lemma = cert.half.graph.size() >= cert.half.target &&
                        Rational(static_cast<std::int64_t>(cert.neighborwise.size())) >=
                            Rational(cert.sum_b_minus_3, 6);
  } else {
    r.certificate = "half";
    r.block_len = r.window_len;
    const auto a = analyze_cut(inst, window);
    const auto cert = build_half_certificate(inst, a);
    const auto vd = validate_certificate(inst, a.P, cert.graph);
    r.s = a.occ.s();
    r.c = cert.c;
    r.rows = a.P.rows();
    r.cols = a.P.cols();
    r.rank = exact_rank(a.P);
    r.arcs = cert.graph.size();
    r.valid = vd.valid;
    r.reason = vd.reason;
    r.lemma_bound = std::to_string(cert.target);
    r.target = cert.target;
    r.arcs_meet_lemma = r.arcs >= cert.target;
  }
  r.violation = !r.valid || r.rank < r.arcs || r.rank < r.target || !r.arcs_meet_lemma;
  return r;
}

inline CsvTable exp_rank_campaign(const ExperimentConfig& cfg) {
  CsvTable t;
  t.header = {"n", "k", "phi", "trial", "seed", "trace_hash", "trace_len", "window_len",
              "certificate", "skip", "block_begin", "block_len", "s", "c", "rows", "cols", "rank",
              "arcs", "cert_valid", "lemma_bound", "target", "violation"};
  if (cfg.timing) t.header.push_back("wall_ms");
  const auto grid = trial_grid(cfg);
  t.rows = parallel_map<std::vector<std::string>>(grid.size(), cfg.threads, [&](std::size_t i) {
    const auto& ts = grid[i];
    const auto start = std::chrono::steady_clock::now();
    const auto inst = trial_instance(cfg, ts);
    const auto tr = trial_trace(cfg, ts, inst);
    const auto r = rank_trial(inst, tr, cfg.beta);
    std::vector<std::string> row = {
        std::to_string(ts.n), std::to_string(cfg.k), to_string(ts.phi), std::to_string(ts.trial),
        std::to_string(ts.seed), r.trace_hash, std::to_string(r.trace_len), std::to_string(r.window_len),
        r.certificate, r.skip.empty() ? "-" : r.skip, std::to_string(r.block_begin),
        std::to_string(r.block_len), std::to_string(r.s), std::to_string(r.c), std::to_string(r.rows),
        std::to_string(r.cols), std::to_string(r.rank), std::to_string(r.arcs), r.valid ? "1" : "0",
        r.skip.empty() ? r.lemma_bound : "-", std::to_string(r.target), r.violation ? "1" : "0"};
    if (cfg.timing)
      row.push_back(fmt_fixed(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(), 3));
    return row;
  });
  return t;
}

// ---------------------------------------------------------------------------
// Monte Carlo for the slow-improvement probability bounds

struct McReport {
  std::size_t k = 0, m = 0, samples = 0;
  double phi = 0, eps = 0;
  double e_hat = 0;    // Pr[<a_i,X> > 0 for all i, sum <= eps]
  double e_bound = 0;  // (phi eps)^k / k!
  double e_sigma = 0;  // binomial standard error at the reference probability
  double d_hat = 0;    // Pr[<a_i,X> in (0, eps] for all i]
  double d_bound = 0;  // (phi eps)^k
  double d_sigma = 0;
  bool coordinate = false;   // vectors are distinct unit vectors: closed forms apply
  double e_closed = 0, d_closed = 0;
  bool e_pass = false, d_pass = false;
};

inline double factorial(std::size_t k) {
  double f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

/// Samples X uniform on [-1/(2 phi), 1/(2 phi)]^m and estimates both events.
/// The vectors must be linearly independent (checked exactly).
inline McReport mc_slow_bound(const std::vector<std::vector<std::int64_t>>& alphas, double phi, double eps,
                              std::size_t samples, std::uint64_t seed) {
  if (alphas.empty()) throw InvalidParameter("need at least one vector");
  if (!(phi >= 0.5)) throw InvalidParameter("phi must be at least 1/2");
  if (!(eps > 0)) throw InvalidParameter("eps must be positive");
  if (samples == 0) throw InvalidParameter("samples must be positive");
  const std::size_t m = alphas.front().size();
  for (const auto& a : alphas)
    if (a.size() != m) throw InvalidParameter("vectors differ in dimension");
  const auto rank = exact_rank(DenseMatrix(alphas));
  if (rank < alphas.size())
    throw Refused("vectors are linearly dependent: rank " + std::to_string(rank) + " < " +
                  std::to_string(alphas.size()));
  McReport r;
  r.k = alphas.size();
  r.m = m;
  r.samples = samples;
  r.phi = phi;
  r.eps = eps;
  r.e_bound = std::pow(phi * eps, static_cast<double>(r.k)) / factorial(r.k);
  r.d_bound = std::pow(phi * eps, static_cast<double>(r.k));

  r.coordinate = m >= r.k;
  std::vector<std::size_t> coord(r.k);
  for (std::size_t i = 0; i < r.k && r.coordinate; ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (alphas[i][j] == 1) {
        ++ones;
        coord[i] = j;
      } else if (alphas[i][j] != 0) {
        r.coordinate = false;
      }
    }
    if (ones != 1) r.coordinate = false;
  }
  const double half = 0.5 / phi;
  if (r.coordinate && eps <= half) {
    r.e_closed = r.e_bound;  // simplex of side eps inside the support
    r.d_closed = r.d_bound;  // cube of side eps inside the support
  } else {
    r.coordinate = false;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-half, half);
  std::vector<double> x(m);
  std::size_t e_hits = 0, d_hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& xi : x) xi = unif(rng);
    bool pos = true, each = true;
    double sum = 0;
    for (const auto& a : alphas) {
      double dot = 0;
      for (std::size_t j = 0; j < m; ++j) dot += static_cast<double>(a[j]) * x[j];
      pos = pos && dot > 0;
      each = each && dot > 0 && dot <= eps;
      sum += dot;
    }
    e_hits += pos && sum <= eps;
    d_hits += each;
  }
  const double N = static_cast<double>(samples);
  r.e_hat = static_cast<double>(e_hits) / N;
  r.d_hat = static_cast<double>(d_hits) / N;
  auto sigma = [&](double p0) {
    p0 = std::clamp(p0, 0.0, 1.0);
    return std::sqrt(p0 * (1 - p0) / N);
  };
  r.e_sigma = sigma(r.coordinate ? r.e_closed : r.e_bound);
  r.d_sigma = sigma(r.coordinate ? r.d_closed : r.d_bound);
  r.e_pass = r.e_hat <= r.e_bound + 3 * r.e_sigma &&
             (!r.coordinate || std::abs(r.e_hat - r.e_closed) <= 3 * r.e_sigma);
  r.d_pass = r.d_hat <= r.d_bound + 3 * r.d_sigma &&
             (!r.coordinate || std::abs(r.d_hat - r.d_closed) <= 3 * r.d_sigma);
  return r;
}

inline std::vector<std::vector<std::int64_t>> coordinate_vectors(std::size_t k) {
  std::vector<std::vector<std::int64_t>> a(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) a[i][i] = 1;
  return a;
}

inline CsvTable exp_mc(const ExperimentConfig& cfg) {
  CsvTable t;
  t.header = {"k", "phi", "eps", "samples", "seed", "e_hat", "e_bound", "e_closed", "e_sigma", "e_pass",
              "d_hat", "d_bound", "d_closed", "d_sigma", "d_pass"};
  std::vector<std::pair<Part, Rational>> cells;
  for (auto kk : cfg.mc_k)
    for (const auto& phi : cfg.phi_grid) cells.emplace_back(kk, phi);
  t.rows = parallel_map<std::vector<std::string>>(cells.size(), cfg.threads, [&](std::size_t i) {
    const auto [kk, phi] = cells[i];
    const auto seed = mix_seed(cfg.seed, i);
    const auto r = mc_slow_bound(coordinate_vectors(kk), to_double(phi), cfg.eps, cfg.samples, seed);
    return std::vector<std::string>{
        std::to_string(kk), to_string(phi), fmt_double(cfg.eps), std::to_string(cfg.samples),
        std::to_string(seed), fmt_double(r.e_hat), fmt_double(r.e_bound),
        r.coordinate ? fmt_double(r.e_closed) : "-", fmt_double(r.e_sigma), r.e_pass ? "1" : "0",
        fmt_double(r.d_hat), fmt_double(r.d_bound), r.coordinate ? fmt_double(r.d_closed) : "-",
        fmt_double(r.d_sigma), r.d_pass ? "1" : "0"};
  });
  return t;
}

// ---------------------------------------------------------------------------
// Approximation quality

inline constexpr std::size_t kMaxBruteForceN = 12;

/// Maximum cut in ticks over all k^n configurations (vertex 0 fixed to part 1
/// by symmetry), enumerated as an odometer with O(deg) updates per change.
inline Ticks brute_force_max_cut(const Instance& inst) {
  const std::size_t n = inst.n();
  const Part k = inst.k();
  if (n > kMaxBruteForceN) throw Refused("brute force limited to n <= 12");
  Configuration tau(std::vector<Part>(n, 1));
  Ticks cut = 0, best = 0;
  while (true) {
    std::size_t v = 1;
    while (v < n && tau[v] == k) {
      const Move m{static_cast<Vertex>(v), k, 1};
      cut += move_delta_ticks(inst, tau, m);
      apply_move_in_place(tau, m, k);
      ++v;
    }
    if (v >= n) break;
    const Move m{static_cast<Vertex>(v), tau[v], tau[v] + 1};
    cut += move_delta_ticks(inst, tau, m);
    apply_move_in_place(tau, m, k);
    best = std::max(best, cut);
  }
  return best;
}

/// Instance with weights uniform of density phi on [0, 1/phi]; needs phi >= 1.
inline Instance nonnegative_instance(std::size_t n, Part k, Rational phi, std::uint64_t seed,
                                     GraphKind graph = GraphKind::complete, double p = 0.5) {
  if (phi < Rational(1)) throw InvalidParameter("nonnegative weights with density phi need phi >= 1");
  auto edges = build_graph(graph, n, p, mix_seed(seed, 1));
  const Ticks c = ceil(Rational(1) / (phi * 2) * kDefaultDenominator);
  SmoothingProfile prof{phi, std::vector<Ticks>(edges.size(), c), mix_seed(seed, 2)};
  return make_instance(n, k, std::move(edges), prof, graph == GraphKind::complete);
}

struct ApproxRecord {
  Ticks local = 0, opt = 0;
  bool ok = true;  // k * local >= (k - 1) * opt
};

inline ApproxRecord approx_trial(const Instance& inst, const Trace& tr) {
  if (inst.n() > kMaxBruteForceN) throw Refused("approx_check needs n <= 12");
  for (std::size_t e = 0; e < inst.edge_count(); ++e)
    if (inst.weight(e) < 0) throw InvalidInput("approx_check needs nonnegative weights");
  ApproxRecord r;
  r.local = cut_ticks(inst, tr.final_configuration(inst.k()));
  r.opt = brute_force_max_cut(inst);
  const auto k = static_cast<Ticks>(inst.k());
  r.ok = k * r.local >= (k - 1) * r.opt;
  return r;
}

inline CsvTable approx_check(const ExperimentConfig& cfg) {
  for (auto n : cfg.n_grid)
    if (n > kMaxBruteForceN) throw Refused("approx mode needs n <= 12 (brute-force oracle)");
  CsvTable t;
  t.header = {"n", "k", "phi", "trial", "seed", "local_cut", "opt_cut", "ratio", "ok"};
  const auto grid = trial_grid(cfg);
  t.rows = parallel_map<std::vector<std::string>>(grid.size(), cfg.threads, [&](std::size_t i) {
    const auto& ts = grid[i];
    const auto inst = nonnegative_instance(ts.n, cfg.k, ts.phi, ts.seed, cfg.graph, cfg.p);
    const auto tr = trial_trace(cfg, ts, inst);
    const auto r = approx_trial(inst, tr);
    const Ticks D = inst.denominator();
    return std::vector<std::string>{
        std::to_string(ts.n), std::to_string(cfg.k), to_string(ts.phi), std::to_string(ts.trial),
        std::to_string(ts.seed), to_string(Rational(r.local, D)), to_string(Rational(r.opt, D)),
        r.opt > 0 ? to_string(Rational(r.local, r.opt)) : "1/1", r.ok ? "1" : "0"};
  });
  return t;
}

// ---------------------------------------------------------------------------

inline CsvTable run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case ExperimentMode::scaling: return exp_scaling(cfg);
    case ExperimentMode::rank: return exp_rank_campaign(cfg);
    case ExperimentMode::mc: return exp_mc(cfg);
    case ExperimentMode::approx: return approx_check(cfg);
  }
  throw InvalidParameter("unknown mode");
}

}  // namespace flipbench
