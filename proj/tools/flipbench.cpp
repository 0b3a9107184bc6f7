// flipbench: command line front end for the FLIP laboratory.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "flipbench/flipbench.hpp"

using namespace flipbench;

namespace {

std::ostream* out_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file = detail::open_output(path);
  return &file;
}

Trace load_block(const Instance& inst, const Trace& tr, const std::string& which, double beta) {
  const auto moves = tr.moves();
  const Sequence seq(moves);
  Block b{0, tr.length()};
  if (which == "critical")
    b = find_critical_block(seq, beta);
  else if (which == "two")
    b = two_critical_block(seq);
  else if (which != "whole")
    throw InvalidParameter("block must be whole, critical or two");
  return tr.slice(b.begin, b.end, inst.k());
}

void report_stats(std::ostream& os, Sequence seq, Part k) {
  const auto occ = occurrence_stats(seq);
  const auto cls = classify_cyclic(seq, k);
  os << "length," << seq.size() << "\ns," << occ.s() << "\ns1," << occ.s1() << "\ns2," << occ.s2()
     << "\nc," << cls.c() << "\na," << cls.a() << "\nsurplus," << surplus(seq, k) << '\n';
}

void report_blocks(std::ostream& os, Sequence seq, Part k, double beta) {
  const auto view = k == 2 ? transition_blocks(seq) : cyclic_blocks(seq, k);
  os << "segment,begin,end,kind\n";
  for (std::size_t i = 0; i < view.segments.size(); ++i) {
    const auto& s = view.segments[i];
    os << i << ',' << s.block.begin + 1 << ',' << s.block.end << ','
       << (s.marked ? (k == 2 ? "transition" : "cyclic") : (k == 2 ? "singleton" : "acyclic")) << '\n';
  }
  auto emit = [&](const char* name, auto find) {
    try {
      const Block b = find();
      os << name << ',' << b.begin + 1 << ',' << b.end << ",s=" << occurrence_stats(subsequence(seq, b)).s()
         << '\n';
    } catch (const NotFound& e) {
      os << name << ",none,," << e.what() << '\n';
    }
  };
  if (k == 2) emit("critical_block", [&] { return find_critical_block(seq, beta); });
  emit("two_critical_block", [&] { return two_critical_block(seq); });
}

void report_cycles(std::ostream& os, Sequence seq, Part k) {
  const auto cs = cycles(seq, k);
  os << "id,v,size,times,parts\n";
  for (std::size_t i = 0; i < cs.cycles.size(); ++i) {
    const auto& c = cs.cycles[i];
    os << i << ',' << c.v << ',' << c.size() << ',';
    for (std::size_t j = 0; j < c.times.size(); ++j) os << (j ? " " : "") << c.times[j] + 1;
    os << ',';
    for (std::size_t j = 0; j < c.parts.size(); ++j) os << (j ? " " : "") << c.parts[j];
    os << '\n';
  }
  if (cs.truncated) os << "# truncated\n";
}

void report_surplus(std::ostream& os, Sequence seq, Part k, std::size_t n, double alpha) {
  os << "surplus," << surplus(seq, k) << '\n';
  os << "max_surplus," << max_surplus(seq, k, seq.size()) << '\n';
  try {
    const auto a = find_alpha_cyclic_block(seq, k, alpha, n);
    os << "alpha_cyclic_block," << a.block.begin + 1 << ',' << a.block.end << ",c=" << a.c
       << ",ratio=" << a.ratio << ",threshold=" << a.threshold << '\n';
  } catch (const NotFound& e) {
    os << "alpha_cyclic_block,none," << e.what() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flipbench: FLIP local search laboratory for smoothed max-k-cut"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a smoothed instance");
  std::size_t g_n = 16;
  Part g_k = 2;
  std::string g_phi = "1", g_graph = "complete", g_out, g_centers, g_tau_out;
  double g_p = 0.5;
  std::uint64_t g_seed = 1;
  gen->add_option("--n", g_n, "vertex count")->check(CLI::Range(2, 1 << 20));
  gen->add_option("--k", g_k, "part count")->check(CLI::Range(2, 64));
  gen->add_option("--phi", g_phi, "max density (rational)");
  gen->add_option("--graph", g_graph, "complete or gnp")->check(CLI::IsMember({"complete", "gnp"}));
  gen->add_option("--p", g_p, "gnp edge probability");
  gen->add_option("--seed", g_seed, "seed");
  gen->add_option("--centers", g_centers, "base instance whose weights become interval centers");
  gen->add_option("--out", g_out, "instance file (default stdout)");
  gen->add_option("--tau0-out", g_tau_out, "also write a random start configuration");

  // run
  auto* run = app.add_subcommand("run", "run FLIP and record a trace");
  std::string r_inst, r_tau0, r_rule = "best", r_out;
  std::optional<Part> r_k;
  std::uint64_t r_seed = 1, r_cap = kDefaultStepCap;
  run->add_option("--instance", r_inst, "instance file")->required();
  run->add_option("--k", r_k, "override the part count of the instance");
  run->add_option("--tau0", r_tau0, "start configuration (default: random from seed)");
  run->add_option("--rule", r_rule, "first, best or random")->check(CLI::IsMember({"first", "best", "random"}));
  run->add_option("--seed", r_seed, "seed for the start and the random rule");
  run->add_option("--cap", r_cap, "step cap");
  run->add_option("--out", r_out, "trace file (default stdout)");

  // replay
  auto* rep = app.add_subcommand("replay", "validate a trace against an instance");
  std::string p_inst, p_trace;
  rep->add_option("--instance", p_inst, "instance file")->required();
  rep->add_option("--trace", p_trace, "trace file")->required();

  // analyze
  auto* ana = app.add_subcommand("analyze", "combinatorial structure of a trace");
  std::string a_trace, a_report = "stats", a_out;
  double a_beta = kDefaultBeta, a_alpha = 0;
  ana->add_option("--trace", a_trace, "trace file")->required();
  ana->add_option("--beta", a_beta, "beta for critical blocks");
  ana->add_option("--alpha", a_alpha, "alpha for the alpha-cyclic block (default k)");
  ana->add_option("--report", a_report, "stats, blocks, cycles, surplus or windows")
      ->check(CLI::IsMember({"stats", "blocks", "cycles", "surplus", "windows"}));
  std::size_t a_window = 0;
  ana->add_option("--window", a_window, "window length for --report windows (default n)");
  ana->add_option("--out", a_out, "report file (default stdout)");

  // matrix
  auto* mat = app.add_subcommand("matrix", "build M or P and its exact rank");
  std::string m_inst, m_trace, m_scheme = "pairs", m_block = "whole", m_out, m_which = "P";
  double m_beta = kDefaultBeta;
  std::string m_eps;
  mat->add_option("--instance", m_inst, "instance file")->required();
  mat->add_option("--trace", m_trace, "trace file")->required();
  mat->add_option("--matrix", m_which, "M or P")->check(CLI::IsMember({"M", "P"}));
  mat->add_option("--scheme", m_scheme, "pairs or cycles")->check(CLI::IsMember({"pairs", "cycles"}));
  mat->add_option("--block", m_block, "whole, critical or two")->check(CLI::IsMember({"whole", "critical", "two"}));
  mat->add_option("--beta", m_beta, "beta for --block critical");
  mat->add_option("--eps", m_eps, "also report the slowness events at this epsilon (rational)");
  mat->add_option("--out", m_out, "matrix dump file");

  // certify
  auto* cer = app.add_subcommand("certify", "build and validate a rank certificate");
  std::string c_inst, c_trace, c_mode = "k2", c_out;
  double c_beta = kDefaultBeta;
  cer->add_option("--instance", c_inst, "instance file")->required();
  cer->add_option("--trace", c_trace, "trace file")->required();
  cer->add_option("--mode", c_mode, "k2, 3cut or half")->check(CLI::IsMember({"k2", "3cut", "half"}));
  cer->add_option("--beta", c_beta, "beta for the k2 critical block");
  cer->add_option("--out", c_out, "certificate file (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a batch experiment and write CSV");
  std::string e_mode, e_config, e_out;
  std::size_t e_threads = 0;
  exp->add_option("--mode", e_mode, "scaling, rank, mc or approx (overrides the config)")
      ->check(CLI::IsMember({"scaling", "rank", "mc", "approx"}));
  exp->add_option("--config", e_config, "config file of key value lines");
  exp->add_option("--out", e_out, "CSV file (overrides the config; default stdout)");
  exp->add_option("--threads", e_threads, "worker threads (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Rational phi = parse_rational(g_phi);
      const GraphKind kind = g_graph == "gnp" ? GraphKind::gnp : GraphKind::complete;
      auto edges = build_graph(kind, g_n, g_p, mix_seed(g_seed, 1));
      SmoothingProfile prof{phi, {}, mix_seed(g_seed, 2)};
      if (!g_centers.empty()) {
        const auto base = load_instance(g_centers);
        if (base.n() != g_n) throw InvalidInput("centers instance has a different n");
        edges.assign(base.edges().begin(), base.edges().end());
        prof.centers = centers_from_instance(base, phi);
      }
      const auto inst = make_instance(g_n, g_k, std::move(edges), prof, kind == GraphKind::complete && g_centers.empty());
      std::ofstream f;
      write_instance(*out_stream(g_out, f), inst);
      if (!g_tau_out.empty()) {
        auto tf = detail::open_output(g_tau_out);
        write_configuration(tf, random_configuration(g_n, g_k, mix_seed(g_seed, 3)));
      }
    } else if (*run) {
      auto inst = load_instance(r_inst);
      if (r_k) inst = inst.with_parts(*r_k);
      Configuration tau0 = r_tau0.empty() ? random_configuration(inst.n(), inst.k(), mix_seed(r_seed, 3))
                                          : [&] {
                                              auto in = detail::open_input(r_tau0);
                                              return read_configuration(in);
                                            }();
      const auto tr = run_flip(inst, tau0, PivotRule{parse_pivot(r_rule), r_seed}, r_cap);
      std::ofstream f;
      write_trace(*out_stream(r_out, f), TraceHeader{hex64(instance_hash(inst)), inst.n(), inst.k(), r_rule, r_seed},
                  tr);
      std::cerr << "steps " << tr.length() << (tr.cap_hit ? " (cap hit)" : "") << ", H "
                << to_string(hamiltonian(inst, tr.tau0)) << " -> "
                << to_string(hamiltonian(inst, tr.final_configuration(inst.k()))) << '\n';
    } else if (*rep) {
      const auto inst = load_instance(p_inst);
      auto tf = load_trace(p_trace);
      try {
        auto checked = load_trace_checked(p_trace, inst.with_parts(tf.header.k ? tf.header.k : inst.k()));
        std::cout << "valid steps " << checked.trace.length() << " non_improving "
                  << checked.trace.non_improving.size() << '\n';
      } catch (const InvalidAtStep& e) {
        std::cout << "invalid at step " << e.step() << ": " << to_string(e.move()) << '\n';
        return 2;
      }
    } else if (*ana) {
      const auto tf = load_trace(a_trace);
      const Part k = tf.header.k ? tf.header.k : 2;
      const auto moves = tf.trace.moves();
      const Sequence seq(moves);
      std::ofstream f;
      auto& os = *out_stream(a_out, f);
      if (a_report == "stats")
        report_stats(os, seq, k);
      else if (a_report == "blocks")
        report_blocks(os, seq, k, a_beta);
      else if (a_report == "cycles")
        report_cycles(os, seq, k);
      else if (a_report == "surplus")
        report_surplus(os, seq, k, tf.header.n ? tf.header.n : tf.trace.tau0.size(), a_alpha > 0 ? a_alpha : k);
      else {
        const std::size_t w = a_window ? a_window : std::max<std::size_t>(1, tf.trace.tau0.size());
        os << "begin,length,total_num,max_step_num,truncated\n";
        for (const auto& r : window_stats(tf.trace, w))
          os << r.begin + 1 << ',' << r.length << ',' << r.total << ',' << r.max_step << ',' << r.truncated << '\n';
      }
    } else if (*mat) {
      auto inst = load_instance(m_inst);
      const auto tf = load_trace(m_trace);
      if (tf.header.k) inst = inst.with_parts(tf.header.k);
      const auto tr = load_trace_checked(m_trace, inst).trace;
      const auto block = load_block(inst, tr, m_block, m_beta);
      const auto scheme = parse_scheme(m_scheme);
      const auto P = m_which == "M" ? build_M(inst, block) : build_P(inst, block, scheme);
      if (!m_out.empty()) {
        auto out = detail::open_output(m_out);
        write_matrix(out, P);
      }
      std::cout << "matrix " << m_which << " rows " << P.rows() << " cols " << P.cols() << " nonzeros "
                << P.nonzeros() << " rank " << exact_rank(P) << '\n';
      if (!m_eps.empty()) {
        const auto rep = slowness_events(P, inst.weights(), inst.denominator(), parse_rational(m_eps),
                                         inst.k());
        std::cout << "all_positive " << rep.all_positive << " sum " << to_string(rep.sum) << " max "
                  << to_string(rep.max) << " e_event " << rep.e_event << " d_event " << rep.d_event << '\n';
      }
    } else if (*cer) {
      auto inst = load_instance(c_inst);
      const auto tf = load_trace(c_trace);
      if (tf.header.k) inst = inst.with_parts(tf.header.k);
      const auto tr = load_trace_checked(c_trace, inst).trace;
      std::ofstream f;
      auto& os = *out_stream(c_out, f);
      CertificateVerdict vd;
      std::size_t rank = 0;
      if (c_mode == "k2") {
        const auto block = load_block(inst, tr, "critical", c_beta);
        const auto P = build_P_pairs(inst, block);
        const auto cert = build_k2_certificate(inst, block, c_beta, &P);
        vd = validate_certificate(inst, P, cert.graph);
        rank = exact_rank(P);
        write_certificate(os, cert.graph,
                          {{"s", std::to_string(cert.s)},
                           {"s2", std::to_string(cert.s2)},
                           {"lemma", std::to_string(cert.lemma_bound)},
                           {"corollary", fmt_double(cert.corollary_bound)},
                           {"target", std::to_string(cert.target)},
                           {"rank", std::to_string(rank)}});
      } else if (c_mode == "3cut") {
        const auto block = load_block(inst, tr, "two", c_beta);
        const auto cert = build_3cut_certificate(inst, block);
        const auto cs = cycles(Sequence(block.moves()), inst.k());
        const auto P = build_P_cycles(inst, block, cs);
        vd = validate_certificate(inst, P, cert.best());
        rank = exact_rank(P);
        write_certificate(os, cert.best(),
                          {{"s", std::to_string(cert.s)},
                           {"c", std::to_string(cert.c)},
                           {"half", std::to_string(cert.half.target)},
                           {"sixth_sum_b_minus_3", to_string(Rational(cert.sum_b_minus_3, 6))},
                           {"target", std::to_string(cert.target)},
                           {"rank", std::to_string(rank)}});
      } else {
        const auto a = analyze_cut(inst, tr);
        const auto cert = build_half_certificate(inst, a);
        vd = validate_certificate(inst, a.P, cert.graph);
        rank = exact_rank(a.P);
        write_certificate(os, cert.graph,
                          {{"c", std::to_string(cert.c)},
                           {"target", std::to_string(cert.target)},
                           {"rank", std::to_string(rank)}});
      }
      std::cerr << (vd.valid ? "certificate valid" : "certificate INVALID: " + vd.reason) << ", arcs " << vd.arcs
                << ", rank " << rank << '\n';
      return vd.valid ? 0 : 3;
    } else if (*exp) {
      ExperimentConfig cfg;
      if (!e_config.empty()) cfg = load_config(e_config);
      if (!e_mode.empty()) cfg.mode = parse_mode(e_mode);
      if (!e_out.empty()) cfg.out = e_out;
      if (e_threads) cfg.threads = e_threads;
      const auto table = run_experiment(cfg);
      std::ofstream f;
      write_csv(*out_stream(cfg.out, f), table);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
