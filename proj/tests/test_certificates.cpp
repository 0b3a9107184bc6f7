#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace fbtest;

namespace {

const double kBeta = 1.0 / std::sqrt(2.0);

Instance complete_unit(std::size_t n, Part k) {
  auto edges = complete_graph(n);
  std::vector<Ticks> w(edges.size(), 1);
  return Instance(n, k, std::move(edges), std::move(w), kDefaultDenominator, Rational(1, 2), true);
}

Trace replay_from_ones(const Instance& inst, const std::vector<Move>& moves) {
  // every vertex starts in the part its first move leaves
  Configuration tau(inst.n(), Part{1});
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) tau[it->v] = it->from;
  return replay(inst, tau, moves);
}

// Critical blocks of real k=2 runs together with their instances.
struct K2Block {
  Instance inst;
  Trace block;
};

std::vector<K2Block> k2_blocks(std::size_t want) {
  std::vector<K2Block> out;
  for (std::uint64_t s = 0; out.size() < want && s < 20 * want; ++s) {
    auto r = engine_run(48, 2, s);
    const auto mv = r.trace.moves();
    try {
      const auto b = find_critical_block(mv, kBeta);
      out.push_back({r.inst, r.trace.slice(b.begin, b.end, 2)});
    } catch (const NotFound&) {
    }
  }
  return out;
}

}  // namespace

TEST(GoodArc, ParityExamples) {
  // a = 0, u = 1
  EXPECT_TRUE(is_good_arc_parity(flips("aba"), 0, 1));
  EXPECT_FALSE(is_good_arc_parity(flips("abba"), 0, 1));
  EXPECT_FALSE(is_good_arc_parity(flips("ab"), 0, 1));
  const auto w = is_good_arc_parity(flips("abba" "cbca"), 0, 1);
  ASSERT_TRUE(w);  // second pair of a contains one b
  EXPECT_EQ(w->t1, 3u);
}

TEST(GoodArc, ParityAgreesWithMatrixOnCompleteGraphs) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = complete_unit(8, 2);
    const auto moves = random_sequence_on(8, 6, 2, 24, s);
    const auto tr = replay(inst, random_configuration(8, 2, s ^ 0x55), moves);
    const auto P = build_P_pairs(inst, tr);
    for (Vertex v = 0; v < 8; ++v)
      for (Vertex u = 0; u < 8; ++u) {
        if (u == v) continue;
        EXPECT_EQ(is_good_arc(inst, P, v, u).has_value(), is_good_arc_parity(moves, v, u).has_value())
            << "v=" << v << " u=" << u << " seed=" << s;
      }
  }
}

TEST(GoodArc, NoEdgeMeansNotGood) {
  const Instance inst(3, 2, {{0, 2}}, {1}, kDefaultDenominator);
  const auto tr = replay(inst, Configuration(std::vector<Part>{1, 1, 1}), flips("aba"));
  const auto P = build_P_pairs(inst, tr);
  EXPECT_FALSE(is_good_arc(inst, P, 0, 1));
}

TEST(SingletonPath, SingleArcOnAba) {
  const auto path = singleton_path(flips("aba"), 0);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0].tail, 0u);
  EXPECT_EQ(path[0].head, 1u);
  EXPECT_EQ(path[0].witness, (PairRef{0, 0, 2}));
}

TEST(SingletonPath, RefusesWithoutSingletonOrRepeat) {
  EXPECT_THROW(singleton_path(flips("abab"), 0), Refused);
  EXPECT_THROW(singleton_path(flips("aba"), 1), Refused);
}

TEST(SingletonPath, EndsAtSingletonThroughGoodArcsOnCriticalBlocks) {
  std::size_t checked = 0;
  for (const auto& kb : k2_blocks(100)) {
    const auto moves = kb.block.moves();
    const Sequence B(moves);
    const auto occ = occurrence_stats(B);
    for (auto v : occ.repeating) {
      const auto path = singleton_path(B, v);
      ASSERT_FALSE(path.empty());
      EXPECT_EQ(path.front().tail, v);
      EXPECT_EQ(occ.count(path.back().head), 1u);
      for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& a = path[i];
        if (i) { EXPECT_EQ(path[i - 1].head, a.tail); }
        EXPECT_EQ(a.witness.v, a.tail);
        std::size_t inside = 0;
        for (auto t = a.witness.t1 + 1; t < a.witness.t2; ++t) inside += B[t].v == a.head;
        EXPECT_EQ(inside, 1u);
      }
      ++checked;
    }
  }
  EXPECT_GE(checked, 100u);
}

TEST(K2Certificate, PropertiesOnCriticalBlocks) {
  const auto blocks = k2_blocks(100);
  ASSERT_GE(blocks.size(), 100u);
  for (const auto& kb : blocks) {
    const auto P = build_P_pairs(kb.inst, kb.block);
    const auto cert = build_k2_certificate(kb.inst, kb.block, kBeta, &P);
    const auto vd = validate_certificate(kb.inst, P, cert.graph);
    EXPECT_TRUE(vd.valid) << vd.reason;
    EXPECT_GE(cert.graph.size(), cert.s2);
    EXPECT_GE(static_cast<std::int64_t>(cert.graph.size()), cert.lemma_bound);
    EXPECT_EQ(cert.bfs_arcs, cert.s2);
    const auto rk = exact_rank(P);
    EXPECT_GE(rk, cert.graph.size());
    EXPECT_GE(rk, cert.target);
    EXPECT_GE(static_cast<double>(cert.graph.size()) + 1e-9, cert.corollary_bound);
    EXPECT_EQ(cert.target, k2_target(cert.s, kBeta));
  }
}

TEST(K2Certificate, TargetArithmetic) {
  // beta/(1+2 beta) at beta = 1/sqrt(2) is about 0.2929
  EXPECT_EQ(k2_target(0, kBeta), 0u);
  EXPECT_EQ(k2_target(1, kBeta), 1u);
  EXPECT_EQ(k2_target(100, kBeta), 30u);
  EXPECT_EQ(k2_target(3, 1.0), 1u);
}

TEST(K2Certificate, RefusesNonCriticalInput) {
  const auto inst = complete_unit(4, 2);
  const auto tr = replay(inst, Configuration(std::vector<Part>{1, 1, 1, 1}), flips("abcd"));
  EXPECT_THROW(build_k2_certificate(inst, tr, kBeta), Refused);
  const auto inst3 = complete_unit(4, 3);
  EXPECT_THROW(build_k2_certificate(inst3, replay(inst3, Configuration(4, 1), {}), kBeta), Refused);
}

TEST(Leaping, CaseOneBackAndForth) {
  // v=0 in three cyclic blocks separated by acyclic movers 1 and 2
  const auto inst = complete_unit(3, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 2}, {0, 2, 1}, {2, 1, 2}, {0, 1, 2}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  const auto lc = leaping_cycle(a, 0, 0, 2, 4);
  EXPECT_EQ(lc.which_case, 1);
  const auto& c = a.cycles.cycles.at(lc.cycle);
  EXPECT_EQ(c.times, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(is_circuit(a.seq(), 0, c.times));
  EXPECT_TRUE(is_leaping(a, c));
  EXPECT_FALSE(is_tricky(a, c));
}

TEST(Leaping, CaseTwoThreeCycle) {
  const auto inst = complete_unit(3, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 3}, {0, 2, 3}, {2, 1, 2}, {0, 3, 1}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  const auto lc = leaping_cycle(a, 0, 0, 2, 4);
  EXPECT_EQ(lc.which_case, 2);
  const auto& c = a.cycles.cycles.at(lc.cycle);
  EXPECT_EQ(c.times, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(distinct_cyclic_blocks(a, c), 3u);
  EXPECT_FALSE(is_tricky(a, c));  // {1} between the first two, {2} between the last two
  const auto w = nontricky_witness(inst, a, lc.cycle);
  ASSERT_TRUE(w);
  EXPECT_TRUE(w->first == 1 || w->first == 2);
  EXPECT_GE(std::abs(w->second), 1);
  EXPECT_LE(std::abs(w->second), 2);
}

TEST(Leaping, TrickyWhenSameAcyclicVertexOnBothSides) {
  // vertex 1 walks 1->2->3 (acyclic) around the middle move of v
  const auto inst = complete_unit(2, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 2}, {0, 2, 3}, {1, 2, 3}, {0, 3, 1}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  ASSERT_TRUE(a.cls.is_acyclic(1));
  const auto lc = leaping_cycle(a, 0, 0, 2, 4);
  EXPECT_TRUE(is_tricky(a, a.cycles.cycles.at(lc.cycle)));
}

TEST(Leaping, RefusesBadOccurrences) {
  const auto inst = complete_unit(3, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 2}, {0, 2, 1}, {2, 1, 2}, {0, 1, 2}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  EXPECT_THROW(leaping_cycle(a, 0, 2, 0, 4), Refused);
  EXPECT_THROW(leaping_cycle(a, 0, 0, 1, 4), Refused);
}

TEST(Neighborwise, FewBlocksGiveNoArcs) {
  const auto inst = complete_unit(3, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 2}, {0, 2, 1}, {2, 1, 2}, {0, 1, 2}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  const auto res = neighborwise_arcs_3cut(inst, a, 0);
  EXPECT_EQ(res.windows, 0u);
  EXPECT_TRUE(res.arcs.empty());
}

TEST(Neighborwise, SevenBlocksGiveAnArcWithTheZeroPattern) {
  const auto inst = complete_unit(7, 3);
  std::vector<Move> mv;
  Part p = 1;
  for (Vertex x = 1; x <= 7; ++x) {
    const Part q = p == 1 ? 2 : 1;
    mv.push_back({0, p, q});
    p = q;
    if (x < 7) mv.push_back({x, 1, 3});
  }
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  ASSERT_EQ(a.cyclic_blocks_of(0).size(), 7u);
  const auto res = neighborwise_arcs_3cut(inst, a, 0);
  EXPECT_EQ(res.windows, 2u);
  EXPECT_EQ(res.required, 1u);
  EXPECT_GE(res.arcs.size(), 1u);
  CertificateGraph g{a.occ.moving, res.arcs};
  const auto vd = validate_certificate(inst, a.P, g);
  EXPECT_TRUE(vd.valid) << vd.reason;
  for (const auto& arc : res.arcs) EXPECT_TRUE(a.cls.is_acyclic(arc.head));
}

TEST(Neighborwise, RefusesAcyclicVertex) {
  const auto inst = complete_unit(3, 3);
  const std::vector<Move> mv{{0, 1, 2}, {1, 1, 2}, {0, 2, 1}};
  const auto a = analyze_cut(inst, replay_from_ones(inst, mv));
  EXPECT_THROW(neighborwise_arcs_3cut(inst, a, 1), Refused);
}

TEST(ThreeCut, CrossingArithmetic) {
  const Rational lam(15, 16);
  const Rational one(1);
  EXPECT_EQ((one - lam) / 2, Rational(1, 32));
  EXPECT_EQ(lam / 18 - (one - lam) / 3, Rational(1, 32));
  for (int i = 0; i <= 1000; ++i) {
    const Rational l(i, 1000);
    EXPECT_GE(std::max((one - l) / 2, l / 18 - (one - l) / 3), Rational(1, 32));
  }
  EXPECT_EQ(ceil_div(33, 32), 2u);
  EXPECT_EQ(ceil_div(32, 32), 1u);
}

TEST(ThreeCut, PropertiesOnTwoCriticalBlocks) {
  std::size_t blocks = 0;
  for (std::uint64_t s = 0; s < 300 && blocks < 20; ++s) {
    const auto r = engine_run(96, 3, s);
    const auto mv = r.trace.moves();
    Block b;
    try {
      b = two_critical_block(mv);
    } catch (const NotFound&) {
      continue;
    }
    ++blocks;
    const auto block = r.trace.slice(b.begin, b.end, 3);
    const auto cert = build_3cut_certificate(r.inst, block);
    const auto a = analyze_cut(r.inst, block);
    const auto v1 = validate_certificate(r.inst, a.P, cert.half.graph);
    const auto v2 = validate_certificate(r.inst, a.P, cert.neighborwise);
    EXPECT_TRUE(v1.valid) << v1.reason;
    EXPECT_TRUE(v2.valid) << v2.reason;
    EXPECT_GE(cert.half.graph.size(), cert.half.target);
    EXPECT_GE(Rational(static_cast<std::int64_t>(cert.neighborwise.size())), Rational(cert.sum_b_minus_3, 6));
    const auto rk = exact_rank(a.P);
    EXPECT_GE(rk, cert.best().size());
    EXPECT_GE(rk, cert.target);
    EXPECT_EQ(cert.c + cert.a, cert.s);
  }
  EXPECT_GT(blocks, 0u);
}

TEST(ThreeCut, RefusesWrongShape) {
  const auto inst = complete_unit(4, 2);
  EXPECT_THROW(build_3cut_certificate(inst, replay(inst, Configuration(4, 1), {})), Refused);
  const auto r = engine_run(12, 3, 1, false);
  EXPECT_THROW(build_3cut_certificate(r.inst, r.trace), Refused);
}

TEST(HalfCertificate, MutualPairLosesOneArc) {
  const Instance inst(2, 2, {{0, 1}}, {1}, kDefaultDenominator);
  const auto tr = replay(inst, Configuration(std::vector<Part>{1, 1}), flips("abab"));
  const auto h = build_half_certificate(inst, tr);
  EXPECT_EQ(h.c, 2u);
  EXPECT_EQ(h.removed, 1u);
  EXPECT_EQ(h.graph.size(), 1u);
  EXPECT_EQ(h.target, 1u);
  const auto a = analyze_cut(inst, tr);
  EXPECT_TRUE(validate_certificate(inst, a.P, h.graph).valid);
}

TEST(HalfCertificate, MeetsHalfOfCyclicOnRandomRuns) {
  for (Part k : {3u, 4u})
    for (std::uint64_t s = 0; s < 15; ++s) {
      const auto r = engine_run(24, k, s, false);
      const auto a = analyze_cut(r.inst, r.trace);
      const auto h = build_half_certificate(r.inst, a);
      const auto vd = validate_certificate(r.inst, a.P, h.graph);
      EXPECT_TRUE(vd.valid) << vd.reason;
      EXPECT_LE(h.graph.size() + h.removed, h.c);  // at most one arc per cyclic vertex
      EXPECT_GE(h.graph.size(), h.target);
      EXPECT_GE(exact_rank(a.P), h.graph.size());
    }
}

TEST(Validator, EmptyGraphIsValid) {
  const auto inst = complete_unit(3, 2);
  const auto vd = validate_certificate(inst, SignMatrix(inst.edge_count(), "pairs"), CertificateGraph{});
  EXPECT_TRUE(vd.valid);
  EXPECT_EQ(vd.row_rank, 0u);
}

TEST(Validator, FabricatedArcIsNamed) {
  // a's pair contains b twice: {a, b} entry is zero
  const auto inst = complete_unit(3, 2);
  const auto tr = replay(inst, Configuration(std::vector<Part>{1, 1, 1}), flips("abbca"));
  const auto P = build_P_pairs(inst, tr);
  std::size_t col = 0;
  while (P.info(col).v != 0) ++col;
  const auto bad = validate_certificate(inst, P, CertificateGraph{{0, 1, 2}, {{0, 1, col}}});
  EXPECT_FALSE(bad.valid);
  EXPECT_NE(bad.reason.find("0->1"), std::string::npos);
  const auto good = validate_certificate(inst, P, CertificateGraph{{0, 1, 2}, {{0, 2, col}}});
  EXPECT_TRUE(good.valid) << good.reason;
}

TEST(Validator, RejectsCyclesAndMissingColumns) {
  const Instance inst(2, 2, {{0, 1}}, {1}, kDefaultDenominator);
  const auto tr = replay(inst, Configuration(std::vector<Part>{1, 1}), flips("abab"));
  const auto a = analyze_cut(inst, tr);
  std::size_t c0 = 0, c1 = 0;
  for (std::size_t c = 0; c < a.P.cols(); ++c) (a.P.info(c).v == 0 ? c0 : c1) = c;
  const auto both = validate_certificate(inst, a.P, CertificateGraph{{0, 1}, {{0, 1, c0}, {1, 0, c1}}});
  EXPECT_FALSE(both.valid);
  const auto missing = validate_certificate(inst, a.P, CertificateGraph{{0, 1}, {{0, 1, 99}}});
  EXPECT_FALSE(missing.valid);
  const auto wrong_tail = validate_certificate(inst, a.P, CertificateGraph{{0, 1}, {{0, 1, c1}}});
  EXPECT_FALSE(wrong_tail.valid);
}

TEST(CertificateDump, Format) {
  CertificateGraph g{{0, 1, 2}, {{0, 2, 1}, {1, 2, 0}}};
  std::stringstream ss;
  write_certificate(ss, g, {{"target", "1"}});
  EXPECT_EQ(ss.str(), "# flipbench certificate\nbound target 1\narcs 2\n0 2 1\n1 2 0\n");
}
