#include <gtest/gtest.h>

#include <sstream>

#include "flipbench/core.hpp"
#include "flipbench/generator.hpp"
#include "flipbench/instance_io.hpp"

using namespace flipbench;

namespace {

constexpr Ticks D = kDefaultDenominator;

// K3 on {a,b,c} = {0,1,2}, edges ab, ac, bc with X = 1/2, -1/4, 1/8
Instance triangle(Part k) {
  return Instance(3, k, {{0, 1}, {0, 2}, {1, 2}}, {D / 2, -D / 4, D / 8}, D, Rational(1, 2), true);
}

// Direct evaluation of -(k-1)/k sum X <sigma, sigma> with the Gram matrix
// written out, independent of the crossing-edge form and of SimplexFrame.
Rational h_oracle(const Instance& inst, const Configuration& tau) {
  const auto k = static_cast<std::int64_t>(inst.k());
  Rational sum = 0;
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    const auto& ed = inst.edge(e);
    const Rational g = tau[ed.u] == tau[ed.v] ? Rational(1) : Rational(-1, k - 1);
    sum += inst.weight_value(e) * g;
  }
  return -Rational(k - 1, k) * sum;
}

}  // namespace

TEST(Simplex, K3MatchesWrittenVectors) {
  const auto f = simplex_vectors(3);
  // any frame with the Gram matrix of (-2,1,1)/sqrt6, (1,-2,1)/sqrt6, (1,1,-2)/sqrt6
  const std::int64_t paper[3][3] = {{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}};
  for (Part i = 1; i <= 3; ++i)
    for (Part j = 1; j <= 3; ++j) {
      std::int64_t dot = 0;
      for (int d = 0; d < 3; ++d) dot += paper[i - 1][d] * paper[j - 1][d];
      EXPECT_EQ(f.inner(i, j), Rational(dot, 6)) << i << "," << j;
    }
}

TEST(Simplex, K2IsPlusMinusOne) {
  const auto f = simplex_vectors(2);
  EXPECT_EQ(f.dimension(), 1u);
  EXPECT_EQ(f.coords(1)[0], 1);
  EXPECT_EQ(f.coords(2)[0], -1);
  EXPECT_EQ(f.norm2(), 1);
}

TEST(Simplex, GramPropertyForAllSmallK) {
  for (Part k = 2; k <= 8; ++k) {
    const auto f = simplex_vectors(k);
    for (Part i = 1; i <= k; ++i)
      for (Part j = 1; j <= k; ++j)
        EXPECT_EQ(f.inner(i, j), i == j ? Rational(1) : Rational(-1, static_cast<std::int64_t>(k) - 1))
            << "k=" << k;
  }
}

TEST(Simplex, RejectsKBelowTwo) {
  EXPECT_THROW(simplex_vectors(1), InvalidParameter);
  EXPECT_THROW(simplex_vectors(0), InvalidParameter);
}

TEST(Hamiltonian, TriangleAllInOnePart) {
  const auto inst = triangle(2);
  EXPECT_EQ(hamiltonian(inst, Configuration(3, 1)), Rational(-3, 16));
}

TEST(Hamiltonian, TriangleOneVertexFlipped) {
  const auto inst = triangle(2);
  const Configuration tau({2, 1, 1});  // (-1, +1, +1)
  EXPECT_EQ(hamiltonian(inst, tau), Rational(1, 16));
  EXPECT_EQ(h_oracle(inst, tau), Rational(1, 16));
}

TEST(Hamiltonian, K2IsCutMinusHalfTotal) {
  const auto inst = random_complete_instance(9, 2, Rational(1), 5);
  const Rational half_total = Rational(inst.total_weight(), 2 * D);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto tau = random_configuration(9, 2, s);
    EXPECT_EQ(hamiltonian(inst, tau), cut_value(inst, tau) - half_total);
  }
}

TEST(Hamiltonian, AgreesWithSimplexFormAndOracle) {
  for (Part k = 2; k <= 5; ++k) {
    const auto inst = random_complete_instance(7, k, Rational(3, 2), 11 + k);
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto tau = random_configuration(7, k, s);
      const auto h = hamiltonian(inst, tau);
      EXPECT_EQ(h, hamiltonian_simplex(inst, tau));
      EXPECT_EQ(h, h_oracle(inst, tau));
      // denominator divides k*D
      EXPECT_EQ((Rational(static_cast<std::int64_t>(k) * D) * h).denominator(), 1);
    }
  }
}

TEST(Hamiltonian, RejectsMismatchedConfiguration) {
  const auto inst = triangle(2);
  EXPECT_THROW(hamiltonian(inst, Configuration(2, 1)), InvalidInput);
  EXPECT_THROW(hamiltonian(inst, Configuration(std::vector<Part>{1, 3, 1})), InvalidInput);
}

TEST(CutValue, AllInOnePartIsZero) {
  EXPECT_EQ(cut_value(triangle(3), Configuration(3, 2)), Rational(0));
}

TEST(CutValue, TriangleAllDistinctParts) {
  EXPECT_EQ(cut_value(triangle(3), Configuration(std::vector<Part>{1, 2, 3})), Rational(3, 8));
}

TEST(CutValue, DifferenceToHamiltonianIsConstant) {
  for (Part k : {2u, 3u, 4u}) {
    const auto inst = random_complete_instance(10, k, Rational(1), 99 + k);
    const Rational c0 = cut_value(inst, random_configuration(10, k, 0)) -
                        hamiltonian(inst, random_configuration(10, k, 0));
    for (std::uint64_t s = 1; s <= 100; ++s) {
      const auto tau = random_configuration(10, k, s);
      EXPECT_EQ(cut_value(inst, tau) - hamiltonian(inst, tau), c0);
    }
  }
}

TEST(MoveDelta, TriangleFlipOfA) {
  const auto inst = triangle(2);
  const Configuration tau(3, 1);
  const Move m{0, 1, 2};
  EXPECT_EQ(move_delta(inst, tau, m), Rational(1, 4));
  EXPECT_EQ(move_delta(inst, tau, m), hamiltonian(inst, apply_move(tau, m, 2)) - hamiltonian(inst, tau));
}

TEST(MoveDelta, IsolatedVertexIsZero) {
  const Instance inst(4, 3, {{0, 1}, {1, 2}}, {D / 3, -D / 5}, D);
  const Configuration tau({1, 2, 3, 1});
  EXPECT_EQ(move_delta(inst, tau, {3, 1, 2}), Rational(0));
  EXPECT_EQ(move_delta(inst, tau, {3, 1, 3}), Rational(0));
}

TEST(MoveDelta, MoveAndReverseCancel) {
  const auto inst = random_complete_instance(8, 3, Rational(1), 3);
  const auto tau = random_configuration(8, 3, 4);
  for (Vertex v = 0; v < 8; ++v)
    for (Part q = 1; q <= 3; ++q) {
      if (q == tau[v]) continue;
      const Move m{v, tau[v], q};
      const auto t1 = apply_move(tau, m, 3);
      EXPECT_EQ(move_delta(inst, tau, m) + move_delta(inst, t1, reverse(m)), Rational(0));
    }
}

TEST(MoveDelta, SignConventionDepartedPlusDestinationMinus) {
  // path 0-1-2 with vertex 1 moving from part 1 to part 2; 0 in part 1, 2 in part 2
  const Instance inst(3, 3, {{0, 1}, {1, 2}}, {D / 2, D / 8}, D);
  const Configuration tau({1, 1, 2});
  EXPECT_EQ(move_delta(inst, tau, {1, 1, 2}), Rational(1, 2) - Rational(1, 8));
}

TEST(MoveDelta, K2PlusMinusOneForm) {
  const auto inst = random_complete_instance(9, 2, Rational(1), 21);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto tau = random_configuration(9, 2, s);
    for (Vertex v = 0; v < 9; ++v) {
      Rational expect = 0;
      for (const auto& [u, e] : inst.neighbors(v))
        expect += inst.weight_value(e) * (tau.sign(u) * tau.sign(v));
      EXPECT_EQ(move_delta(inst, tau, {v, tau[v], tau[v] == 1 ? 2u : 1u}), expect);
    }
  }
}

TEST(MoveDelta, InvalidMoveNamesVertexAndParts) {
  const auto inst = triangle(3);
  const Configuration tau({1, 2, 3});
  try {
    move_delta(inst, tau, {0, 2, 3});
    FAIL() << "expected InvalidMove";
  } catch (const InvalidMove& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find('0'), std::string::npos);
    EXPECT_NE(w.find('2'), std::string::npos);
    EXPECT_NE(w.find('3'), std::string::npos);
  }
  EXPECT_THROW(move_delta(inst, tau, {0, 1, 1}), InvalidMove);
  EXPECT_THROW(move_delta(inst, tau, {0, 1, 4}), InvalidMove);
}

TEST(MoveDelta, ExactIdentityOnRandomTriples) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    SplitMix64 rng(s);
    const Part k = static_cast<Part>(rng.uniform_int(2, 4));
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 20));
    const auto inst = random_complete_instance(n, k, Rational(1), s);
    const auto tau = random_configuration(n, k, s + 1);
    const Vertex v = static_cast<Vertex>(rng.uniform_int(0, n - 1));
    Part q = static_cast<Part>(rng.uniform_int(1, k - 1));
    if (q >= tau[v]) ++q;
    const Move m{v, tau[v], q};
    EXPECT_EQ(move_delta(inst, tau, m), h_oracle(inst, apply_move(tau, m, k)) - h_oracle(inst, tau));
  }
}

TEST(ApplyMove, ChangesOnlyTheMovedVertex) {
  const Configuration tau({1, 2, 3});
  EXPECT_EQ(apply_move(tau, {0, 1, 3}, 3), Configuration(std::vector<Part>{3, 2, 3}));
}

TEST(ApplyMove, ReverseRestores) {
  const Configuration tau({1, 2, 3});
  const Move m{1, 2, 1};
  EXPECT_EQ(apply_move(apply_move(tau, m, 3), reverse(m), 3), tau);
}

TEST(ApplyMove, RejectsWrongSourcePart) {
  EXPECT_THROW(apply_move(Configuration(std::vector<Part>{1, 2, 3}), {0, 2, 3}, 3), InvalidMove);
}

TEST(ImprovingMoves, EmptyAtLocalOptimum) {
  // single positive edge with endpoints already separated
  const Instance inst(2, 2, {{0, 1}}, {D}, D);
  EXPECT_TRUE(improving_moves(inst, Configuration(std::vector<Part>{1, 2})).empty());
  EXPECT_TRUE(is_local_optimum(inst, Configuration(std::vector<Part>{1, 2})));
}

TEST(ImprovingMoves, K2BothFlipsImprove) {
  const Instance inst(2, 2, {{0, 1}}, {D}, D);
  const auto mv = improving_moves(inst, Configuration(2, 1));
  ASSERT_EQ(mv.size(), 2u);
  EXPECT_EQ(mv[0].move.v, 0u);
  EXPECT_EQ(mv[1].move.v, 1u);
  EXPECT_EQ(mv[0].delta, D);
  EXPECT_EQ(mv[1].delta, D);
}

TEST(ImprovingMoves, MatchesBruteForceScan) {
  for (Part k : {2u, 3u, 4u})
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto inst = make_instance(12, k, gnp_graph(12, 0.4, s), SmoothingProfile{Rational(1), {}, s}, false);
      const auto tau = random_configuration(12, k, s + 7);
      std::vector<std::pair<Move, Rational>> brute;
      for (Vertex v = 0; v < 12; ++v)
        for (Part q = 1; q <= k; ++q) {
          if (q == tau[v]) continue;
          const Move m{v, tau[v], q};
          const auto d = hamiltonian(inst, apply_move(tau, m, k)) - hamiltonian(inst, tau);
          if (d > 0) brute.emplace_back(m, d);
        }
      const auto fast = improving_moves(inst, tau);
      ASSERT_EQ(fast.size(), brute.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        EXPECT_EQ(fast[i].move, brute[i].first);
        EXPECT_EQ(Rational(fast[i].delta, D), brute[i].second);
      }
    }
}

TEST(Instance, RejectsMalformedInput) {
  EXPECT_THROW(Instance(3, 2, {{0, 0}}, {1}, D), InvalidInput);
  EXPECT_THROW(Instance(3, 2, {{0, 1}, {1, 0}}, {1, 1}, D), InvalidInput);
  EXPECT_THROW(Instance(3, 2, {{0, 1}}, {D + 1}, D), InvalidInput);
  EXPECT_THROW(Instance(3, 2, {{0, 1}}, {1}, D, Rational(1, 2), true), InvalidInput);
  EXPECT_THROW(Instance(3, 1, {}, {}, D), InvalidParameter);
  EXPECT_THROW(Instance(3, 2, {}, {}, 3), InvalidParameter);
}

TEST(InstanceIo, RoundTrip) {
  const auto inst = random_complete_instance(6, 3, Rational(5, 2), 8);
  std::stringstream ss;
  write_instance(ss, inst);
  const auto back = read_instance(ss);
  EXPECT_EQ(back.n(), inst.n());
  EXPECT_EQ(back.k(), inst.k());
  EXPECT_EQ(back.phi(), inst.phi());
  EXPECT_EQ(back.complete(), inst.complete());
  EXPECT_EQ(instance_hash(back), instance_hash(inst));
  for (EdgeId e = 0; e < inst.edge_count(); ++e) EXPECT_EQ(back.weight(e), inst.weight(e));
}

TEST(InstanceIo, ParseErrorCarriesLine) {
  std::stringstream ss("3 2 1048576 1/2 0\n0 1 5\n0 x 3\n");
  try {
    read_instance(ss);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(InstanceIo, ConfigurationRoundTrip) {
  const Configuration tau({1, 3, 2, 2});
  std::stringstream ss;
  write_configuration(ss, tau);
  EXPECT_EQ(read_configuration(ss), tau);
}
