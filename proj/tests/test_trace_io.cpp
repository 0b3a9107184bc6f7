#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flipbench/generator.hpp"
#include "flipbench/trace_io.hpp"

using namespace flipbench;

namespace {

struct Fixture {
  Instance inst = random_complete_instance(16, 3, Rational(1), 12);
  Trace tr = run_flip(inst, random_configuration(16, 3, 1), PivotRule{PivotKind::best_improving, 0},
                      kDefaultStepCap);
  TraceHeader header() const { return {hex64(instance_hash(inst)), 16, 3, "best", 0}; }
};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("flipbench_" + name)).string();
}

}  // namespace

TEST(TraceIo, RoundTripPreservesEverything) {
  Fixture f;
  std::stringstream ss;
  write_trace(ss, f.header(), f.tr);
  const auto back = read_trace(ss);
  EXPECT_EQ(back.header.instance_hash, f.header().instance_hash);
  EXPECT_EQ(back.header.n, 16u);
  EXPECT_EQ(back.header.k, 3u);
  EXPECT_EQ(back.header.rule, "best");
  EXPECT_EQ(back.trace.tau0, f.tr.tau0);
  ASSERT_EQ(back.trace.length(), f.tr.length());
  for (std::size_t t = 0; t < f.tr.length(); ++t) {
    EXPECT_EQ(back.trace.steps[t].move, f.tr.steps[t].move);
    EXPECT_EQ(back.trace.steps[t].delta, f.tr.steps[t].delta);
  }
  EXPECT_EQ(trace_hash(back.trace), trace_hash(f.tr));
}

TEST(TraceIo, StepLinesAreOneBased) {
  Fixture f;
  std::stringstream ss;
  write_trace(ss, f.header(), f.tr);
  const std::string text = ss.str();
  const auto& s0 = f.tr.steps.at(0);
  const std::string first = "\n1 " + std::to_string(s0.move.v) + " " + std::to_string(s0.move.from) + " " +
                            std::to_string(s0.move.to) + " " + std::to_string(s0.delta) + "\n";
  EXPECT_NE(text.find(first), std::string::npos);
}

TEST(TraceIo, CheckedLoadReplaysAgainstInstance) {
  Fixture f;
  const auto path = temp_path("checked.trace");
  save_trace(path, f.header(), f.tr);
  const auto tf = load_trace_checked(path, f.inst);
  EXPECT_EQ(tf.trace.length(), f.tr.length());
  // a different instance is rejected by hash
  const auto other = random_complete_instance(16, 3, Rational(1), 13);
  EXPECT_THROW(load_trace_checked(path, other), InvalidInput);
  std::remove(path.c_str());
}

TEST(TraceIo, TamperedDeltaIsRejected) {
  Fixture f;
  auto bad = f.tr;
  bad.steps.at(0).delta += 1;
  auto h = f.header();
  h.instance_hash.clear();  // skip the hash check to reach the delta check
  const auto path = temp_path("tampered.trace");
  save_trace(path, h, bad);
  EXPECT_THROW(load_trace_checked(path, f.inst), InvalidInput);
  std::remove(path.c_str());
}

TEST(TraceIo, InvalidMoveSurfacesStepIndex) {
  Fixture f;
  auto bad = f.tr;
  bad.steps.at(1).move.from = bad.steps.at(1).move.to;  // from == to
  auto h = f.header();
  h.instance_hash.clear();
  const auto path = temp_path("invalid.trace");
  save_trace(path, h, bad);
  try {
    load_trace_checked(path, f.inst);
    FAIL() << "expected InvalidAtStep";
  } catch (const InvalidAtStep& e) {
    EXPECT_EQ(e.step(), 2u);
  }
  std::remove(path.c_str());
}

TEST(TraceIo, ParseErrorsCarryLineNumbers) {
  std::stringstream bad1("# flipbench trace\nn 2\nk 2\ntau0 1 2\nsteps 1\n1 0 1 x 5\n");
  try {
    read_trace(bad1);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
  std::stringstream bad2("tau0 1 2\nsteps 2\n1 0 1 2 5\n3 1 1 2 5\n");
  EXPECT_THROW(read_trace(bad2), ParseError);
  std::stringstream bad3("tau0 1 2\nsteps 2\n1 0 1 2 5\n");
  EXPECT_THROW(read_trace(bad3), ParseError);
  std::stringstream bad4("wat 3\n");
  EXPECT_THROW(read_trace(bad4), ParseError);
  std::stringstream bad5("steps 0\n");
  EXPECT_THROW(read_trace(bad5), ParseError);
}

TEST(TraceIo, EmptyTraceRoundTrips) {
  Trace tr;
  tr.tau0 = Configuration(std::vector<Part>{1, 2, 1});
  std::stringstream ss;
  write_trace(ss, TraceHeader{}, tr);
  const auto back = read_trace(ss);
  EXPECT_EQ(back.trace.length(), 0u);
  EXPECT_EQ(back.trace.tau0, tr.tau0);
}
