#include <string>

#include <gtest/gtest.h>

#include "mroot/metric_file.hpp"
#include "support/corpus.hpp"

using namespace mroot;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_metric_file(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

const std::string header2 = "n = 2\nm = 2\nbox.1 = -1, 1\nbox.2 = -1, 1\n";

}  // namespace

TEST(MetricFile, Euclid) {
  const auto f = parse_metric_file(header2 + "1 1 : 1\n2 2 : 1\n");
  EXPECT_EQ(f.field.dim(), 2u);
  EXPECT_EQ(f.field.degree(), 2u);
  EXPECT_EQ(f.field.entries().size(), 2u);
  EXPECT_EQ(f.config.seed, 1u);
  EXPECT_FALSE(f.config.tol);
}

TEST(MetricFile, FunkWithReciprocal) {
  const auto f = corpus::load("funk1");
  const auto& e = f.field.entries().begin()->second;
  EXPECT_EQ(e.kind(), Expr::Kind::recip);
  EXPECT_DOUBLE_EQ(e.eval(std::vector{0.0}), 1.0);
  EXPECT_DOUBLE_EQ(f.field.box()[0].lo, -0.9);
}

TEST(MetricFile, HeaderOptionsAndProbes) {
  const auto f = parse_metric_file(
      "# settings\nm = 4\nn = 2\nseed = 42\ntol = 1e-9\nfan = 12\nbases = 3\n"
      "box.2 = -2, 2\nbox.1 = -1, 1   # trailing comment\n"
      "probe = 0, 0 ; 1, 0\nprobe = 0.5, 0 ; 1, 1\n"
      "1 1 1 1 : 1\n2 2 2 2 : 1\n");
  EXPECT_EQ(f.config.seed, 42u);
  EXPECT_DOUBLE_EQ(*f.config.tol, 1e-9);
  EXPECT_EQ(*f.config.fan, 12u);
  EXPECT_EQ(*f.config.bases, 3u);
  ASSERT_EQ(f.config.probes.size(), 2u);
  EXPECT_DOUBLE_EQ(f.config.probes[1].x(0), 0.5);
  EXPECT_DOUBLE_EQ(f.config.probes[1].y(1), 1.0);
  EXPECT_DOUBLE_EQ(f.field.box()[1].hi, 2.0);
}

TEST(MetricFile, IndicesAreSortedAndDuplicatesRejected) {
  const auto f = parse_metric_file(header2 + "2 1 : 0.5\n1 1 : 1\n2 2 : 1\n");
  EXPECT_TRUE(f.field.entries().count(MultiIndex({0, 1})));
  EXPECT_EQ(error_line(header2 + "1 2 : 0.5\n2 1 : 0.5\n"), 6u);
}

TEST(MetricFile, IndexOutOfRange) {
  try {
    parse_metric_file(header2 + "1 1 : 1\n3 3 : 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
    EXPECT_EQ(e.column(), 1u);
  }
}

TEST(MetricFile, ExpressionErrorPointsIntoLine) {
  try {
    parse_metric_file(header2 + "1 1 : sum(1, x3)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_EQ(e.column(), 14u);
  }
}

TEST(MetricFile, Rejections) {
  EXPECT_GT(error_line("n = 2\nm = 2\nbox.1 = -1, 1\n1 1 : 1\n"), 0u);           // missing box.2
  EXPECT_GT(error_line("n = 1\nm = 1\nbox.1 = -1, 1\n1 : 1\n"), 0u);             // m < 2
  EXPECT_GT(error_line("n = 0\nm = 2\n"), 0u);                                   // n < 1
  EXPECT_GT(error_line("m = 2\nbox.1 = -1, 1\n1 1 : 1\n"), 0u);                  // missing n
  EXPECT_EQ(error_line(header2 + "colour = red\n"), 5u);                         // unknown key
  EXPECT_EQ(error_line(header2 + "1 1 1 : 1\n"), 5u);                            // wrong arity
  EXPECT_EQ(error_line(header2 + "box.1 = 1, -1\n"), 5u);                        // empty side
  EXPECT_EQ(error_line(header2 + "just words\n"), 5u);                           // no separator
  EXPECT_EQ(error_line(header2 + "probe = 0, 0, 0 ; 1, 0\n"), 5u);               // probe arity
  EXPECT_EQ(error_line(header2 + "seed = abc\n"), 5u);
  EXPECT_EQ(error_line(header2 + "1 1 : pow(x1, 2.5)\n"), 5u);
}

TEST(MetricFile, CorpusFilesParse) {
  for (const auto& name : corpus::corpus_names()) EXPECT_NO_THROW(corpus::load(name)) << name;
  EXPECT_NO_THROW(corpus::load("funk1_perturbed"));
  EXPECT_NO_THROW(corpus::load("quartic2_degenerate"));
}
