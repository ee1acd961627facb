#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "entail/metrics.hpp"
#include "oracles.hpp"

using namespace entail;
using namespace entail::metrics;
using L = FactifyLabel;

TEST(Confusion, Examples) {
  const std::vector<L> rr = {L::Refute, L::Refute};
  const auto cm = confusion(rr, rr);
  EXPECT_EQ(cm.at(L::Refute, L::Refute), 2u);
  EXPECT_EQ(cm.total(), 2u);

  const std::vector<L> g = {L::SupportText}, p = {L::SupportMultimodal};
  const auto off = confusion(g, p);
  EXPECT_EQ(off.at(L::SupportText, L::SupportMultimodal), 1u);
  EXPECT_EQ(off.total(), 1u);
}

TEST(Confusion, Errors) {
  const std::vector<L> one = {L::Refute}, two = {L::Refute, L::Refute}, none;
  EXPECT_THROW(confusion(one, two), Error);
  EXPECT_THROW(confusion(none, none), Error);
  EXPECT_THROW(report(ConfusionMatrix{}), Error);
}

TEST(Confusion, MatchesTallyAndIsPermutationInvariant) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gold = oracle::random_labels(200, rng);
    const auto pred = oracle::random_labels(200, rng);
    const auto cm = confusion(gold, pred);
    const auto t = oracle::tally(gold, pred);
    for (std::size_t g = 0; g < 5; ++g)
      for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(cm.counts[g][p], t.cells[g][p]);

    std::uint64_t rows = 0, cols = 0;
    for (std::size_t c = 0; c < 5; ++c) {
      rows += cm.row_sum(c);
      cols += cm.column_sum(c);
    }
    EXPECT_EQ(rows, 200u);
    EXPECT_EQ(cols, 200u);

    std::vector<std::size_t> perm(200);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<L> g2, p2;
    for (auto i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    EXPECT_EQ(confusion(g2, p2), cm);
  }
}

TEST(Report, HandCase) {
  // A: p = 1, r = 1/2, f1 = 2/3; B: p = 1/2, r = 1, f1 = 2/3.
  const std::vector<L> gold = {L::SupportText, L::SupportText, L::Refute};
  const std::vector<L> pred = {L::SupportText, L::Refute, L::Refute};
  const auto r = report(confusion(gold, pred));
  EXPECT_NEAR(r.weighted_f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.weighted_f1, oracle::tally(gold, pred).weighted_f1, 1e-12);
  EXPECT_EQ(r.per_class[index(L::SupportMultimodal)].support, 0u);
  EXPECT_EQ(r.per_class[index(L::SupportMultimodal)].f1, 0.0);
}

TEST(Report, PerfectDiagonal) {
  std::vector<L> labels;
  for (auto l : kAllLabels) labels.insert(labels.end(), 3, l);
  EXPECT_EQ(report(confusion(labels, labels)).weighted_f1, 1.0);
}

TEST(Report, WeightedF1OneOnlyOnDiagonal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gold = oracle::random_labels(30, rng);
    auto pred = gold;
    const bool perturb = trial % 2 == 1;
    if (perturb) pred[trial % 30] = static_cast<L>((index(pred[trial % 30]) + 1) % 5);
    const auto r = report(confusion(gold, pred));
    EXPECT_GE(r.weighted_f1, 0.0);
    EXPECT_LE(r.weighted_f1, 1.0);
    EXPECT_EQ(r.weighted_f1 == 1.0, !perturb);
  }
}

TEST(Report, MatchesBruteForceTally) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + static_cast<std::size_t>(rng() % 300);
    const auto gold = oracle::random_labels(n, rng);
    const auto pred = oracle::random_labels(n, rng);
    const auto r = report(confusion(gold, pred));
    const auto t = oracle::tally(gold, pred);
    EXPECT_NEAR(r.weighted_f1, t.weighted_f1, 1e-9);
    for (std::size_t c = 0; c < 5; ++c) {
      EXPECT_NEAR(r.per_class[c].precision, t.precision[c], 1e-9);
      EXPECT_NEAR(r.per_class[c].recall, t.recall[c], 1e-9);
      EXPECT_NEAR(r.per_class[c].f1, t.f1[c], 1e-9);
      EXPECT_EQ(r.per_class[c].support, t.support[c]);
    }
  }
}

TEST(Serialization, CsvLayout) {
  const std::vector<L> gold = {L::Refute, L::SupportText};
  const std::vector<L> pred = {L::Refute, L::SupportMultimodal};
  const auto csv = to_csv(confusion(gold, pred));
  EXPECT_EQ(csv,
            "gold\\pred,Support_Multimodal,Support_Text,Insufficient_Multimodal,Insufficient_Text,Refute\n"
            "Support_Multimodal,0,0,0,0,0\n"
            "Support_Text,1,0,0,0,0\n"
            "Insufficient_Multimodal,0,0,0,0,0\n"
            "Insufficient_Text,0,0,0,0,0\n"
            "Refute,0,0,0,0,1\n");
}

TEST(Serialization, JsonReportCarriesCounts) {
  const std::vector<L> gold = {L::Refute, L::SupportText};
  const std::vector<L> pred = {L::Refute, L::SupportMultimodal};
  const auto j = to_json(report(confusion(gold, pred)));
  EXPECT_EQ(j["per_class"]["Refute"]["support"], 1);
  EXPECT_EQ(j["per_class"]["Refute"]["f1"], 1.0);
  EXPECT_EQ(j["confusion"]["Support_Text"]["Support_Multimodal"], 1);
  EXPECT_EQ(j["total"], 2);
  EXPECT_NEAR(j["weighted_f1"].get<double>(), 0.5, 1e-15);
}
