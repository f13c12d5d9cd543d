#include <doctest.h>

#include <algorithm>
#include <random>

#include "chats/critic.hpp"
#include "synthetic.hpp"

using namespace chats;

TEST_CASE("F(S) equals the kept fraction") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 30), grid(0, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> scores(static_cast<std::size_t>(len(rng)));
    // Scores on a 1/8 grid hit the threshold exactly now and then.
    for (auto& s : scores) s = trial % 2 ? grid(rng) / 8.0 : u(rng);
    const double t = trial % 3 ? 0.75 : u(rng);
    std::size_t above = 0;
    for (double s : scores) above += s > t;
    CHECK(summary_faithfulness(scores, t) == static_cast<double>(above) / static_cast<double>(scores.size()));
  }
  CHECK(summary_faithfulness({}, 0.75) == 0.0);
}

TEST_CASE("boundary f == T drops the sentence") {
  CHECK(summary_faithfulness({0.75}, 0.75) == 0.0);
  CHECK(summary_faithfulness({0.875, 0.75}, 0.75) == 0.5);
  const auto s = make_scored_summary(segment("A is 1. B is 2."), {0.75, 0.875}, 0.75);
  CHECK(s.kept_mask == std::vector<bool>{false, true});
  CHECK(s.kept_count() == 1);
  CHECK(s.mean_score() == doctest::Approx(0.8125));
}

TEST_CASE("F is permutation invariant and monotone in T") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(12);
    for (auto& s : scores) s = u(rng);
    const double f = summary_faithfulness(scores, 0.5);
    std::shuffle(scores.begin(), scores.end(), rng);
    CHECK(summary_faithfulness(scores, 0.5) == f);
    double prev = 1.0;
    for (double t = 0.05; t < 1.0; t += 0.05) {
      const double g = summary_faithfulness(scores, t);
      CHECK(g <= prev);
      prev = g;
    }
  }
}

TEST_CASE("empty summary") {
  const auto s = make_scored_summary(segment(""), {}, 0.75);
  CHECK(s.empty_summary);
  CHECK(s.faithfulness == 0.0);
  CHECK(s.mean_score() == 0.0);
  const auto r = repair(s);
  CHECK(r.summary.empty());
  CHECK(r.faithfulness_post == 0.0);
}

TEST_CASE("repair keeps accepted sentences in order") {
  const auto s = make_scored_summary(segment("A is 1. B is 2. C is 3."), {1.0, 0.5, 0.875}, 0.75);
  const auto r = repair(s);
  CHECK(r.summary.text == "A is 1. C is 3.");
  REQUIRE(r.dropped.size() == 1);
  CHECK(r.dropped[0].index == 1);
  CHECK(r.dropped[0].score == 0.5);
  CHECK(r.dropped[0].text == "B is 2.");
  CHECK(r.faithfulness_post == 1.0);
  const auto none = repair(make_scored_summary(segment("A is 1."), {0.0}, 0.75));
  CHECK(none.summary.empty());
  CHECK(none.faithfulness_post == 0.0);
}

TEST_CASE("score_summary with the oracle and mixed truth") {
  std::mt19937_64 rng(8);
  const auto t = testing::random_table(rng);
  std::vector<testing::SyntheticClaim> claims = {testing::random_claim(rng, t, true),
                                                 testing::random_claim(rng, t, false),
                                                 testing::random_claim(rng, t, true)};
  OracleBackend oracle;
  CriticConfig config;
  config.jobs = 3;
  const auto s = score_summary(testing::join_claims(claims), t.table, t.table.title, oracle, config);
  REQUIRE(s.summary.size() == 3);
  CHECK(s.sentence_scores == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(s.faithfulness == doctest::Approx(2.0 / 3.0));
  const auto r = repair(s);
  const auto again = score_summary(r.summary.text, t.table, t.table.title, oracle, config);
  CHECK(again.faithfulness == 1.0);
}
