#include <doctest.h>

#include "chats/errors.hpp"
#include "chats/pipeline.hpp"
#include "mock_endpoint.hpp"
#include "synthetic.hpp"

using namespace chats;

namespace {

FunctionClient fixture_generator(std::vector<std::string> fixtures, std::int64_t base) {
  return FunctionClient([fixtures, base](const CompletionRequest& r) {
    const auto n = static_cast<std::int64_t>(fixtures.size());
    return Completion{fixtures[static_cast<std::size_t>(((r.sample_seed - base) % n + n) % n)], false, false};
  });
}

const Table& table() {
  static const Table t = parse_linearized("service | urban | rural\nwater | 95 | 62\nsanitation | 88 | 41").table;
  return t;
}

}  // namespace

TEST_CASE("stage mask parsing") {
  CHECK(StageMask::parse("all") == StageMask::all());
  CHECK(StageMask::parse("S1,S2").bits == 3u);
  CHECK(StageMask::parse("S3").bits == 5u);  // S1 is forced
  CHECK(StageMask::parse("1234").to_string() == "S1,S2,S3,S4");
  CHECK(StageMask::only_generate().to_string() == "S1");
  CHECK_THROWS(StageMask::parse("S5"));
}

TEST_CASE("generator candidates equal the fixtures in order") {
  const std::vector<std::string> fixtures = {"Urban water access is 95.", "Rural water access is 62.",
                                             "Urban sanitation access is 88."};
  auto gen = fixture_generator(fixtures, 40);
  PipelineConfig config;
  config.num_candidates = 3;
  config.seed = 40;
  const auto got = generate_candidates(table(), "", gen, config);
  REQUIRE(got.candidates.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(got.candidates[i].text == fixtures[i]);
    CHECK(got.candidates[i].sample_seed == 40 + static_cast<std::int64_t>(i));
  }
}

TEST_CASE("ranking picks the most faithful candidate and repairs it") {
  const std::vector<std::string> fixtures = {
      "Urban water access is 95. Rural water access is 70.",
      "Urban water access is 95. Rural water access is 62.",
      "Urban water access is 91."};
  auto gen = fixture_generator(fixtures, 0);
  OracleBackend oracle;
  PipelineConfig config;
  config.num_candidates = 3;
  const auto r = run_pipeline(table(), "", gen, oracle, config);
  CHECK(r.winner == 1);
  CHECK(r.ranking.front() == 1);
  CHECK(r.final_summary.text == fixtures[1]);
  CHECK(r.final_repaired);

  config.stages = StageMask::parse("S1,S2");
  const auto no_rank = run_pipeline(table(), "", gen, oracle, config);
  CHECK(no_rank.winner == 0);
  CHECK(no_rank.final_summary.text == fixtures[0]);

  config.stages = StageMask::all();
  config.stages.set(Stage::rank, false);
  const auto s4_only = run_pipeline(table(), "", gen, oracle, config);
  CHECK(s4_only.winner == 0);
  CHECK(s4_only.final_summary.text == "Urban water access is 95.");
}

TEST_CASE("ties break on mean score, kept count, then index") {
  ScoredSummary a = make_scored_summary(segment("A. B."), {1.0, 0.5}, 0.75);
  ScoredSummary b = make_scored_summary(segment("A. B."), {1.0, 0.25}, 0.75);
  CHECK(ranks_before(ranking_key(a, 1), ranking_key(b, 0)));
  ScoredSummary c = make_scored_summary(segment("A. B."), {1.0, 0.5}, 0.75);
  CHECK(ranks_before(ranking_key(a, 0), ranking_key(c, 1)));
  CHECK_FALSE(ranks_before(ranking_key(c, 1), ranking_key(a, 0)));
  ScoredSummary two = make_scored_summary(segment("A. B."), {1.0, 1.0}, 0.75);
  ScoredSummary one = make_scored_summary(segment("A."), {1.0}, 0.75);
  CHECK(ranks_before(ranking_key(two, 1), ranking_key(one, 0)));
}

TEST_CASE("single candidate and degenerate input") {
  auto gen = fixture_generator({"Urban water access is 95. Rural water access is 1."}, 0);
  OracleBackend oracle;
  PipelineConfig config;
  config.num_candidates = 1;
  const auto r = run_pipeline(table(), "", gen, oracle, config);
  CHECK(r.winner == 0);
  CHECK(r.final_summary.text == "Urban water access is 95.");

  auto empty = fixture_generator({""}, 0);
  config.num_candidates = 2;
  CHECK_THROWS_AS(run_pipeline(table(), "", empty, oracle, config), PipelineDegenerate);
  config.num_candidates = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("pipeline is deterministic") {
  const auto corpus = testing::synthetic_corpus(5, 17);
  OracleBackend oracle;
  PipelineConfig config;
  config.num_candidates = 4;
  for (const auto& ex : corpus) {
    auto g1 = fixture_generator(ex.record.candidate_summaries, 0);
    auto g2 = fixture_generator(ex.record.candidate_summaries, 0);
    const auto a = run_pipeline(ex.record.table, ex.record.title, g1, oracle, config);
    config.jobs = 1;
    const auto b = run_pipeline(ex.record.table, ex.record.title, g2, oracle, config);
    config.jobs = 4;
    CHECK(a.ranking == b.ranking);
    CHECK(a.final_summary.text == b.final_summary.text);
  }
}

TEST_CASE("ablation views") {
  const std::vector<std::string> fixtures = {
      "Urban water access is 95. Rural water access is 70.",
      "Urban water access is 95. Rural water access is 62."};
  auto gen = fixture_generator(fixtures, 0);
  OracleBackend oracle;
  PipelineConfig config;
  config.num_candidates = 2;
  const auto r = run_pipeline(table(), "", gen, oracle, config);
  const auto s1 = ablation_view(r, 1);
  const auto s2 = ablation_view(r, 2);
  const auto s3 = ablation_view(r, 3);
  REQUIRE(s1.size() == 2);
  CHECK(s1[0].candidate == 0);
  CHECK(s1[1].predicted_kept);
  CHECK_FALSE(s2[1].predicted_kept);
  CHECK(s3[0].candidate == 1);
  CHECK_THROWS(ablation_view(r, 5));
}

TEST_CASE("llm critic with flips over the mock logic") {
  auto logic = std::make_shared<testing::MockCompletionLogic>(10);
  auto client = testing::mock_client(logic);
  CriticConfig cc;
  LlmBackend critic(*client, cc);
  auto gen = fixture_generator({"Urban water access is 95. Rural water access is 62."}, 0);
  PipelineConfig config;
  config.num_candidates = 1;
  const auto r = run_pipeline(table(), "", gen, critic, config);
  CHECK(r.candidates[0].scored.summary.size() == 2);
  for (double s : r.candidates[0].scored.sentence_scores) CHECK(s >= 0.5);
}
