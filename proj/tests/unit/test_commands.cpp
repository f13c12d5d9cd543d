#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chats/app/commands.hpp"
#include "chats/app/manifest.hpp"
#include "chats/datastore.hpp"
#include "mock_endpoint.hpp"
#include "tempdir.hpp"

using namespace chats;
using chats::testing::TempDir;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = CHATS_TEST_DATA "/synthetic";

std::vector<json> read_jsonl(const std::filesystem::path& p) {
  std::vector<json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("env -u CHATS_ENDPOINT_URL -u CHATS_CACHE_DIR ") + CHATS_CLI + " " +
                          args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ScoreOptions fixture_score(const TempDir& dir) {
  std::filesystem::copy_file(kFixtures / "dataset.jsonl", dir / "dataset.jsonl",
                             std::filesystem::copy_options::overwrite_existing);
  ScoreOptions o;
  o.input = dir / "dataset.jsonl";
  o.output = dir / "report.jsonl";
  return o;
}

}  // namespace

TEST_CASE("score on the bundled fixtures matches the golden report") {
  TempDir dir;
  std::ostringstream err;
  const auto opts = fixture_score(dir);
  REQUIRE(cmd_score(opts, err) == kExitOk);
  CHECK(read_text(opts.output) == read_text(kFixtures / "golden_report.jsonl"));
  const auto aggregate = json::parse(read_text(dir / "report.jsonl.aggregate.json"));
  CHECK(aggregate["examples"] == 12);
  const auto manifest = json::parse(read_text(dir / "report.jsonl.manifest.json"));
  CHECK(manifest["inputs"][0]["name"] == "dataset.jsonl");
  CHECK(manifest["run_id"] == aggregate["run_id"]);
}

TEST_CASE("derendered tables change the verdicts of misread cells") {
  TempDir dir;
  std::ostringstream err;
  auto opts = fixture_score(dir);
  opts.table_source = TableSource::derendered;
  REQUIRE(cmd_score(opts, err) == kExitOk);
  const auto rows = read_jsonl(opts.output);
  const auto gold = read_jsonl(kFixtures / "golden_report.jsonl");
  REQUIRE(rows.size() == gold.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Examples without a de-rendered copy fall back to gold.
    CHECK(rows[i]["table_source"] == (i % 3 == 0 ? "derendered" : "gold"));
    if (i % 3 != 0) CHECK(rows[i]["sentences"] == gold[i]["sentences"]);
  }
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run_cli("") == kExitInput);
  CHECK(run_cli("score -o " + (dir / "r.jsonl").string()) == kExitInput);
  CHECK(run_cli("score -i " + (dir / "missing.jsonl").string() + " -o " + (dir / "r.jsonl").string()) == kExitInput);
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << "not json\n";
  }
  CHECK(run_cli("score -i " + (dir / "bad.jsonl").string() + " -o " + (dir / "r.jsonl").string()) == kExitInput);
  CHECK(run_cli("score -i " + (kFixtures / "dataset.jsonl").string() + " -o " + (dir / "r.jsonl").string() +
                " --threshold 1.5") == kExitInput);
  CHECK(run_cli("score -i " + (kFixtures / "dataset.jsonl").string() + " -o " + (dir / "r.jsonl").string() +
                " --backend llm --cache-only --cache-dir " + (dir / "empty").string()) == kExitBackend);
  CHECK(run_cli("score -i " + (kFixtures / "dataset.jsonl").string() + " -o " + (dir / "r.jsonl").string()) ==
        kExitOk);
  CHECK(run_cli("pipeline -i " + (kFixtures / "dataset.jsonl").string() + " -o " + (dir / "p.jsonl").string() +
                " --stages S9") == kExitInput);
  CHECK(run_cli("--help") == kExitOk);
}

TEST_CASE("higher thresholds never raise faithfulness") {
  auto logic = std::make_shared<testing::MockCompletionLogic>(20);
  testing::MockEndpoint ep(logic);
  TempDir dir;
  std::ostringstream err;
  auto opts = fixture_score(dir);
  opts.critic.backend = "llm";
  opts.critic.critic.ensemble_size = 4;
  opts.endpoint.endpoint_url = ep.url();
  opts.endpoint.cache_dir = dir / "cache";
  opts.endpoint.retry_base_ms = 1;
  double prev = 2.0;
  for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    opts.critic.critic.threshold = t;
    REQUIRE(cmd_score(opts, err) == kExitOk);
    const double f = json::parse(read_text(dir / "report.jsonl.aggregate.json"))["mean_faithfulness"];
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("pipeline command and stage flags") {
  TempDir dir;
  std::ostringstream err;
  PipelineOptions p;
  std::filesystem::copy_file(kFixtures / "dataset.jsonl", dir / "dataset.jsonl");
  p.input = dir / "dataset.jsonl";
  p.output = dir / "pipe.jsonl";
  p.pipeline.num_candidates = 4;
  REQUIRE(cmd_pipeline(p, err) == kExitOk);
  const auto full = read_jsonl(p.output);
  REQUIRE(full.size() == 12);
  for (const auto& row : full) {
    CHECK(row["stages"] == "S1,S2,S3,S4");
    CHECK(row["candidates"].size() == 4);
  }
  p.pipeline.stages = StageMask::only_generate();
  REQUIRE(cmd_pipeline(p, err) == kExitOk);
  const auto s1 = read_jsonl(p.output);
  const auto records = load_dataset(p.input).records;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i]["winner"] == 0);
    CHECK(s1[i]["final_summary"] == records[i].candidate_summaries[0]);
  }
}

TEST_CASE("metaeval command") {
  TempDir dir;
  std::ostringstream err;
  MetaevalOptions m;
  m.predictions = kFixtures / "golden_report.jsonl";
  m.annotations = kFixtures / "annotations.jsonl";
  m.output = dir / "meta.json";
  m.sweep = true;
  REQUIRE(cmd_metaeval(m, err) == kExitOk);
  const auto report = json::parse(read_text(m.output));
  const auto& noop = report["levels"]["sentence"]["metrics"]["noop"]["classification"];
  const double base = report["levels"]["sentence"]["base_rate"];
  CHECK(noop["accuracy"].get<double>() == doctest::Approx(base));
  CHECK(noop["recall"] == 1.0);
  CHECK(noop["auc"] == 0.5);
  CHECK(report["levels"]["summary"]["metrics"].contains("bleu"));
  CHECK(std::filesystem::exists(dir / "meta.pr/sentence_critic.csv"));

  {
    std::ofstream out(dir / "stray.jsonl");
    out << read_text(m.annotations)
        << R"({"example_id":"nope","sentence_index":0,"rater_id":"r1","entailed":true,"relevant":true,"grammatical":true,"timestamp":""})"
        << "\n";
  }
  m.annotations = dir / "stray.jsonl";
  CHECK(cmd_metaeval(m, err) == kExitInput);
}

TEST_CASE("replay generator and manifest ids") {
  ReplayGenerator g({"a", "b"}, 10);
  CompletionRequest r;
  r.sample_seed = 11;
  CHECK(g.complete(r).text == "b");
  r.sample_seed = 12;
  CHECK(g.complete(r).text == "a");

  RunManifest m;
  m.command = "score";
  const std::string id = m.run_id();
  CHECK(id.size() == 64);
  CHECK(m.to_json()["run_id"] == id);
  m.seed = 1;
  CHECK(m.run_id() != id);
  CHECK(number_json(-std::numeric_limits<double>::infinity()) == "-inf");
}
