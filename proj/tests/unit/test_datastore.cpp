#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "chats/datastore.hpp"
#include "chats/errors.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace chats;
using chats::testing::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

AnnotationRecord rating(std::string example, std::size_t index, std::string rater) {
  AnnotationRecord r;
  r.example_id = std::move(example);
  r.sentence_index = index;
  r.rater_id = std::move(rater);
  r.entailed = index % 2 == 0;
  r.relevant = true;
  r.grammatical = index % 3 != 0;
  r.timestamp = "2026-01-01T00:00:00Z";
  return r;
}

}  // namespace

TEST_CASE("100 random records survive save and load") {
  std::mt19937_64 rng(523);
  std::bernoulli_distribution coin(0.5);
  auto corpus = testing::synthetic_corpus(100, 523);
  std::vector<ExampleRecord> records;
  for (auto& ex : corpus) {
    ExampleRecord r = ex.record;
    if (coin(rng)) r.derendered_table = testing::random_table(rng).table;
    if (coin(rng)) r.image_url = "https://example.org/" + r.id + ".png";
    if (coin(rng)) r.reference_summary.reset();
    if (coin(rng)) r.candidate_summaries.clear();
    r.title = coin(rng) ? r.title : "Title with | pipe and \"quotes\"";
    records.push_back(std::move(r));
  }
  TempDir dir;
  save_dataset(records, dir / "d.jsonl");
  const auto loaded = load_dataset(dir / "d.jsonl");
  CHECK(loaded.errors.empty());
  REQUIRE(loaded.records.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(loaded.records[i] == records[i]);
}

TEST_CASE("record accessors") {
  ExampleRecord r;
  r.table = parse_linearized("a | b\n1 | 2", TableSource::gold).table;
  CHECK(&r.table_for(TableSource::derendered) == &r.table);
  r.derendered_table = parse_linearized("a | b\n1 | 3").table;
  CHECK(&r.table_for(TableSource::derendered) == &*r.derendered_table);
  CHECK(r.evaluated_summary().empty());
  r.reference_summary = "ref";
  CHECK(r.evaluated_summary() == "ref");
  r.candidate_summaries = {"cand"};
  CHECK(r.evaluated_summary() == "cand");
  CHECK(data_source_from_string("statista") == DataSource::statista);
  CHECK(data_source_from_string("nope") == DataSource::other);
}

TEST_CASE("malformed lines and duplicate ids are reported") {
  TempDir dir;
  const std::string good = to_json(testing::synthetic_corpus(1, 1)[0].record).dump();
  write_file(dir / "d.jsonl", good + "\n{not json\n\n{\"id\": \"x\"}\n" + good + "\n");
  const auto r = load_dataset(dir / "d.jsonl");
  CHECK(r.records.size() == 1);
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].line == 2);
  CHECK(r.errors[1].line == 4);
  CHECK(r.errors[2].line == 5);
  write_file(dir / "bad.jsonl", "nope\n[1]\n");
  CHECK_THROWS_AS(load_dataset(dir / "bad.jsonl"), AllLinesMalformed);
  CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl"), IoError);
  CHECK_THROWS_AS(example_from_json(nlohmann::json{{"id", "a"}, {"title", "t"}, {"table", ""}}), InvalidRecord);
}

TEST_CASE("annotations append and reject duplicates") {
  TempDir dir;
  const auto path = dir / "a.jsonl";
  CHECK(load_annotations(path).records.empty());
  append_annotation(rating("e1", 0, "r1"), path);
  append_annotation(rating("e1", 1, "r1"), path);
  append_annotation(rating("e1", 0, "r2"), path);
  CHECK_THROWS_AS(append_annotation(rating("e1", 0, "r1"), path), DuplicateRating);
  const auto loaded = load_annotations(path);
  REQUIRE(loaded.records.size() == 3);
  CHECK(loaded.records[0] == rating("e1", 0, "r1"));
  AnnotationRecord anon = rating("e1", 2, "");
  CHECK_THROWS_AS(append_annotation(anon, path), InvalidRecord);
}

TEST_CASE("append after a torn last line") {
  TempDir dir;
  const auto path = dir / "a.jsonl";
  write_file(path, to_json(rating("e1", 0, "r1")).dump() + "\n{\"example_id\": \"e1\", \"sent");
  append_annotation(rating("e1", 1, "r1"), path);
  const auto loaded = load_annotations(path);
  CHECK(loaded.records.size() == 2);
  CHECK(loaded.errors.size() == 1);
}

TEST_CASE("concurrent appends of 100 distinct records") {
  TempDir dir;
  const auto path = dir / "a.jsonl";
  std::vector<std::thread> threads;
  for (int t = 0; t < 10; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i)
        append_annotation(rating("e" + std::to_string(t), static_cast<std::size_t>(i), "r"), path);
    });
  for (auto& th : threads) th.join();
  const auto loaded = load_annotations(path);
  CHECK(loaded.errors.empty());
  CHECK(loaded.records.size() == 100);
  std::set<std::pair<std::string, std::size_t>> keys;
  for (const auto& r : loaded.records) keys.insert({r.example_id, r.sentence_index});
  CHECK(keys.size() == 100);
}

TEST_CASE("atomic writes replace content") {
  TempDir dir;
  const auto p = dir / "out.txt";
  write_text_atomic(p, "one");
  write_lines_atomic(p, {"a", "b"});
  CHECK(read_text(p) == "a\nb\n");
  CHECK_THROWS_AS(read_text(dir / "none"), IoError);
  CHECK(utc_timestamp().size() == 20);
}
