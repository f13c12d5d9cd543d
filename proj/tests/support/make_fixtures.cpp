// Writes the bundled synthetic fixtures:
//   <dir>/dataset.jsonl      examples with 4 candidates each
//   <dir>/annotations.jsonl  two simulated raters over candidate 0
#include <iostream>
#include <random>

#include "chats/datastore.hpp"
#include "synthetic.hpp"

using namespace chats;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: chats_make_fixtures <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  auto corpus = testing::synthetic_corpus(12, 20260114);
  std::mt19937_64 rng(7);
  std::vector<ExampleRecord> records;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& ex = corpus[i];
    if (i % 3 == 0) {
      // A de-rendered copy with one numeric cell misread.
      Table t = ex.record.table;
      t.source = TableSource::derendered;
      auto& cell = t.rows[0][1];
      cell = Cell(cell.raw() + "1");
      ex.record.derendered_table = t;
    }
    records.push_back(ex.record);
    for (std::size_t s = 0; s < ex.candidates[0].size(); ++s) {
      const bool truth = ex.candidates[0][s].truth;
      for (const char* rater : {"r1", "r2"}) {
        AnnotationRecord a;
        a.example_id = ex.record.id;
        a.sentence_index = s;
        a.rater_id = rater;
        a.entailed = std::string(rater) == "r2" && std::bernoulli_distribution(0.1)(rng) ? !truth : truth;
        a.relevant = true;
        a.grammatical = true;
        a.timestamp = "2026-01-14T00:00:00Z";
        lines.push_back(to_json(a).dump());
      }
    }
  }
  save_dataset(records, dir / "dataset.jsonl");
  write_lines_atomic(dir / "annotations.jsonl", lines);
  std::cout << records.size() << " examples, " << lines.size() << " ratings\n";
  return 0;
}
