#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "chats/table.hpp"

namespace chats {

enum class DataSource { statista, pew, scicap, synthetic, other };

std::string_view to_string(DataSource s);
DataSource data_source_from_string(std::string_view s);  // unknown -> other

struct ExampleRecord {
  std::string id;
  std::string title;
  Table table;  // gold
  std::optional<Table> derendered_table;
  std::optional<std::string> image_url;
  std::optional<std::string> reference_summary;
  std::vector<std::string> candidate_summaries;
  DataSource source = DataSource::other;

  // The derendered table when requested and present, otherwise gold.
  const Table& table_for(TableSource source) const;
  // First candidate, else the reference, else "".
  std::string evaluated_summary() const;

  friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

nlohmann::json to_json(const ExampleRecord& r);
// Throws InvalidRecord on missing fields or a table that does not parse.
ExampleRecord example_from_json(const nlohmann::json& j);

struct AnnotationRecord {
  std::string example_id;
  std::size_t sentence_index = 0;
  std::string rater_id;
  bool entailed = false;
  bool relevant = false;
  bool grammatical = false;
  std::optional<bool> summary_grammatical;
  std::string timestamp;

  auto key() const { return std::tie(example_id, sentence_index, rater_id); }
  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(const nlohmann::json& j);

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

template <typename T>
struct LoadResult {
  std::vector<T> records;
  std::vector<LineError> errors;
};

// Streaming JSONL parse; malformed lines (and repeated ids) become errors.
// Throws IoError when the file cannot be read and AllLinesMalformed when no
// non-blank line parses.
LoadResult<ExampleRecord> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::vector<ExampleRecord>& records, const std::filesystem::path& path);

// A missing file yields no records.
LoadResult<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// Holds an exclusive lock on the file while checking for the key and writing
// the record as one line with a single write(2). Throws DuplicateRating,
// InvalidRecord or IoError.
void append_annotation(const AnnotationRecord& record, const std::filesystem::path& path);

// Writes `lines` (each without trailing newline) to a temp file and renames it
// over `path`.
void write_lines_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);  // throws IoError

// UTC "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace chats
