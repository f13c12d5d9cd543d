#include "chats/datastore.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "chats/errors.hpp"
#include "chats/text.hpp"

namespace chats {

using nlohmann::json;

namespace {

constexpr std::string_view kSourceNames[] = {"statista", "pew", "scicap", "synthetic", "other"};

template <typename T>
T required(const json& j, const char* field) {
  if (!j.contains(field)) throw InvalidRecord(std::string("missing field '") + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw InvalidRecord(std::string("bad field '") + field + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw InvalidRecord(std::string("bad field '") + field + "': " + e.what());
  }
}

Table parse_record_table(const std::string& text, TableSource source, const char* field) {
  try {
    return parse_linearized(text, source).table;
  } catch (const Error& e) {
    throw InvalidRecord(std::string("field '") + field + "' does not parse: " + e.what());
  }
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

std::string errno_message(const std::string& what, const std::filesystem::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

template <typename T, typename Parse>
LoadResult<T> load_jsonl(std::istream& in, Parse parse, std::vector<std::size_t>* record_lines = nullptr) {
  LoadResult<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.records.push_back(parse(json::parse(line)));
      if (record_lines) record_lines->push_back(line_no);
    } catch (const json::exception& e) {
      out.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(DataSource s) { return kSourceNames[static_cast<int>(s)]; }

DataSource data_source_from_string(std::string_view s) {
  const std::string lower = to_lower(s);
  for (std::size_t i = 0; i < std::size(kSourceNames); ++i)
    if (lower == kSourceNames[i]) return static_cast<DataSource>(i);
  return DataSource::other;
}

const Table& ExampleRecord::table_for(TableSource source) const {
  if (source == TableSource::derendered && derendered_table) return *derendered_table;
  return table;
}

std::string ExampleRecord::evaluated_summary() const {
  if (!candidate_summaries.empty()) return candidate_summaries.front();
  return reference_summary.value_or("");
}

json to_json(const ExampleRecord& r) {
  json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["table"] = serialize(r.table);
  if (r.derendered_table) j["derendered_table"] = serialize(*r.derendered_table);
  if (r.image_url) j["image_url"] = *r.image_url;
  if (r.reference_summary) j["reference_summary"] = *r.reference_summary;
  j["candidate_summaries"] = r.candidate_summaries;
  j["source"] = std::string(to_string(r.source));
  return j;
}

ExampleRecord example_from_json(const json& j) {
  if (!j.is_object()) throw InvalidRecord("record is not a JSON object");
  ExampleRecord r;
  r.id = required<std::string>(j, "id");
  if (trim(r.id).empty()) throw InvalidRecord("empty id");
  r.title = optional_field<std::string>(j, "title").value_or("");
  r.table = parse_record_table(required<std::string>(j, "table"), TableSource::gold, "table");
  if (auto d = optional_field<std::string>(j, "derendered_table"))
    r.derendered_table = parse_record_table(*d, TableSource::derendered, "derendered_table");
  r.image_url = optional_field<std::string>(j, "image_url");
  r.reference_summary = optional_field<std::string>(j, "reference_summary");
  r.candidate_summaries =
      optional_field<std::vector<std::string>>(j, "candidate_summaries").value_or(std::vector<std::string>{});
  r.source = data_source_from_string(optional_field<std::string>(j, "source").value_or("other"));
  return r;
}

json to_json(const AnnotationRecord& r) {
  json j;
  j["example_id"] = r.example_id;
  j["sentence_index"] = r.sentence_index;
  j["rater_id"] = r.rater_id;
  j["entailed"] = r.entailed;
  j["relevant"] = r.relevant;
  j["grammatical"] = r.grammatical;
  if (r.summary_grammatical) j["summary_grammatical"] = *r.summary_grammatical;
  j["timestamp"] = r.timestamp;
  return j;
}

AnnotationRecord annotation_from_json(const json& j) {
  if (!j.is_object()) throw InvalidRecord("record is not a JSON object");
  AnnotationRecord r;
  r.example_id = required<std::string>(j, "example_id");
  const auto idx = required<std::int64_t>(j, "sentence_index");
  if (idx < 0) throw InvalidRecord("negative sentence_index");
  r.sentence_index = static_cast<std::size_t>(idx);
  r.rater_id = required<std::string>(j, "rater_id");
  r.entailed = required<bool>(j, "entailed");
  r.relevant = required<bool>(j, "relevant");
  r.grammatical = required<bool>(j, "grammatical");
  r.summary_grammatical = optional_field<bool>(j, "summary_grammatical");
  r.timestamp = optional_field<std::string>(j, "timestamp").value_or("");
  if (trim(r.example_id).empty()) throw InvalidRecord("empty example_id");
  if (trim(r.rater_id).empty()) throw InvalidRecord("empty rater_id");
  return r;
}

LoadResult<ExampleRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset " + path.string());
  std::vector<std::size_t> lines;
  auto out = load_jsonl<ExampleRecord>(in, example_from_json, &lines);
  if (in.bad()) throw IoError("error while reading " + path.string());

  std::set<std::string> seen;
  std::vector<ExampleRecord> unique;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    auto& r = out.records[i];
    if (!seen.insert(r.id).second) {
      out.errors.push_back({lines[i], "duplicate id '" + r.id + "'"});
      continue;
    }
    unique.push_back(std::move(r));
  }
  out.records = std::move(unique);
  if (out.records.empty() && !out.errors.empty())
    throw AllLinesMalformed("no valid record in " + path.string() + " (" +
                            std::to_string(out.errors.size()) + " malformed lines; first: " +
                            out.errors.front().message + ")");
  return out;
}

void save_dataset(const std::vector<ExampleRecord>& records, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r).dump());
  write_lines_atomic(path, lines);
}

LoadResult<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw IoError("cannot read annotations " + path.string());
  return load_jsonl<AnnotationRecord>(in, annotation_from_json);
}

void append_annotation(const AnnotationRecord& record, const std::filesystem::path& path) {
  if (trim(record.example_id).empty() || trim(record.rater_id).empty())
    throw InvalidRecord("annotation needs example_id and rater_id");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());

  Fd fd(::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
  if (fd.get() < 0) throw IoError(errno_message("cannot open", path));
  if (::flock(fd.get(), LOCK_EX) != 0) throw IoError(errno_message("cannot lock", path));

  std::string content;
  {
    char buf[1 << 14];
    ::lseek(fd.get(), 0, SEEK_SET);
    for (;;) {
      const ssize_t n = ::read(fd.get(), buf, sizeof buf);
      if (n < 0) throw IoError(errno_message("cannot read", path));
      if (n == 0) break;
      content.append(buf, static_cast<std::size_t>(n));
    }
  }
  std::istringstream in(content);
  const auto existing = load_jsonl<AnnotationRecord>(in, annotation_from_json);
  for (const auto& r : existing.records)
    if (r.key() == record.key())
      throw DuplicateRating("rating exists for example '" + record.example_id + "', sentence " +
                            std::to_string(record.sentence_index) + ", rater '" + record.rater_id +
                            "'");

  std::string line = to_json(record).dump();
  // A previous writer killed mid-line leaves a fragment; start on a fresh line.
  if (!content.empty() && content.back() != '\n') line.insert(line.begin(), '\n');
  line += '\n';
  const ssize_t written = ::write(fd.get(), line.data(), line.size());
  if (written != static_cast<ssize_t>(line.size())) throw IoError(errno_message("short write to", path));
  ::fsync(fd.get());
  ::flock(fd.get(), LOCK_UN);
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
}

void write_lines_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  write_text_atomic(path, text);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace chats
