#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "chats/datastore.hpp"
#include "chats/segmenter.hpp"

namespace httplib {
class Server;
}

namespace chats {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Backs the annotation UI. Examples are served in dataset order; a rater gets
// the first example they have not finished that no other rater has claimed.
// The first round(overlap * n) examples are open to every rater so agreement
// can be measured. Ratings go through one writer in append-only JSONL.
class AnnotationService {
 public:
  AnnotationService(std::vector<ExampleRecord> records, std::filesystem::path output,
                    double overlap = 0.0);

  HttpReply next_task(std::string_view rater);
  HttpReply post_rating(std::string_view body);
  HttpReply progress(std::optional<std::string> rater = std::nullopt) const;
  HttpReply export_annotations() const;
  HttpReply agreement() const;

  // GET /api/tasks/next, POST /api/ratings, GET /api/progress, GET /api/export,
  // GET /api/agreement, and the UI's static files when a directory is given.
  void mount(httplib::Server& server, const std::optional<std::filesystem::path>& static_dir = {});

  std::size_t num_tasks() const { return tasks_.size(); }

 private:
  struct Task {
    ExampleRecord record;
    Summary summary;
    bool overlap = false;
  };
  using Key = std::tuple<std::string, std::size_t, std::string>;

  std::size_t rated_by(std::size_t task, const std::string& rater) const;
  void remember(const AnnotationRecord& r);

  std::vector<Task> tasks_;
  std::map<std::string, std::size_t> by_id_;
  std::filesystem::path output_;

  mutable std::mutex mu_;
  std::vector<AnnotationRecord> ratings_;
  std::set<Key> keys_;
  std::map<std::size_t, std::string> claims_;
  std::map<std::pair<std::size_t, std::string>, std::size_t> counts_;  // (task, rater) -> sentences
};

}  // namespace chats
