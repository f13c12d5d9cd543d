#include "chats/app/service.hpp"

#include <cmath>

#include <httplib.h>

#include "chats/app/reports.hpp"
#include "chats/errors.hpp"
#include "chats/metaeval.hpp"
#include "chats/text.hpp"

namespace chats {

using nlohmann::json;

namespace {

HttpReply json_reply(int status, const json& j) { return {status, j.dump(), "application/json"}; }

HttpReply error_reply(int status, const std::string& message) {
  return json_reply(status, {{"error", message}});
}

}  // namespace

AnnotationService::AnnotationService(std::vector<ExampleRecord> records,
                                     std::filesystem::path output, double overlap)
    : output_(std::move(output)) {
  if (overlap < 0.0 || overlap > 1.0) throw std::invalid_argument("overlap must lie in [0, 1]");
  for (auto& r : records) {
    Summary s = segment(r.evaluated_summary());
    if (s.empty()) continue;
    by_id_[r.id] = tasks_.size();
    tasks_.push_back({std::move(r), std::move(s), false});
  }
  const auto shared = static_cast<std::size_t>(std::lround(overlap * static_cast<double>(tasks_.size())));
  for (std::size_t i = 0; i < shared && i < tasks_.size(); ++i) tasks_[i].overlap = true;

  for (const auto& r : load_annotations(output_).records) remember(r);
}

void AnnotationService::remember(const AnnotationRecord& r) {
  keys_.insert({r.example_id, r.sentence_index, r.rater_id});
  ratings_.push_back(r);
  const auto it = by_id_.find(r.example_id);
  if (it == by_id_.end()) return;
  ++counts_[{it->second, r.rater_id}];
  if (!tasks_[it->second].overlap) claims_.emplace(it->second, r.rater_id);
}

std::size_t AnnotationService::rated_by(std::size_t task, const std::string& rater) const {
  const auto it = counts_.find({task, rater});
  return it == counts_.end() ? 0 : it->second;
}

HttpReply AnnotationService::next_task(std::string_view rater_view) {
  const std::string rater(trim(rater_view));
  if (rater.empty()) return error_reply(400, "missing rater id");
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (rated_by(i, rater) >= t.summary.size()) continue;
    if (!t.overlap) {
      const auto c = claims_.find(i);
      if (c != claims_.end() && c->second != rater) continue;
      claims_.emplace(i, rater);
    }
    json sentences = json::array();
    for (const auto& s : t.summary.sentences)
      sentences.push_back({{"index", s.index},
                           {"text", s.text},
                           {"rated", keys_.count({t.record.id, s.index, rater}) > 0}});
    const Table& table = t.record.table;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json cells = json::array();
      for (const auto& c : row) cells.push_back(c.raw());
      rows.push_back(std::move(cells));
    }
    json j{{"example_id", t.record.id},
           {"title", t.record.title},
           {"table", serialize(table)},
           {"grid", {{"headers", table.headers}, {"rows", rows}}},
           {"image_url", t.record.image_url ? json(*t.record.image_url) : json(nullptr)},
           {"summary", t.summary.text},
           {"sentences", sentences},
           {"overlap", t.overlap},
           {"position", i},
           {"total", tasks_.size()}};
    return json_reply(200, j);
  }
  return json_reply(404, {{"done", true}, {"message", "no tasks remaining"}});
}

HttpReply AnnotationService::post_rating(std::string_view body) {
  AnnotationRecord rec;
  try {
    rec = annotation_from_json(json::parse(body));
  } catch (const json::exception& e) {
    return error_reply(400, std::string("invalid JSON: ") + e.what());
  } catch (const InvalidRecord& e) {
    return error_reply(400, e.what());
  }
  std::lock_guard lock(mu_);
  const auto it = by_id_.find(rec.example_id);
  if (it == by_id_.end()) return error_reply(400, "unknown example_id '" + rec.example_id + "'");
  const Task& t = tasks_[it->second];
  if (rec.sentence_index >= t.summary.size())
    return error_reply(400, "sentence_index " + std::to_string(rec.sentence_index) +
                                " out of range for example '" + rec.example_id + "'");
  if (!t.overlap) {
    const auto c = claims_.find(it->second);
    if (c != claims_.end() && c->second != rec.rater_id)
      return error_reply(409, "example '" + rec.example_id + "' is assigned to another rater");
  }
  if (keys_.count({rec.example_id, rec.sentence_index, rec.rater_id}))
    return error_reply(409, "duplicate rating");
  if (rec.timestamp.empty()) rec.timestamp = utc_timestamp();
  try {
    append_annotation(rec, output_);
  } catch (const DuplicateRating& e) {
    return error_reply(409, e.what());
  } catch (const IoError& e) {
    return error_reply(500, e.what());
  }
  remember(rec);
  return json_reply(201, to_json(rec));
}

HttpReply AnnotationService::progress(std::optional<std::string> rater) const {
  std::lock_guard lock(mu_);
  std::size_t total_sentences = 0;
  for (const auto& t : tasks_) total_sentences += t.summary.size();
  std::map<std::string, std::pair<std::size_t, std::size_t>> per;  // completed, sentences
  if (rater) per[*rater];
  for (const auto& [k, n] : counts_) {
    auto& p = per[k.second];
    p.second += n;
    if (n >= tasks_[k.first].summary.size()) ++p.first;
  }
  json raters = json::object();
  for (const auto& [r, p] : per)
    raters[r] = {{"examples_completed", p.first}, {"sentences_rated", p.second}};
  json j{{"total_examples", tasks_.size()},
         {"total_sentences", total_sentences},
         {"records", ratings_.size()},
         {"raters", raters}};
  if (rater) j["rater"] = raters[*rater];
  return json_reply(200, j);
}

HttpReply AnnotationService::export_annotations() const {
  std::lock_guard lock(mu_);
  std::string out;
  if (std::filesystem::exists(output_)) out = read_text(output_);
  return {200, out, "application/x-ndjson"};
}

HttpReply AnnotationService::agreement() const {
  std::lock_guard lock(mu_);
  // First two distinct raters per sentence, in file order.
  std::map<std::pair<std::string, std::size_t>, std::vector<const AnnotationRecord*>> items;
  for (const auto& r : ratings_) {
    auto& v = items[{r.example_id, r.sentence_index}];
    if (v.size() < 2 && (v.empty() || v.front()->rater_id != r.rater_id)) v.push_back(&r);
  }
  std::vector<int> ea, eb, ra, rb, ga, gb;
  for (const auto& [k, v] : items) {
    if (v.size() < 2) continue;
    ea.push_back(v[0]->entailed);
    eb.push_back(v[1]->entailed);
    ra.push_back(v[0]->relevant);
    rb.push_back(v[1]->relevant);
    ga.push_back(v[0]->grammatical);
    gb.push_back(v[1]->grammatical);
  }
  json j{{"items", ea.size()}};
  if (ea.empty()) {
    j["entailed"] = j["relevant"] = j["grammatical"] = nullptr;
  } else {
    j["entailed"] = to_json(cohens_kappa(ea, eb));
    j["relevant"] = to_json(cohens_kappa(ra, rb));
    j["grammatical"] = to_json(cohens_kappa(ga, gb));
  }
  return json_reply(200, j);
}

void AnnotationService::mount(httplib::Server& server,
                              const std::optional<std::filesystem::path>& static_dir) {
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/api/tasks/next", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, next_task(req.has_param("rater") ? req.get_param_value("rater") : ""));
  });
  server.Post("/api/ratings", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_rating(req.body));
  });
  server.Get("/api/progress", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> rater;
    if (req.has_param("rater")) rater = req.get_param_value("rater");
    send(res, progress(rater));
  });
  server.Get("/api/export", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, export_annotations());
  });
  server.Get("/api/agreement", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, agreement());
  });
  if (static_dir) server.set_mount_point("/", static_dir->string());
}

}  // namespace chats
