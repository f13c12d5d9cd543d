#include "chats/app/commands.hpp"

#include <httplib.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "chats/app/manifest.hpp"
#include "chats/app/reports.hpp"
#include "chats/app/service.hpp"
#include "chats/baselines.hpp"
#include "chats/critic.hpp"
#include "chats/datastore.hpp"
#include "chats/errors.hpp"
#include "chats/metaeval.hpp"
#include "chats/parallel.hpp"
#include "chats/text.hpp"

namespace chats {

using nlohmann::json;

ClientConfig EndpointOptions::resolve() const {
  ClientConfig c = ClientConfig::from_env();
  if (config_file) c = ClientConfig::from_file(*config_file, c);
  if (endpoint_url) c.endpoint_url = *endpoint_url;
  if (cache_dir) c.cache_dir = *cache_dir;
  if (cache_only) c.cache_only = true;
  if (retry_base_ms) c.retry.base_delay = std::chrono::milliseconds(*retry_base_ms);
  return c;
}

ReplayGenerator::ReplayGenerator(std::vector<std::string> candidates, std::int64_t base_seed)
    : candidates_(std::move(candidates)), base_seed_(base_seed) {}

Completion ReplayGenerator::complete(const CompletionRequest& request) {
  if (candidates_.empty()) return {"", false, false};
  const auto n = static_cast<std::int64_t>(candidates_.size());
  const std::int64_t i = ((request.sample_seed - base_seed_) % n + n) % n;
  return {candidates_[static_cast<std::size_t>(i)], false, false};
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const BackendUnavailable& e) {
    err << "backend error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  }
}

std::vector<ExampleRecord> load_records(const std::filesystem::path& path, std::ostream& err) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("dataset not found: " + path.string());
  auto loaded = load_dataset(path);
  for (const auto& e : loaded.errors)
    err << path.filename().string() << ":" << e.line << ": skipped: " << e.message << '\n';
  return std::move(loaded.records);
}

std::filesystem::path sibling(const std::filesystem::path& output, std::string_view suffix) {
  std::filesystem::path p = output;
  p += std::string(suffix);
  return p;
}

struct Backend {
  std::unique_ptr<LlmClient> client;
  std::unique_ptr<EntailmentBackend> backend;
};

Backend make_backend(const CriticOptions& c, const EndpointOptions& e) {
  Backend b;
  if (c.backend == "oracle") {
    b.backend = std::make_unique<OracleBackend>(c.oracle_mode);
  } else if (c.backend == "llm") {
    b.client = std::make_unique<LlmClient>(e.resolve());
    CriticConfig cfg = c.critic;
    if (cfg.model_id.empty()) cfg.model_id = e.model_id;
    b.backend = std::make_unique<LlmBackend>(
        *b.client, cfg,
        c.critic_template ? PromptTemplate::from_file(*c.critic_template) : PromptTemplate::builtin_critic());
  } else {
    throw std::invalid_argument("unknown backend '" + c.backend + "' (expected oracle or llm)");
  }
  return b;
}

json critic_snapshot(const CriticOptions& c, const EndpointOptions& e) {
  json j{{"backend", c.backend},
         {"threshold", c.critic.threshold},
         {"ensemble_size", c.critic.ensemble_size},
         {"sample_temperature", c.critic.sample_temperature},
         {"seed", c.critic.seed},
         {"max_tokens", c.critic.max_tokens}};
  if (c.backend == "oracle") j["oracle_mode"] = c.oracle_mode == OracleMode::strict ? "strict" : "permissive";
  if (c.backend == "llm") {
    j["model_id"] = c.critic.model_id.empty() ? e.model_id : c.critic.model_id;
    j["critic_template"] = c.critic_template ? digest_file(*c.critic_template).sha256
                                             : sha256_hex(PromptTemplate::builtin_critic().text());
  }
  return j;
}

std::string actual_source(const ExampleRecord& r, TableSource requested) {
  return std::string(to_string(requested == TableSource::derendered && r.derendered_table
                                   ? TableSource::derendered
                                   : TableSource::gold));
}

}  // namespace

int cmd_score(const ScoreOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const auto records = load_records(opts.input, err);
    opts.critic.critic.validate();
    Backend b = make_backend(opts.critic, opts.endpoint);

    const auto aggregate_path = sibling(opts.output, ".aggregate.json");
    RunManifest m;
    m.command = "score";
    m.config = {{"critic", critic_snapshot(opts.critic, opts.endpoint)},
                {"table_source", std::string(to_string(opts.table_source))}};
    m.inputs = {digest_file(opts.input)};
    m.seed = opts.critic.critic.seed;
    m.outputs = {opts.output.filename().string(), aggregate_path.filename().string()};
    const std::string run_id = m.run_id();

    std::vector<json> lines(records.size());
    std::vector<ScoredSummary> scored(records.size());
    parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
      const ExampleRecord& r = records[i];
      const Table& table = r.table_for(opts.table_source);
      const std::string text = r.evaluated_summary();
      scored[i] = score_summary(text, table, r.title, *b.backend, opts.critic.critic);
      const RepairedSummary repaired = repair(scored[i]);
      json j = to_json(scored[i]);
      j["run_id"] = run_id;
      j["id"] = r.id;
      j["table_source"] = actual_source(r, opts.table_source);
      j["backend"] = b.backend->name();
      j["faithfulness_pre"] = scored[i].faithfulness;
      j["faithfulness_post"] = repaired.faithfulness_post;
      j["repaired"] = to_json(repaired);
      if (r.reference_summary && !tokenize(text).empty()) {
        j["bleu"] = bleu(text, {*r.reference_summary});
        j["parent"] = parent(text, *r.reference_summary, table);
      }
      lines[i] = std::move(j);
    });

    std::vector<std::string> out;
    std::size_t sentences = 0, kept = 0, empty = 0, unparseable = 0, failed = 0, truncated = 0;
    double sum_f = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      out.push_back(lines[i].dump());
      const ScoredSummary& s = scored[i];
      sentences += s.summary.size();
      kept += s.kept_count();
      empty += s.empty_summary ? 1 : 0;
      sum_f += s.faithfulness;
      for (const auto& vs : s.verdicts)
        for (const auto& v : vs) {
          unparseable += v.unparseable;
          failed += v.failed;
          truncated += v.truncated;
        }
    }
    write_lines_atomic(opts.output, out);
    const json aggregate{
        {"run_id", run_id},
        {"examples", records.size()},
        {"mean_faithfulness", records.empty() ? 0.0 : sum_f / static_cast<double>(records.size())},
        {"sentences", sentences},
        {"kept_sentences", kept},
        {"kept_ratio", sentences == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(sentences)},
        {"empty_summaries", empty},
        {"unparseable_verdicts", unparseable},
        {"failed_verdicts", failed},
        {"truncated_verdicts", truncated}};
    write_text_atomic(aggregate_path, aggregate.dump(2) + "\n");
    write_manifest(m, opts.output);
    err << "scored " << records.size() << " examples, mean faithfulness "
        << aggregate["mean_faithfulness"].get<double>() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_pipeline(const PipelineOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const auto records = load_records(opts.input, err);
    PipelineConfig cfg = opts.pipeline;
    cfg.critic = opts.critic.critic;
    if (cfg.model_id.empty()) cfg.model_id = opts.endpoint.model_id;
    cfg.validate();
    Backend b = make_backend(opts.critic, opts.endpoint);
    const PromptTemplate gen_prompt = opts.generator_template
                                          ? PromptTemplate::from_file(*opts.generator_template)
                                          : PromptTemplate::builtin_generator();
    std::unique_ptr<LlmClient> gen_client;
    if (opts.generator == "llm") {
      gen_client = std::make_unique<LlmClient>(opts.endpoint.resolve());
    } else if (opts.generator != "dataset") {
      throw std::invalid_argument("unknown generator '" + opts.generator + "' (expected dataset or llm)");
    }

    RunManifest m;
    m.command = "pipeline";
    m.config = {{"critic", critic_snapshot(opts.critic, opts.endpoint)},
                {"table_source", std::string(to_string(opts.table_source))},
                {"generator", opts.generator},
                {"num_candidates", cfg.num_candidates},
                {"generation_temperature", cfg.generation_temperature},
                {"max_tokens", cfg.max_tokens},
                {"stages", cfg.stages.to_string()},
                {"generator_template", sha256_hex(gen_prompt.text())}};
    if (opts.generator == "llm") m.config["model_id"] = cfg.model_id;
    m.inputs = {digest_file(opts.input)};
    m.seed = cfg.seed;
    m.outputs = {opts.output.filename().string()};
    const std::string run_id = m.run_id();

    std::vector<json> lines(records.size());
    std::atomic<std::size_t> degenerate{0};
    parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
      const ExampleRecord& r = records[i];
      const Table& table = r.table_for(opts.table_source);
      json j;
      try {
        RankedResult res;
        if (gen_client) {
          res = run_pipeline(table, r.title, *gen_client, *b.backend, cfg, gen_prompt);
        } else {
          std::vector<std::string> pool = r.candidate_summaries;
          if (pool.empty() && r.reference_summary) pool.push_back(*r.reference_summary);
          ReplayGenerator gen(std::move(pool), cfg.seed);
          res = run_pipeline(table, r.title, gen, *b.backend, cfg, gen_prompt);
        }
        j = to_json(res);
      } catch (const PipelineDegenerate& e) {
        j = {{"error", e.what()}};
        ++degenerate;
      }
      j["run_id"] = run_id;
      j["id"] = r.id;
      j["table_source"] = actual_source(r, opts.table_source);
      lines[i] = std::move(j);
    });

    std::vector<std::string> out;
    for (const auto& j : lines) out.push_back(j.dump());
    write_lines_atomic(opts.output, out);
    write_manifest(m, opts.output);
    err << "pipeline over " << records.size() << " examples (" << degenerate.load()
        << " degenerate)\n";
    return static_cast<int>(kExitOk);
  });
}

namespace {

struct Prediction {
  std::string id;
  std::vector<double> sentence_scores;
  double faithfulness = 0.0;
  std::optional<double> bleu;
  std::optional<double> parent;
};

std::vector<Prediction> load_predictions(const std::filesystem::path& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read predictions " + path.string());
  std::vector<Prediction> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      for (const auto& s : j.at("sentences")) p.sentence_scores.push_back(s.at("score").get<double>());
      p.faithfulness = j.at("faithfulness").get<double>();
      if (j.contains("bleu")) p.bleu = j["bleu"].get<double>();
      if (j.contains("parent")) p.parent = j["parent"].get<double>();
      if (!seen.insert(p.id).second) throw InvalidRecord("duplicate id " + p.id);
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      err << path.filename().string() << ":" << line_no << ": skipped: " << e.what() << '\n';
    }
  }
  if (out.empty()) throw AllLinesMalformed("no usable prediction in " + path.string());
  return out;
}

json evaluate_metric(const LabeledScores& data, double threshold, bool sweep,
                     const std::filesystem::path& pr_path) {
  json j{{"classification", to_json(classify_metrics(data, threshold))}};
  std::vector<double> labels(data.labels.begin(), data.labels.end());
  if (data.size() >= 3) {
    j["correlation"] = to_json(pearson_with_p(data.scores, labels));
    if (sweep) {
      const SweepResult s = sweep_threshold(data.scores, data.labels);
      j["sweep"] = to_json(s);
      j["classification_at_sweep"] = to_json(classify_metrics(data, s.threshold));
    }
  } else {
    j["correlation"] = nullptr;
  }
  write_text_atomic(pr_path, pr_curve_csv(precision_recall_curve(data)));
  j["pr_curve"] = pr_path.filename().string();
  return j;
}

}  // namespace

int cmd_metaeval(const MetaevalOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const auto preds = load_predictions(opts.predictions, err);
    if (!std::filesystem::is_regular_file(opts.annotations))
      throw IoError("annotations not found: " + opts.annotations.string());
    const auto ann = load_annotations(opts.annotations);
    for (const auto& e : ann.errors)
      err << opts.annotations.filename().string() << ":" << e.line << ": skipped: " << e.message << '\n';

    std::set<std::string> wanted(opts.metrics.begin(), opts.metrics.end());
    if (wanted.empty()) wanted = {"critic", "noop", "bleu", "parent"};
    for (const auto& w : wanted)
      if (w != "critic" && w != "noop" && w != "bleu" && w != "parent")
        throw std::invalid_argument("unknown metric '" + w + "'");

    std::map<std::string, std::size_t> pred_index;
    for (std::size_t i = 0; i < preds.size(); ++i) pred_index[preds[i].id] = i;

    // (example, sentence) -> entailed votes, and distinct raters per sentence.
    std::map<std::pair<std::string, std::size_t>, std::vector<int>> votes;
    std::set<std::string> offending;
    for (const auto& a : ann.records) {
      const auto it = pred_index.find(a.example_id);
      if (it == pred_index.end()) {
        offending.insert(a.example_id);
      } else if (a.sentence_index >= preds[it->second].sentence_scores.size()) {
        offending.insert(a.example_id + "#" + std::to_string(a.sentence_index));
      } else {
        votes[{a.example_id, a.sentence_index}].push_back(a.entailed ? 1 : 0);
      }
    }
    if (!offending.empty())
      throw IdMismatch("annotations reference unknown predictions: " +
                       join(std::vector<std::string>(offending.begin(), offending.end()), ", "));

    auto majority = [](const std::vector<int>& v) {
      const auto yes = std::count(v.begin(), v.end(), 1);
      return 2 * yes > static_cast<std::ptrdiff_t>(v.size()) ? 1 : 0;
    };

    LabeledScores sent_critic, sent_noop;
    LabeledScores sum_critic, sum_noop, sum_bleu, sum_parent;
    bool have_bleu = true, have_parent = true;
    std::size_t unannotated = 0;
    for (const auto& p : preds) {
      std::vector<int> labels;
      for (std::size_t s = 0; s < p.sentence_scores.size(); ++s) {
        const auto v = votes.find({p.id, s});
        if (v == votes.end()) continue;
        const int label = majority(v->second);
        labels.push_back(label);
        const std::string item = p.id + "#" + std::to_string(s);
        sent_critic.scores.push_back(p.sentence_scores[s]);
        sent_noop.scores.push_back(1.0);
        for (auto* d : {&sent_critic, &sent_noop}) {
          d->labels.push_back(label);
          d->item_ids.push_back(item);
        }
      }
      if (labels.empty()) {
        ++unannotated;
        continue;
      }
      if (labels.size() != p.sentence_scores.size()) continue;  // partially rated
      const int label = summary_label_from_sentences(labels);
      sum_critic.scores.push_back(p.faithfulness);
      sum_noop.scores.push_back(1.0);
      have_bleu = have_bleu && p.bleu.has_value();
      have_parent = have_parent && p.parent.has_value();
      sum_bleu.scores.push_back(p.bleu.value_or(0.0));
      sum_parent.scores.push_back(p.parent.value_or(0.0));
      for (auto* d : {&sum_critic, &sum_noop, &sum_bleu, &sum_parent}) {
        d->labels.push_back(label);
        d->item_ids.push_back(p.id);
      }
    }

    RunManifest m;
    m.command = "metaeval";
    m.config = {{"metrics", std::vector<std::string>(wanted.begin(), wanted.end())},
                {"sweep", opts.sweep},
                {"sentence_threshold", opts.sentence_threshold},
                {"summary_threshold", opts.summary_threshold},
                {"baseline_threshold", opts.baseline_threshold}};
    m.inputs = {digest_file(opts.predictions), digest_file(opts.annotations)};
    m.outputs = {opts.output.filename().string()};

    std::filesystem::path pr_dir = opts.output.parent_path() / (opts.output.stem().string() + ".pr");
    json levels = json::object();
    auto level = [&](const char* name, std::vector<std::tuple<std::string, LabeledScores*, double, bool>> metrics) {
      json lj = json::object();
      const LabeledScores* any = std::get<1>(metrics.front());
      lj["n"] = any->size();
      if (any->size() == 0) {
        lj["metrics"] = json::object();
        levels[name] = lj;
        return;
      }
      lj["base_rate"] = static_cast<double>(std::count(any->labels.begin(), any->labels.end(), 1)) /
                        static_cast<double>(any->size());
      json mj = json::object();
      for (auto& [metric, data, threshold, available] : metrics) {
        if (!wanted.count(metric)) continue;
        if (!available) {
          mj[metric] = {{"skipped", "scores missing for some examples"}};
          continue;
        }
        mj[metric] = evaluate_metric(*data, threshold, opts.sweep,
                                     pr_dir / (std::string(name) + "_" + metric + ".csv"));
        m.outputs.push_back(pr_dir.filename().string() + "/" + std::string(name) + "_" + metric + ".csv");
      }
      lj["metrics"] = mj;
      levels[name] = lj;
    };
    level("sentence", {{"critic", &sent_critic, opts.sentence_threshold, true},
                       {"noop", &sent_noop, opts.sentence_threshold, true}});
    level("summary", {{"critic", &sum_critic, opts.summary_threshold, true},
                      {"noop", &sum_noop, opts.sentence_threshold, true},
                      {"bleu", &sum_bleu, opts.baseline_threshold, have_bleu},
                      {"parent", &sum_parent, opts.baseline_threshold, have_parent}});

    // Inter-rater agreement on the first two raters of each doubly-rated sentence.
    std::map<std::pair<std::string, std::size_t>, std::vector<const AnnotationRecord*>> by_item;
    for (const auto& a : ann.records) {
      auto& v = by_item[{a.example_id, a.sentence_index}];
      if (v.size() < 2 && (v.empty() || v.front()->rater_id != a.rater_id)) v.push_back(&a);
    }
    std::vector<int> ka, kb;
    for (const auto& [k, v] : by_item)
      if (v.size() == 2) {
        ka.push_back(v[0]->entailed);
        kb.push_back(v[1]->entailed);
      }

    json report{{"levels", levels},
                {"unannotated_predictions", unannotated},
                {"agreement", {{"items", ka.size()},
                               {"entailed", ka.empty() ? json(nullptr) : to_json(cohens_kappa(ka, kb))}}}};
    report["run_id"] = m.run_id();
    write_text_atomic(opts.output, report.dump(2) + "\n");
    write_manifest(m, opts.output);
    err << "metaeval: " << sent_critic.size() << " sentences, " << sum_critic.size() << " summaries\n";
    return static_cast<int>(kExitOk);
  });
}

namespace {
std::atomic<httplib::Server*> g_server{nullptr};
extern "C" void stop_server(int) {
  if (auto* s = g_server.load()) s->stop();
}
}  // namespace

int cmd_serve(const ServeOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    auto records = load_records(opts.dataset, err);
    AnnotationService service(std::move(records), opts.output, opts.overlap);
    httplib::Server server;
    service.mount(server, opts.static_dir);
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    err << "serving " << service.num_tasks() << " tasks on http://" << opts.host << ":" << opts.port
        << '\n';
    const bool ok = server.listen(opts.host, opts.port);
    g_server = nullptr;
    if (!ok) throw IoError("cannot listen on " + opts.host + ":" + std::to_string(opts.port));
    return static_cast<int>(kExitOk);
  });
}

}  // namespace chats
