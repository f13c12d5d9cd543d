#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "chats/baselines.hpp"
#include "chats/critic.hpp"
#include "chats/datastore.hpp"
#include "chats/errors.hpp"
#include "chats/metaeval.hpp"
#include "chats/oracle.hpp"
#include "chats/pipeline.hpp"

namespace py = pybind11;
using namespace chats;

namespace {

// Python-facing critic: owns its backend and the client the backend borrows.
struct Critic {
  std::shared_ptr<CompletionClient> client;
  std::unique_ptr<EntailmentBackend> backend;
  CriticConfig config;
};

Table as_table(const py::object& t) {
  if (py::isinstance<py::str>(t)) return parse_linearized(t.cast<std::string>()).table;
  return t.cast<Table>();
}

TableFormat format_from(const std::string& name) {
  if (name == "linearized") return TableFormat::linearized;
  if (name == "tsv") return TableFormat::tsv;
  throw std::invalid_argument("format must be 'linearized' or 'tsv'");
}

std::vector<std::string> sentence_texts(const Summary& s) {
  std::vector<std::string> out;
  for (const auto& sent : s.sentences) out.push_back(sent.text);
  return out;
}

LabeledScores labeled(std::vector<double> scores, std::vector<int> labels) {
  LabeledScores d{std::move(scores), std::move(labels), {}};
  d.validate();
  return d;
}

std::shared_ptr<CompletionClient> callable_client(py::function fn) {
  // The last reference may be dropped from a worker thread.
  std::shared_ptr<py::function> guarded(new py::function(std::move(fn)), [](py::function* f) {
    py::gil_scoped_acquire gil;
    delete f;
  });
  return std::make_shared<FunctionClient>([guarded](const CompletionRequest& r) {
    py::gil_scoped_acquire gil;
    try {
      py::object out = (*guarded)(r.prompt, r.temperature, r.sample_seed);
      return Completion{out.cast<std::string>(), false, false};
    } catch (py::error_already_set& e) {
      throw BackendUnavailable(std::string("completion callable raised: ") + e.what());
    }
  });
}

}  // namespace

PYBIND11_MODULE(_chats, m) {
  m.doc() = "Table-grounded faithfulness scoring for chart summaries";
  m.attr("__version__") = "0.1.0";

  auto& base = py::register_exception<Error>(m, "ChatsError", PyExc_RuntimeError);
  py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
  py::register_exception<MalformedTitle>(m, "MalformedTitle", base.ptr());
  py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());
  py::register_exception<EmptyCandidate>(m, "EmptyCandidate", base.ptr());
  py::register_exception<TemplateError>(m, "TemplateError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<AllLinesMalformed>(m, "AllLinesMalformed", base.ptr());
  py::register_exception<DuplicateRating>(m, "DuplicateRating", base.ptr());
  py::register_exception<InvalidRecord>(m, "InvalidRecord", base.ptr());
  py::register_exception<IdMismatch>(m, "IdMismatch", base.ptr());
  py::register_exception<PipelineDegenerate>(m, "PipelineDegenerate", base.ptr());
  auto& unavailable = py::register_exception<BackendUnavailable>(m, "BackendUnavailable", base.ptr());
  py::register_exception<CacheMiss>(m, "CacheMiss", unavailable.ptr());
  py::register_exception<AuthError>(m, "AuthError", unavailable.ptr());

  // Tables
  py::class_<Table>(m, "Table")
      .def_readwrite("title", &Table::title)
      .def_readwrite("headers", &Table::headers)
      .def_property_readonly("rows",
                             [](const Table& t) {
                               std::vector<std::vector<std::string>> rows;
                               for (const auto& r : t.rows) {
                                 auto& out = rows.emplace_back();
                                 for (const auto& c : r) out.push_back(c.raw());
                               }
                               return rows;
                             })
      .def_property_readonly("source", [](const Table& t) { return std::string(to_string(t.source)); })
      .def_property_readonly("num_rows", &Table::num_rows)
      .def_property_readonly("num_columns", &Table::num_columns)
      .def("serialize", [](const Table& t, const std::string& f) { return serialize(t, format_from(f)); },
           py::arg("format") = "linearized")
      .def("__eq__", [](const Table& a, const Table& b) { return a == b; })
      .def("__repr__", [](const Table& t) {
        return "<Table " + std::to_string(t.num_rows()) + "x" + std::to_string(t.num_columns()) + ">";
      });

  m.def("parse_table",
        [](const std::string& text, const std::string& format) { return parse_table(text, format_from(format)).table; },
        py::arg("text"), py::arg("format") = "linearized");
  m.def("table_warnings",
        [](const std::string& text, const std::string& format) { return parse_table(text, format_from(format)).warnings; },
        py::arg("text"), py::arg("format") = "linearized");

  // Text
  m.def("segment", [](const std::string& text) { return sentence_texts(segment(text)); }, py::arg("text"));
  m.def("tokenize", &tokenize, py::arg("text"));

  // Oracle
  m.def(
      "oracle_check",
      [](const std::string& sentence, const py::object& table, bool permissive) {
        const auto r = oracle_check(sentence, as_table(table), permissive ? OracleMode::permissive : OracleMode::strict);
        py::dict d;
        d["score"] = r.score;
        d["kind"] = std::string(to_string(r.parse.kind));
        d["verified"] = r.parse.verified;
        d["note"] = r.parse.note;
        return d;
      },
      py::arg("sentence"), py::arg("table"), py::arg("permissive") = false);

  // Completion clients
  py::class_<CompletionClient, std::shared_ptr<CompletionClient>>(m, "Client")
      .def_static(
          "endpoint",
          [](const std::string& url, const std::string& cache_dir, bool cache_only, const std::string& api_key,
             int retry_attempts, int retry_base_ms, int timeout_seconds) {
            ClientConfig c;
            c.endpoint_url = url;
            c.cache_dir = cache_dir;
            c.cache_only = cache_only;
            c.api_key = api_key;
            c.retry.max_attempts = retry_attempts;
            c.retry.base_delay = std::chrono::milliseconds(retry_base_ms);
            c.timeout = std::chrono::seconds(timeout_seconds);
            return std::shared_ptr<CompletionClient>(std::make_shared<LlmClient>(std::move(c)));
          },
          py::arg("url") = "", py::kw_only(), py::arg("cache_dir") = "", py::arg("cache_only") = false,
          py::arg("api_key") = "", py::arg("retry_attempts") = 5, py::arg("retry_base_ms") = 1000,
          py::arg("timeout_seconds") = 60)
      .def_static("from_callable", &callable_client, py::arg("fn"),
                  "Wraps fn(prompt, temperature, seed) -> str.")
      .def(
          "complete",
          [](CompletionClient& c, const std::string& prompt, double temperature, std::int64_t seed, int max_tokens) {
            CompletionRequest r;
            r.prompt = prompt;
            r.temperature = temperature;
            r.sample_seed = seed;
            r.max_tokens = max_tokens;
            return c.complete(r).text;
          },
          py::arg("prompt"), py::arg("temperature") = 0.0, py::arg("seed") = 0, py::arg("max_tokens") = 512,
          py::call_guard<py::gil_scoped_release>());

  // Critic
  py::class_<ScoredSummary>(m, "ScoredSummary")
      .def_property_readonly("text", [](const ScoredSummary& s) { return s.summary.text; })
      .def_property_readonly("sentences", [](const ScoredSummary& s) { return sentence_texts(s.summary); })
      .def_readonly("sentence_scores", &ScoredSummary::sentence_scores)
      .def_readonly("kept_mask", &ScoredSummary::kept_mask)
      .def_readonly("threshold", &ScoredSummary::threshold)
      .def_readonly("faithfulness", &ScoredSummary::faithfulness)
      .def_readonly("empty_summary", &ScoredSummary::empty_summary)
      .def_property_readonly("kept_count", &ScoredSummary::kept_count)
      .def_property_readonly("mean_score", &ScoredSummary::mean_score)
      .def_property_readonly("rationales", [](const ScoredSummary& s) {
        std::vector<std::vector<std::string>> out;
        for (const auto& per : s.verdicts) {
          auto& row = out.emplace_back();
          for (const auto& v : per) row.push_back(v.rationale);
        }
        return out;
      });

  py::class_<RepairedSummary>(m, "RepairedSummary")
      .def_property_readonly("text", [](const RepairedSummary& r) { return r.summary.text; })
      .def_property_readonly("sentences", [](const RepairedSummary& r) { return sentence_texts(r.summary); })
      .def_property_readonly("dropped",
                             [](const RepairedSummary& r) {
                               std::vector<std::tuple<std::size_t, double, std::string>> out;
                               for (const auto& d : r.dropped) out.emplace_back(d.index, d.score, d.text);
                               return out;
                             })
      .def_readonly("faithfulness_post", &RepairedSummary::faithfulness_post);

  py::class_<Critic, std::shared_ptr<Critic>>(m, "Critic")
      .def_static(
          "oracle",
          [](bool permissive, double threshold) {
            auto c = std::make_shared<Critic>();
            c->backend = std::make_unique<OracleBackend>(permissive ? OracleMode::permissive : OracleMode::strict);
            c->config.threshold = threshold;
            c->config.validate();
            return c;
          },
          py::arg("permissive") = false, py::arg("threshold") = 0.75)
      .def_static(
          "llm",
          [](std::shared_ptr<CompletionClient> client, double threshold, int k, double temperature,
             std::int64_t seed, std::string model_id, int jobs) {
            auto c = std::make_shared<Critic>();
            c->config.threshold = threshold;
            c->config.ensemble_size = k;
            c->config.sample_temperature = temperature;
            c->config.seed = seed;
            c->config.model_id = std::move(model_id);
            c->config.jobs = jobs;
            c->config.validate();
            c->client = std::move(client);
            c->backend = std::make_unique<LlmBackend>(*c->client, c->config);
            return c;
          },
          py::arg("client"), py::kw_only(), py::arg("threshold") = 0.75, py::arg("k") = 8,
          py::arg("temperature") = 0.3, py::arg("seed") = 0, py::arg("model_id") = "", py::arg("jobs") = 4)
      .def_property_readonly("name", [](const Critic& c) { return c.backend->name(); })
      .def_property_readonly("threshold", [](const Critic& c) { return c.config.threshold; })
      .def(
          "score",
          [](const Critic& c, const std::string& summary, const py::object& table, const std::string& title) {
            const Table t = as_table(table);
            py::gil_scoped_release release;
            return score_summary(summary, t, title, *c.backend, c.config);
          },
          py::arg("summary"), py::arg("table"), py::arg("title") = "")
      .def(
          "score_sentence",
          [](const Critic& c, const std::string& sentence, const py::object& table, const std::string& title) {
            const Table t = as_table(table);
            py::gil_scoped_release release;
            return c.backend->score(Sentence{sentence, 0, 0, sentence.size()}, t, title).score;
          },
          py::arg("sentence"), py::arg("table"), py::arg("title") = "");

  m.def("summary_faithfulness", &summary_faithfulness, py::arg("scores"), py::arg("threshold") = 0.75);
  m.def("repair", &repair, py::arg("scored"));

  // Pipeline
  py::class_<RankedResult>(m, "PipelineResult")
      .def_property_readonly("final_text", [](const RankedResult& r) { return r.final_summary.text; })
      .def_readonly("winner", &RankedResult::winner)
      .def_readonly("ranking", &RankedResult::ranking)
      .def_readonly("final_repaired", &RankedResult::final_repaired)
      .def_readonly("warnings", &RankedResult::warnings)
      .def_property_readonly("stages", [](const RankedResult& r) { return r.stages.to_string(); })
      .def_property_readonly("candidates",
                             [](const RankedResult& r) {
                               std::vector<std::string> out;
                               for (const auto& c : r.candidates) out.push_back(c.candidate.text);
                               return out;
                             })
      .def_property_readonly("scored",
                             [](const RankedResult& r) {
                               std::vector<ScoredSummary> out;
                               for (const auto& c : r.candidates) out.push_back(c.scored);
                               return out;
                             })
      .def(
          "ablation_view",
          [](const RankedResult& r, int stage) {
            std::vector<std::tuple<std::size_t, std::size_t, std::string, bool>> out;
            for (const auto& s : ablation_view(r, stage))
              out.emplace_back(s.candidate, s.sentence, s.text, s.predicted_kept);
            return out;
          },
          py::arg("stage"));

  m.def(
      "run_pipeline",
      [](const py::object& table, std::shared_ptr<CompletionClient> generator, std::shared_ptr<Critic> critic,
         const std::string& title, int num_candidates, const std::string& stages, std::int64_t seed,
         double temperature) {
        const Table t = as_table(table);
        PipelineConfig config;
        config.num_candidates = num_candidates;
        config.stages = StageMask::parse(stages);
        config.seed = seed;
        config.generation_temperature = temperature;
        config.critic = critic->config;
        py::gil_scoped_release release;
        return run_pipeline(t, title, *generator, *critic->backend, config);
      },
      py::arg("table"), py::arg("generator"), py::arg("critic"), py::kw_only(), py::arg("title") = "",
      py::arg("num_candidates") = 10, py::arg("stages") = "all", py::arg("seed") = 0, py::arg("temperature") = 0.7);

  // Meta-evaluation
  py::class_<ClassifierReport>(m, "ClassifierReport")
      .def_readonly("accuracy", &ClassifierReport::accuracy)
      .def_readonly("balanced_accuracy", &ClassifierReport::balanced_accuracy)
      .def_readonly("precision", &ClassifierReport::precision)
      .def_readonly("recall", &ClassifierReport::recall)
      .def_readonly("f1", &ClassifierReport::f1)
      .def_readonly("auc", &ClassifierReport::auc)
      .def_readonly("threshold", &ClassifierReport::threshold)
      .def_readonly("single_class", &ClassifierReport::single_class)
      .def_readonly("auc_undefined", &ClassifierReport::auc_undefined)
      .def_property_readonly("counts", [](const ClassifierReport& r) {
        py::dict d;
        d["tp"] = r.counts.tp;
        d["fp"] = r.counts.fp;
        d["tn"] = r.counts.tn;
        d["fn"] = r.counts.fn;
        return d;
      });
  py::class_<CorrelationReport>(m, "CorrelationReport")
      .def_readonly("pearson", &CorrelationReport::pearson)
      .def_readonly("p_value", &CorrelationReport::p_value)
      .def_readonly("n", &CorrelationReport::n)
      .def_readonly("threshold", &CorrelationReport::threshold)
      .def_readonly("degenerate_variance", &CorrelationReport::degenerate_variance);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("threshold", &SweepResult::threshold)
      .def_readonly("report", &SweepResult::report)
      .def_readonly("degenerate", &SweepResult::degenerate)
      .def_readonly("candidates_tried", &SweepResult::candidates_tried);
  py::class_<KappaResult>(m, "KappaResult")
      .def_readonly("kappa", &KappaResult::kappa)
      .def_readonly("observed", &KappaResult::observed)
      .def_readonly("expected", &KappaResult::expected)
      .def_readonly("undefined", &KappaResult::undefined);

  m.def(
      "classify_metrics",
      [](std::vector<double> s, std::vector<int> l, double threshold) {
        return classify_metrics(labeled(std::move(s), std::move(l)), threshold);
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold"));
  m.def(
      "auc", [](std::vector<double> s, std::vector<int> l) { return auc(labeled(std::move(s), std::move(l))).value; },
      py::arg("scores"), py::arg("labels"));
  m.def("pearson", &pearson_with_p, py::arg("x"), py::arg("y"));
  m.def("sweep_threshold", &sweep_threshold, py::arg("scores"), py::arg("human_binary"));
  m.def(
      "precision_recall_curve",
      [](std::vector<double> s, std::vector<int> l) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : precision_recall_curve(labeled(std::move(s), std::move(l))))
          out.emplace_back(p.threshold, p.precision, p.recall);
        return out;
      },
      py::arg("scores"), py::arg("labels"));
  m.def("cohens_kappa", py::overload_cast<const std::vector<int>&, const std::vector<int>&>(&cohens_kappa),
        py::arg("a"), py::arg("b"));
  m.def("cohens_kappa",
        py::overload_cast<const std::vector<std::string>&, const std::vector<std::string>&>(&cohens_kappa),
        py::arg("a"), py::arg("b"));
  m.def("student_t_cdf", &student_t_cdf, py::arg("t"), py::arg("df"));

  // Baselines
  m.def("bleu", &bleu, py::arg("candidate"), py::arg("references"), py::arg("max_order") = 4);
  m.def("corpus_bleu", &corpus_bleu, py::arg("candidates"), py::arg("references"), py::arg("max_order") = 4);
  m.def(
      "parent",
      [](const std::string& c, const std::string& r, const py::object& t, double lambda) {
        const auto p = parent_detail(c, r, as_table(t), lambda);
        py::dict d;
        d["precision"] = p.precision;
        d["reference_recall"] = p.reference_recall;
        d["table_recall"] = p.table_recall;
        d["recall"] = p.recall;
        d["f"] = p.f;
        return d;
      },
      py::arg("candidate"), py::arg("reference"), py::arg("table"), py::arg("lambda_") = 0.5);

  // Data
  py::class_<ExampleRecord>(m, "Example")
      .def_readonly("id", &ExampleRecord::id)
      .def_readonly("title", &ExampleRecord::title)
      .def_readonly("table", &ExampleRecord::table)
      .def_readonly("derendered_table", &ExampleRecord::derendered_table)
      .def_readonly("reference_summary", &ExampleRecord::reference_summary)
      .def_readonly("candidate_summaries", &ExampleRecord::candidate_summaries)
      .def_property_readonly("source", [](const ExampleRecord& r) { return std::string(to_string(r.source)); });
  m.def(
      "load_dataset",
      [](const std::filesystem::path& path) {
        auto r = load_dataset(path);
        std::vector<std::pair<std::size_t, std::string>> errors;
        for (const auto& e : r.errors) errors.emplace_back(e.line, e.message);
        return std::make_pair(std::move(r.records), std::move(errors));
      },
      py::arg("path"), "Returns (examples, [(line, message), ...]).");
}
