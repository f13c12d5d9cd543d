// chats: score, pipeline, metaeval, serve.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "chats/app/commands.hpp"

namespace {

using namespace chats;

void add_endpoint(CLI::App* cmd, EndpointOptions& e) {
  cmd->add_option("--config", e.config_file, "key = value config file");
  cmd->add_option("--endpoint", e.endpoint_url, "chat-completion URL");
  cmd->add_option("--cache-dir", e.cache_dir, "completion cache directory");
  cmd->add_flag("--cache-only", e.cache_only, "never call the endpoint");
  cmd->add_option("--model", e.model_id, "model id sent to the endpoint");
  cmd->add_option("--retry-base-ms", e.retry_base_ms, "first retry delay");
}

void add_critic(CLI::App* cmd, CriticOptions& c) {
  cmd->add_option("--backend", c.backend, "oracle | llm")->check(CLI::IsMember({"oracle", "llm"}));
  cmd->add_option("--threshold", c.critic.threshold, "keep a sentence iff f(s) > threshold");
  cmd->add_option("-K,--ensemble-size", c.critic.ensemble_size, "critic samples per sentence");
  cmd->add_option("--temperature", c.critic.sample_temperature, "critic sampling temperature");
  cmd->add_option("--critic-seed", c.critic.seed, "seed of the first critic sample");
  cmd->add_option("--critic-template", c.critic_template, "critic prompt file");
  cmd->add_option("--critic-jobs", c.critic.jobs, "sentences scored concurrently");
  cmd->add_option_function<std::string>(
         "--oracle-mode",
         [&c](const std::string& v) {
           c.oracle_mode = v == "permissive" ? OracleMode::permissive : OracleMode::strict;
         },
         "strict | permissive")
      ->check(CLI::IsMember({"strict", "permissive"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chart summary faithfulness: critic, pipeline, meta-evaluation, annotation"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* s = app.add_subcommand("score", "score summaries sentence by sentence");
  s->add_option("-i,--input", score.input, "dataset JSONL")->required();
  s->add_option("-o,--output", score.output, "report JSONL")->required();
  std::string score_source = "gold";
  s->add_option("--table-source", score_source, "gold | derendered")->check(CLI::IsMember({"gold", "derendered"}));
  s->add_option("-j,--jobs", score.jobs, "examples in flight");
  add_critic(s, score.critic);
  add_endpoint(s, score.endpoint);

  PipelineOptions pipe;
  std::string stages = "all";
  auto* p = app.add_subcommand("pipeline", "generate, repair, rank and filter summaries");
  p->add_option("-i,--input", pipe.input, "dataset JSONL")->required();
  p->add_option("-o,--output", pipe.output, "results JSONL")->required();
  std::string pipe_source = "gold";
  p->add_option("--table-source", pipe_source, "gold | derendered")->check(CLI::IsMember({"gold", "derendered"}));
  p->add_option("-N,--num-candidates", pipe.pipeline.num_candidates, "candidates per example");
  p->add_option("--gen-temperature", pipe.pipeline.generation_temperature, "generation temperature");
  p->add_option("--seed", pipe.pipeline.seed, "seed of the first candidate");
  p->add_option("--stages", stages, "e.g. S1,S2,S3,S4 or all");
  p->add_option("--generator", pipe.generator, "dataset | llm")->check(CLI::IsMember({"dataset", "llm"}));
  p->add_option("--generator-template", pipe.generator_template, "generator prompt file");
  p->add_option("-j,--jobs", pipe.jobs, "examples in flight");
  add_critic(p, pipe.critic);
  add_endpoint(p, pipe.endpoint);

  MetaevalOptions meta;
  std::string metrics;
  auto* m = app.add_subcommand("metaeval", "compare metric scores with human labels");
  m->add_option("-p,--predictions", meta.predictions, "score report JSONL")->required();
  m->add_option("-a,--annotations", meta.annotations, "annotation JSONL")->required();
  m->add_option("-o,--output", meta.output, "report JSON")->required();
  m->add_option("--metrics", metrics, "comma list of critic,noop,bleu,parent");
  m->add_flag("--sweep", meta.sweep, "select thresholds by min p then max r");
  m->add_option("--sentence-threshold", meta.sentence_threshold);
  m->add_option("--summary-threshold", meta.summary_threshold);
  m->add_option("--baseline-threshold", meta.baseline_threshold);

  ServeOptions serve;
  auto* v = app.add_subcommand("serve", "annotation HTTP service");
  v->add_option("-d,--dataset", serve.dataset, "dataset JSONL")->required();
  v->add_option("-o,--output", serve.output, "annotation JSONL")->required();
  v->add_option("--host", serve.host);
  v->add_option("--port", serve.port);
  v->add_option("--static", serve.static_dir, "UI directory");
  v->add_option("--overlap", serve.overlap, "fraction of examples shown to every rater");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  score.table_source = *table_source_from_string(score_source);
  pipe.table_source = *table_source_from_string(pipe_source);
  if (*s) return cmd_score(score, std::cerr);
  if (*p) {
    try {
      pipe.pipeline.stages = StageMask::parse(stages);
    } catch (const std::exception& e) {
      std::cerr << "input error: " << e.what() << '\n';
      return kExitInput;
    }
    return cmd_pipeline(pipe, std::cerr);
  }
  if (*m) {
    std::stringstream ss(metrics);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) meta.metrics.push_back(item);
    return cmd_metaeval(meta, std::cerr);
  }
  if (*v) return cmd_serve(serve, std::cerr);
  return kExitInput;
}
