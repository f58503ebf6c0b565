#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgrag/answer.hpp"
#include "sgrag/chunks.hpp"
#include "sgrag/config.hpp"
#include "sgrag/embedder.hpp"
#include "sgrag/errors.hpp"
#include "sgrag/evaluation.hpp"
#include "sgrag/prompt.hpp"
#include "sgrag/relation_model.hpp"
#include "sgrag/remote.hpp"
#include "sgrag/scene_graph.hpp"
#include "sgrag/util.hpp"
#include "sgrag/vector_index.hpp"

namespace {

using namespace sgrag;

bool g_verbose = false;

void log_line(const char* level, const std::string& message) {
  std::fprintf(stderr, "level=%s msg=\"%s\"\n", level, message.c_str());
}

void log_info(const std::string& message) { log_line("info", message); }
void log_warn(const std::string& message) { log_line("warn", message); }
void log_error(const std::string& message) { log_line("error", message); }
void log_debug(const std::string& message) {
  if (g_verbose) log_line("debug", message);
}

// Registers an option that lands in the raw flag map only when supplied, so
// resolve_config can apply flags > env > file > defaults.
class FlagBinder {
 public:
  FlagBinder(CLI::App* cmd, std::map<std::string, std::string>* flags)
      : cmd_(cmd), flags_(flags) {}

  void option(const std::string& flag, const std::string& key, const std::string& desc) {
    auto* flags = flags_;
    cmd_->add_option_function<std::string>(
        flag, [flags, key](const std::string& value) { (*flags)[key] = value; }, desc);
  }

  void toggle(const std::string& flag, const std::string& key, const std::string& desc) {
    auto* flags = flags_;
    cmd_->add_flag_callback(
        flag, [flags, key] { (*flags)[key] = "true"; }, desc);
  }

 private:
  CLI::App* cmd_;
  std::map<std::string, std::string>* flags_;
};

struct CommandState {
  std::map<std::string, std::string> flags;
  std::string config_path;
};

void add_common_options(CLI::App* cmd, CommandState* state) {
  cmd->add_option("--config", state->config_path, "key = value configuration file");
  cmd->add_flag_callback("-v,--verbose", [] { g_verbose = true; },
                         "debug logging to stderr");
  FlagBinder binder(cmd, &state->flags);
  binder.option("--seed", "seed", "deterministic seed (default 42)");
  binder.option("--jobs", "jobs", "worker pool size");
  binder.toggle("--dry-run", "dry-run", "validate inputs and config, write nothing");
}

RunConfig resolve(const CommandState& state) {
  std::map<std::string, std::string> file_values;
  if (!state.config_path.empty()) {
    file_values = parse_config_file(state.config_path);
  }
  RunConfig cfg = resolve_config(state.flags, system_env(), file_values);
  for (const auto& [key, value] : cfg.resolved) {
    bool secret = key == "embed.api-key" || key == "llm.api-key";
    log_debug("config " + key + "=" + (secret && !value.empty() ? "***" : value));
  }
  return cfg;
}

Dataset load_dataset_from_cfg(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) {
    throw Error(ErrorCode::usage, "--dataset is required");
  }
  Dataset dataset = load_dataset(cfg.dataset_path,
                                 dataset_format_from_name(cfg.dataset_format),
                                 adapter_from_name(cfg.adapter));
  for (const auto& warning : dataset.warnings) {
    log_warn(warning);
  }
  log_debug("loaded " + std::to_string(dataset.graphs.size()) + " scene graph(s)");
  return dataset;
}

// Replaces annotated relations with penet-toy inferences when requested.
void apply_relation_model(Dataset& dataset, const RunConfig& cfg) {
  if (cfg.relation_model != "penet-toy") {
    return;
  }
  ModelDims dims;
  ModelWeights weights = cfg.weights_path.empty()
                             ? ModelWeights::seeded(dims, cfg.seed)
                             : load_weights(cfg.weights_path);
  dims = weights.dims;

  std::set<std::string> entity_labels;
  std::set<std::string> predicate_labels;
  for (const auto& graph : dataset.graphs) {
    for (const auto& object : graph.objects) entity_labels.insert(object.category_label);
    for (const auto& predicate : graph.predicate_set()) predicate_labels.insert(predicate);
  }

  PrototypeTable prototypes;
  prototypes.dimension = dims.d_t;
  if (!cfg.entity_prototypes_path.empty()) {
    prototypes.entity_prototypes = load_prototype_vectors(cfg.entity_prototypes_path);
  }
  if (!cfg.predicate_prototypes_path.empty()) {
    prototypes.predicate_prototypes = load_prototype_vectors(cfg.predicate_prototypes_path);
  }
  for (const auto& label : entity_labels) {
    if (!prototypes.entity_prototypes.count(label)) {
      if (!cfg.entity_prototypes_path.empty()) {
        throw Error(ErrorCode::vocabulary,
                    "entity prototype file lacks label '" + label + "'");
      }
      prototypes.entity_prototypes.emplace(label,
                                           pseudo_prototype(label, dims.d_t, cfg.seed));
    }
  }
  if (prototypes.predicate_prototypes.empty()) {
    if (predicate_labels.empty()) {
      throw Error(ErrorCode::config,
                  "penet-toy needs predicate prototypes or observed predicates");
    }
    for (const auto& label : predicate_labels) {
      prototypes.predicate_prototypes.emplace(
          label, pseudo_prototype("p:" + label, dims.d_t, cfg.seed));
    }
  }

  for (auto& graph : dataset.graphs) {
    graph.relations =
        infer_relations(graph, weights, prototypes, cfg.relation_threshold, cfg.seed);
    log_debug("penet-toy: " + graph.image_id + " -> " +
              std::to_string(graph.relations.size()) + " relation(s)");
  }
}

std::unique_ptr<Embedder> embedder_from_cfg(const RunConfig& cfg) {
  if (cfg.embedder == "remote") {
    RemoteEndpoint endpoint;
    endpoint.url = cfg.embed_url;
    endpoint.model = cfg.embed_model;
    endpoint.api_key = cfg.embed_api_key;
    endpoint.timeout_ms = cfg.timeout_ms;
    return std::make_unique<RemoteEmbedder>(std::move(endpoint));
  }
  HashEmbedderOptions options;
  options.dimension = cfg.embed_dim;
  return std::make_unique<HashEmbedder>(options);
}

std::unique_ptr<GenerationBackend> backend_from_cfg(const RunConfig& cfg) {
  if (cfg.backend == "echo") {
    return std::make_unique<EchoBackend>();
  }
  if (cfg.backend == "scripted") {
    if (cfg.script_path.empty()) {
      throw Error(ErrorCode::usage, "--script is required with --backend scripted");
    }
    return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(cfg.script_path));
  }
  if (cfg.backend == "template") {
    return std::make_unique<TemplateFillBackend>();
  }
  RemoteEndpoint endpoint;
  endpoint.url = cfg.llm_url;
  endpoint.model = cfg.llm_model;
  endpoint.api_key = cfg.llm_api_key;
  endpoint.timeout_ms = cfg.timeout_ms;
  return std::make_unique<RemoteChatBackend>(std::move(endpoint), cfg.temperature,
                                             cfg.max_tokens);
}

PromptTemplate template_from_cfg(const RunConfig& cfg) {
  if (!cfg.prompt_head_path.empty()) {
    return PromptTemplate::from_head_file(cfg.prompt_head_path);
  }
  return PromptTemplate::with_default_head();
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text_file(cfg.out_path, text);
    log_info("wrote " + cfg.out_path);
  }
}

std::string sanitize_for_filename(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    unsigned char u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) || c == '-' || c == '_' || c == '.' ? c : '_');
  }
  return out;
}

std::vector<KnowledgeChunk> collect_chunks(const Dataset& dataset, const RunConfig& cfg) {
  std::vector<KnowledgeChunk> all;
  for (const auto& graph : dataset.graphs) {
    auto chunks = build_chunks(graph, cfg.min_score);
    all.insert(all.end(), chunks.begin(), chunks.end());
  }
  return all;
}

int cmd_ingest(const RunConfig& cfg) {
  Dataset dataset = load_dataset_from_cfg(cfg);
  std::string out;
  for (const auto& graph : dataset.graphs) {
    out += serialize_scene_graph(graph);
    out += '\n';
  }
  if (cfg.dry_run) {
    log_info("dry-run: validated " + std::to_string(dataset.graphs.size()) + " document(s)");
    return 0;
  }
  write_output(cfg, out);
  return 0;
}

int cmd_chunk(const RunConfig& cfg) {
  Dataset dataset = load_dataset_from_cfg(cfg);
  apply_relation_model(dataset, cfg);
  std::vector<KnowledgeChunk> chunks = collect_chunks(dataset, cfg);
  if (cfg.dry_run) {
    log_info("dry-run: would write " + std::to_string(chunks.size()) + " chunk(s)");
    return 0;
  }
  write_output(cfg, render_chunk_dump(chunks));
  return 0;
}

int cmd_index(const RunConfig& cfg) {
  std::vector<KnowledgeChunk> chunks;
  if (!cfg.chunks_path.empty()) {
    chunks = read_chunk_dump(cfg.chunks_path);
  } else {
    Dataset dataset = load_dataset_from_cfg(cfg);
    apply_relation_model(dataset, cfg);
    chunks = collect_chunks(dataset, cfg);
  }
  if (cfg.out_path.empty()) {
    throw Error(ErrorCode::usage, "index: --out is required");
  }
  auto embedder = embedder_from_cfg(cfg);

  if (cfg.corpus) {
    VectorIndex index = build_index(index_inputs_from_chunks(chunks, true), *embedder);
    if (cfg.dry_run) {
      log_info("dry-run: would write corpus index of " + std::to_string(index.size()) +
               " entries");
      return 0;
    }
    index.save(cfg.out_path);
    log_info("wrote " + cfg.out_path + " (" + std::to_string(index.size()) + " entries)");
    return 0;
  }

  std::map<std::string, std::vector<KnowledgeChunk>> by_image;
  for (auto& chunk : chunks) {
    by_image[chunk.image_id].push_back(std::move(chunk));
  }
  if (!cfg.dry_run) {
    std::filesystem::create_directories(cfg.out_path);
  }
  for (const auto& [image_id, image_chunks] : by_image) {
    VectorIndex index = build_index(index_inputs_from_chunks(image_chunks, false), *embedder);
    std::string path = cfg.out_path + "/" + sanitize_for_filename(image_id) + ".idx";
    if (cfg.dry_run) {
      log_info("dry-run: would write " + path);
      continue;
    }
    index.save(path);
  }
  if (!cfg.dry_run) {
    log_info("wrote " + std::to_string(by_image.size()) + " per-image index file(s) to " +
             cfg.out_path);
  }
  return 0;
}

int cmd_ask(const RunConfig& cfg) {
  if (cfg.question.empty()) {
    throw Error(ErrorCode::usage, "--question is required");
  }
  auto embedder = embedder_from_cfg(cfg);
  PromptTemplate tmpl = template_from_cfg(cfg);

  VectorIndex index;
  std::string record_image = cfg.image_id;
  if (!cfg.index_path.empty()) {
    index = VectorIndex::load(cfg.index_path);
  } else {
    Dataset dataset = load_dataset_from_cfg(cfg);
    apply_relation_model(dataset, cfg);
    if (cfg.corpus) {
      std::vector<IndexInput> inputs;
      for (const auto& graph : dataset.graphs) {
        auto graph_inputs =
            index_inputs_from_chunks(build_chunks(graph, cfg.min_score), true);
        inputs.insert(inputs.end(), graph_inputs.begin(), graph_inputs.end());
      }
      index = build_index(inputs, *embedder);
    } else {
      if (cfg.image_id.empty()) {
        throw Error(ErrorCode::usage, "--image is required without --corpus");
      }
      const SceneGraph* graph = dataset.find(cfg.image_id);
      if (graph == nullptr) {
        throw Error(ErrorCode::input, "image '" + cfg.image_id + "' not in dataset");
      }
      index = build_index(
          index_inputs_from_chunks(build_chunks(*graph, cfg.min_score), false), *embedder);
    }
  }

  if (cfg.dry_run) {
    log_info("dry-run: index ready (" + std::to_string(index.size()) +
             " entries); skipping generation");
    return 0;
  }

  auto backend = backend_from_cfg(cfg);
  AnswerRecord record =
      ask(index, record_image, cfg.question, cfg.k, tmpl, *embedder, *backend);

  if (!cfg.dump_prompts_dir.empty()) {
    std::filesystem::create_directories(cfg.dump_prompts_dir);
    std::string path = cfg.dump_prompts_dir + "/" +
                       sanitize_for_filename(record_image.empty() ? "query" : record_image) +
                       "_" + record.prompt_hash + ".txt";
    write_text_file(path, record.prompt.text);
    log_debug("dumped prompt to " + path);
  }
  if (!cfg.transcript_path.empty()) {
    append_transcript(cfg.transcript_path, record);
  }
  std::fwrite(record.answer_text.data(), 1, record.answer_text.size(), stdout);
  std::fputc('\n', stdout);
  return 0;
}

std::vector<QAItem> questions_from_cfg(const RunConfig& cfg, bool required) {
  if (cfg.questions_path.empty()) {
    if (required) {
      throw Error(ErrorCode::usage, "--questions is required");
    }
    return {};
  }
  return read_questions(cfg.questions_path);
}

int cmd_eval(const RunConfig& cfg) {
  if (cfg.transcript_path.empty()) {
    throw Error(ErrorCode::usage, "--transcript is required");
  }
  Dataset dataset = load_dataset_from_cfg(cfg);
  std::vector<TranscriptRecord> transcript = read_transcript(cfg.transcript_path);
  std::vector<QAItem> questions = questions_from_cfg(cfg, false);

  EvalOutcome outcome = evaluate_transcript(transcript, dataset, questions);
  if (outcome.failures > 0) {
    log_warn(std::to_string(outcome.failures) + " transcript record(s) skipped");
  }
  if (cfg.dry_run) {
    log_info("dry-run: scored " + std::to_string(outcome.images_scored) + " record(s)");
    return 0;
  }

  std::vector<ReportRow> rows{{cfg.label, outcome.scores}};
  std::string rendered = cfg.out_format == "csv" ? render_report_csv(rows)
                                                 : render_report_markdown(rows);
  if (outcome.vqa_samples > 0) {
    rendered += (cfg.out_format == "csv" ? "vqa_accuracy," : "\nVQA accuracy: ") +
                format_fixed(outcome.mean_vqa_accuracy, 4) + "\n";
  }
  write_output(cfg, rendered);
  if (!cfg.json_out_path.empty()) {
    write_text_file(cfg.json_out_path, scores_to_json(rows));
    log_info("wrote " + cfg.json_out_path);
  }
  return 0;
}

int cmd_ablate(const RunConfig& cfg) {
  Dataset dataset = load_dataset_from_cfg(cfg);
  apply_relation_model(dataset, cfg);
  std::vector<QAItem> questions = questions_from_cfg(cfg, true);

  auto embedder = embedder_from_cfg(cfg);
  auto backend = backend_from_cfg(cfg);
  PromptTemplate tmpl = template_from_cfg(cfg);

  AblationOptions options;
  options.k_values = cfg.k_values;
  options.corpus_mode = cfg.corpus;
  options.jobs = cfg.jobs;

  if (cfg.dry_run) {
    log_info("dry-run: would ablate " + std::to_string(questions.size()) +
             " question(s) over " + std::to_string(options.k_values.size()) + " k value(s)");
    return 0;
  }

  std::vector<AblationRow> rows =
      run_ablation(dataset, questions, *embedder, *backend, tmpl, options);
  long failures = 0;
  std::vector<ReportRow> report_rows;
  report_rows.reserve(rows.size());
  for (const auto& row : rows) {
    report_rows.push_back(ReportRow{std::to_string(row.k), row.scores});
    failures += row.failures;
  }
  if (failures > 0) {
    log_warn(std::to_string(failures) + " question run(s) failed across all k");
  }
  std::string rendered = cfg.out_format == "csv" ? render_report_csv(report_rows, "k")
                                                 : render_report_markdown(report_rows, "k");
  write_output(cfg, rendered);
  if (!cfg.json_out_path.empty()) {
    write_text_file(cfg.json_out_path, scores_to_json(report_rows));
    log_info("wrote " + cfg.json_out_path);
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, const std::vector<std::string>& scores_files) {
  if (scores_files.empty()) {
    throw Error(ErrorCode::usage, "report: pass at least one --scores file");
  }
  std::vector<ReportRow> rows;
  for (const auto& path : scores_files) {
    auto parsed = scores_from_json(read_text_file(path));
    rows.insert(rows.end(), parsed.begin(), parsed.end());
  }
  if (cfg.dry_run) {
    log_info("dry-run: parsed " + std::to_string(rows.size()) + " score row(s)");
    return 0;
  }
  write_output(cfg, cfg.out_format == "csv" ? render_report_csv(rows)
                                            : render_report_markdown(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scene-graph-guided retrieval-augmented VQA engine"};
  app.require_subcommand(1);

  CommandState ingest_state, chunk_state, index_state, ask_state, eval_state,
      ablate_state, report_state;
  std::vector<std::string> scores_files;

  auto* ingest = app.add_subcommand("ingest", "validate annotations, emit canonical lines");
  add_common_options(ingest, &ingest_state);
  {
    FlagBinder b(ingest, &ingest_state.flags);
    b.option("--dataset", "dataset", "dataset path (directory or lines file)");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--out", "out", "output path (default stdout)");
  }

  auto* chunk = app.add_subcommand("chunk", "build knowledge chunks from a dataset");
  add_common_options(chunk, &chunk_state);
  {
    FlagBinder b(chunk, &chunk_state.flags);
    b.option("--dataset", "dataset", "dataset path");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--min-score", "min-score", "drop objects/relations scoring below this");
    b.option("--relation-model", "relation.model", "annotated|penet-toy");
    b.option("--relation-threshold", "relation.threshold", "penet-toy score threshold");
    b.option("--entity-prototypes", "prototypes.entity", "GloVe-style entity vectors");
    b.option("--predicate-prototypes", "prototypes.predicate", "GloVe-style predicate vectors");
    b.option("--weights", "weights", "relation model weight file");
    b.option("--out", "out", "chunk dump path (default stdout)");
  }

  auto* index = app.add_subcommand("index", "embed chunks into a persisted vector index");
  add_common_options(index, &index_state);
  {
    FlagBinder b(index, &index_state.flags);
    b.option("--chunks", "chunks", "chunk dump produced by `chunk`");
    b.option("--dataset", "dataset", "dataset path (alternative to --chunks)");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--min-score", "min-score", "score filter when chunking from --dataset");
    b.option("--embedder", "embedder", "local|remote");
    b.option("--embed-url", "embed.url", "remote embedding endpoint");
    b.option("--embed-model", "embed.model", "remote embedding model id");
    b.option("--embed-dim", "embed.dim", "local embedder dimension (default 256)");
    b.toggle("--corpus", "corpus", "pool all images into one index");
    b.option("--out", "out", "index file (--corpus) or directory of per-image indexes");
  }

  auto* ask_cmd = app.add_subcommand("ask", "answer one question over a dataset or index");
  add_common_options(ask_cmd, &ask_state);
  {
    FlagBinder b(ask_cmd, &ask_state.flags);
    b.option("--dataset", "dataset", "dataset path");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--index", "index", "pre-built index file (alternative to --dataset)");
    b.option("--image", "image", "image id to ask about");
    b.option("--question", "question", "the question text");
    b.option("--k", "k", "retrieval depth (default 4)");
    b.toggle("--corpus", "corpus", "pool all images into one in-memory index");
    b.option("--min-score", "min-score", "score filter when chunking from --dataset");
    b.option("--relation-model", "relation.model", "annotated|penet-toy");
    b.option("--relation-threshold", "relation.threshold", "penet-toy score threshold");
    b.option("--weights", "weights", "relation model weight file");
    b.option("--embedder", "embedder", "local|remote");
    b.option("--embed-url", "embed.url", "remote embedding endpoint");
    b.option("--embed-model", "embed.model", "remote embedding model id");
    b.option("--embed-dim", "embed.dim", "local embedder dimension");
    b.option("--backend", "backend", "echo|scripted|template|remote");
    b.option("--script", "script", "scripted backend answer table");
    b.option("--llm-url", "llm.url", "remote chat endpoint");
    b.option("--llm-model", "llm.model", "remote chat model id");
    b.option("--temperature", "temperature", "decoding temperature (default 0)");
    b.option("--max-tokens", "max-tokens", "generation budget");
    b.option("--timeout-ms", "timeout-ms", "remote request timeout");
    b.option("--prompt-head", "prompt-head", "override the default head text");
    b.option("--transcript", "transcript", "append the answer record to this file");
    b.option("--dump-prompts", "dump-prompts", "write assembled prompts to this directory");
  }

  auto* eval_cmd = app.add_subcommand("eval", "score a transcript against ground truth");
  add_common_options(eval_cmd, &eval_state);
  {
    FlagBinder b(eval_cmd, &eval_state.flags);
    b.option("--dataset", "dataset", "dataset path");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--transcript", "transcript", "transcript produced by `ask`");
    b.option("--questions", "questions", "questions file with optional human answers");
    b.option("--label", "label", "row label in the rendered table");
    b.option("--out", "out", "output path (default stdout)");
    b.option("--out-format", "out.format", "md|csv");
    b.option("--json-out", "json.out", "machine-readable scores for `report`");
  }

  auto* ablate = app.add_subcommand("ablate", "run the top-k ablation");
  add_common_options(ablate, &ablate_state);
  {
    FlagBinder b(ablate, &ablate_state.flags);
    b.option("--dataset", "dataset", "dataset path");
    b.option("--format", "dataset.format", "dir|lines");
    b.option("--adapter", "adapter", "canonical|aug|vg");
    b.option("--questions", "questions", "questions file (one per line)");
    b.option("--k-values", "k.values", "comma-separated k list (default 1,2,4,8,16)");
    b.toggle("--corpus", "corpus", "pool all images into one index");
    b.option("--min-score", "min-score", "score filter when chunking");
    b.option("--relation-model", "relation.model", "annotated|penet-toy");
    b.option("--relation-threshold", "relation.threshold", "penet-toy score threshold");
    b.option("--weights", "weights", "relation model weight file");
    b.option("--embedder", "embedder", "local|remote");
    b.option("--embed-url", "embed.url", "remote embedding endpoint");
    b.option("--embed-model", "embed.model", "remote embedding model id");
    b.option("--embed-dim", "embed.dim", "local embedder dimension");
    b.option("--backend", "backend", "echo|scripted|template|remote");
    b.option("--script", "script", "scripted backend answer table");
    b.option("--llm-url", "llm.url", "remote chat endpoint");
    b.option("--llm-model", "llm.model", "remote chat model id");
    b.option("--temperature", "temperature", "decoding temperature");
    b.option("--max-tokens", "max-tokens", "generation budget");
    b.option("--timeout-ms", "timeout-ms", "remote request timeout");
    b.option("--prompt-head", "prompt-head", "override the default head text");
    b.option("--out", "out", "output path (default stdout)");
    b.option("--out-format", "out.format", "md|csv");
    b.option("--json-out", "json.out", "machine-readable scores for `report`");
  }

  auto* report = app.add_subcommand("report", "render Table-1-style tables from scores");
  add_common_options(report, &report_state);
  report->add_option("--scores", scores_files, "scores JSON file(s) from eval/ablate");
  {
    FlagBinder b(report, &report_state.flags);
    b.option("--out", "out", "output path (default stdout)");
    b.option("--out-format", "out.format", "md|csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(resolve(ingest_state));
    if (chunk->parsed()) return cmd_chunk(resolve(chunk_state));
    if (index->parsed()) return cmd_index(resolve(index_state));
    if (ask_cmd->parsed()) return cmd_ask(resolve(ask_state));
    if (eval_cmd->parsed()) return cmd_eval(resolve(eval_state));
    if (ablate->parsed()) return cmd_ablate(resolve(ablate_state));
    if (report->parsed()) return cmd_report(resolve(report_state), scores_files);
    log_error("no subcommand given");
    return 2;
  } catch (const Error& e) {
    log_error(e.what());
    return error_exit_code(e.code());
  } catch (const std::exception& e) {
    log_error(std::string("internal error: ") + e.what());
    return 5;
  }
}
