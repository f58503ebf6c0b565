#include "sgrag/answer.hpp"

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

using json = nlohmann::json;

[[noreturn]] void rethrow_staged(const Error& e, std::string_view stage) {
  throw Error(e.code(), "ask[" + std::string(stage) + "]: " + e.what());
}

}  // namespace

GenerationResult EchoBackend::run(const GenerationRequest& request) {
  if (request.retrieval.hits.empty()) {
    return GenerationResult{std::string(kEmptyContextSentinel), false};
  }
  return GenerationResult{"[1] " + request.retrieval.hits.front().payload.canonical_text,
                          false};
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::input, "cannot open script file: " + path);
  }
  std::map<std::string, std::string> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("question") ||
        !record.contains("answer")) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) +
                      ": expected {\"question\": ..., \"answer\": ...}");
    }
    script[record.at("question").get<std::string>()] =
        record.at("answer").get<std::string>();
  }
  return ScriptedBackend(std::move(script));
}

GenerationResult ScriptedBackend::run(const GenerationRequest& request) {
  auto it = script_.find(request.prompt.question);
  if (it == script_.end()) {
    return GenerationResult{"", true};
  }
  return GenerationResult{it->second, false};
}

std::string TemplateFillBackend::compose(const std::vector<KnowledgeChunk>& chunks) {
  if (chunks.empty()) {
    return "The context contains no visual evidence.";
  }
  std::string answer;
  for (const auto& chunk : chunks) {
    if (!answer.empty()) answer.push_back(' ');
    answer += "There are " + std::to_string(chunk.count) + " " + chunk.category_label +
              " in the ";
    bool first = true;
    for (const auto& [cell, count] : chunk.location_histogram) {
      (void)count;
      if (!first) answer += ", ";
      answer += std::string(grid_cell_name(cell));
      first = false;
    }
    answer += " region.";
    for (const auto& phrase : chunk.relation_phrases) {
      answer += " " + phrase + ".";
    }
  }
  return answer;
}

GenerationResult TemplateFillBackend::run(const GenerationRequest& request) {
  std::vector<KnowledgeChunk> chunks;
  chunks.reserve(request.retrieval.hits.size());
  for (const auto& hit : request.retrieval.hits) {
    chunks.push_back(hit.payload);
  }
  return GenerationResult{compose(chunks), false};
}

AnswerRecord generate(GenerationBackend& backend, const AssembledPrompt& prompt,
                      const RetrievalResult& retrieval, std::string_view image_id) {
  auto start = std::chrono::steady_clock::now();
  GenerationResult result = backend.run(GenerationRequest{prompt, retrieval});
  auto elapsed = std::chrono::steady_clock::now() - start;

  AnswerRecord record;
  record.answer_text = std::move(result.text);
  record.refused = result.refused;
  record.prompt = prompt;
  record.retrieval = retrieval;
  record.backend_name = backend.name();
  record.image_id = std::string(image_id);
  record.prompt_hash = hex64(fnv1a64(prompt.text));
  record.latency_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  record.timestamp = iso8601_utc_now();
  return record;
}

AnswerRecord ask(const VectorIndex& index, std::string_view image_id,
                 std::string_view question, int k, const PromptTemplate& tmpl,
                 Embedder& embedder, GenerationBackend& backend) {
  if (k < 1) {
    throw Error(ErrorCode::validation, "ask: k must be >= 1, got " + std::to_string(k));
  }
  EmbeddingVector query;
  try {
    query = embedder.embed(question);
  } catch (const Error& e) {
    rethrow_staged(e, "embed");
  }
  RetrievalResult retrieval;
  try {
    retrieval = index.top_k(query, k);
  } catch (const Error& e) {
    rethrow_staged(e, "retrieve");
  }
  AssembledPrompt prompt;
  try {
    prompt = assemble(tmpl, retrieval, question, k);
  } catch (const Error& e) {
    rethrow_staged(e, "assemble");
  }
  try {
    return generate(backend, prompt, retrieval, image_id);
  } catch (const Error& e) {
    rethrow_staged(e, "generate");
  }
}

AnswerRecord ask(const SceneGraph& graph, std::string_view question, int k,
                 const PromptTemplate& tmpl, Embedder& embedder,
                 GenerationBackend& backend) {
  VectorIndex index =
      build_index(index_inputs_from_chunks(build_chunks(graph), false), embedder);
  return ask(index, graph.image_id, question, k, tmpl, embedder, backend);
}

std::string transcript_line(const AnswerRecord& record) {
  json line;
  line["answer"] = record.answer_text;
  line["backend"] = record.backend_name;
  line["chunk_ids"] = record.prompt.retrieved_chunk_ids;
  line["image_id"] = record.image_id;
  line["k"] = record.prompt.k_used;
  line["prompt_hash"] = record.prompt_hash;
  line["question"] = record.prompt.question;
  line["refused"] = record.refused;
  line["scores"] = record.prompt.similarity_scores;
  return line.dump();
}

void append_transcript(const std::string& path, const AnswerRecord& record) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(ErrorCode::input, "cannot open transcript for append: " + path);
  }
  out << transcript_line(record) << "\n";
}

std::vector<TranscriptRecord> read_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::input, "cannot open transcript: " + path);
  }
  std::vector<TranscriptRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) + ": malformed transcript line");
    }
    try {
      TranscriptRecord record;
      record.image_id = parsed.at("image_id").get<std::string>();
      record.question = parsed.at("question").get<std::string>();
      record.answer = parsed.at("answer").get<std::string>();
      record.prompt_hash = parsed.at("prompt_hash").get<std::string>();
      record.chunk_ids = parsed.at("chunk_ids").get<std::vector<std::string>>();
      record.scores = parsed.at("scores").get<std::vector<double>>();
      record.k = parsed.at("k").get<int>();
      record.backend = parsed.at("backend").get<std::string>();
      record.refused = parsed.at("refused").get<bool>();
      records.push_back(std::move(record));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return records;
}

}  // namespace sgrag
