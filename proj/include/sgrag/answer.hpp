#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sgrag/chunks.hpp"
#include "sgrag/embedder.hpp"
#include "sgrag/prompt.hpp"
#include "sgrag/vector_index.hpp"

namespace sgrag {

struct GenerationRequest {
  const AssembledPrompt& prompt;
  const RetrievalResult& retrieval;
};

struct GenerationResult {
  std::string text;
  bool refused = false;  // backend declined; empty answers are only valid here
};

// Text-generation backend contract. Stub backends are deterministic; remote
// determinism is not assumed even at temperature 0.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  virtual GenerationResult run(const GenerationRequest& request) = 0;
};

// Returns the first context line of the prompt (or the empty-context
// sentinel) verbatim.
class EchoBackend : public GenerationBackend {
 public:
  std::string name() const override { return "stub-echo"; }
  GenerationResult run(const GenerationRequest& request) override;
};

// Fixed question -> answer table; unknown questions are recorded as refusals.
class ScriptedBackend : public GenerationBackend {
 public:
  explicit ScriptedBackend(std::map<std::string, std::string> script)
      : script_(std::move(script)) {}

  // Script file: one JSON object per line with "question" and "answer".
  static ScriptedBackend from_file(const std::string& path);

  std::string name() const override { return "stub-scripted"; }
  GenerationResult run(const GenerationRequest& request) override;

 private:
  std::map<std::string, std::string> script_;
};

// Composes the answer mechanically from the retrieved chunk fields: one
// sentence per chunk with count, category and grid cells, then one sentence
// per relation phrase. Keeps end-to-end tests independent of any hosted
// model.
class TemplateFillBackend : public GenerationBackend {
 public:
  std::string name() const override { return "stub-template"; }
  GenerationResult run(const GenerationRequest& request) override;

  static std::string compose(const std::vector<KnowledgeChunk>& chunks);
};

struct AnswerRecord {
  std::string answer_text;
  bool refused = false;
  AssembledPrompt prompt;
  RetrievalResult retrieval;
  std::string backend_name;
  std::string image_id;
  std::string prompt_hash;  // fnv1a64 hex of the prompt text
  double latency_ms = 0.0;
  std::string timestamp;  // ISO 8601 UTC; excluded from transcript lines
};

// Runs the backend over an assembled prompt, recording full provenance.
AnswerRecord generate(GenerationBackend& backend, const AssembledPrompt& prompt,
                      const RetrievalResult& retrieval, std::string_view image_id = "");

// Full pipeline: embed the question, retrieve top-k, format context,
// assemble, generate. Errors from constituents are re-thrown labeled with
// their stage.
AnswerRecord ask(const VectorIndex& index, std::string_view image_id,
                 std::string_view question, int k, const PromptTemplate& tmpl,
                 Embedder& embedder, GenerationBackend& backend);

// Convenience overload that chunks and indexes one graph first.
AnswerRecord ask(const SceneGraph& graph, std::string_view question, int k,
                 const PromptTemplate& tmpl, Embedder& embedder,
                 GenerationBackend& backend);

// One deterministic JSON line per record: answer, backend, chunk_ids,
// image_id, k, prompt_hash, question, refused, scores. Latency and timestamp
// stay out so transcripts are byte-reproducible.
std::string transcript_line(const AnswerRecord& record);

void append_transcript(const std::string& path, const AnswerRecord& record);

struct TranscriptRecord {
  std::string image_id;
  std::string question;
  std::string answer;
  std::string prompt_hash;
  std::vector<std::string> chunk_ids;
  std::vector<double> scores;
  int k = 0;
  std::string backend;
  bool refused = false;
};

std::vector<TranscriptRecord> read_transcript(const std::string& path);

}  // namespace sgrag
