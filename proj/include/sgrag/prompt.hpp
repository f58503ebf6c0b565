#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sgrag/vector_index.hpp"

namespace sgrag {

struct PromptTemplate {
  std::string head_text;
  std::string context_label = "Context:";
  std::string question_label = "Question:";

  static PromptTemplate with_default_head();
  // Head text is the file content with trailing newlines stripped.
  static PromptTemplate from_head_file(const std::string& path);
};

struct AssembledPrompt {
  std::string text;
  std::vector<std::string> retrieved_chunk_ids;  // aligned with retrieval rank
  std::vector<double> similarity_scores;
  std::string question;
  int k_used = 0;  // the requested k; the context may clamp to fewer lines
};

inline constexpr std::string_view kEmptyContextSentinel = "(no relevant visual context)";

// One `[i] <canonical_text>` line per hit in rank order, newline-joined; the
// sentinel line when the result is empty.
std::string format_context(const RetrievalResult& result);

// head + "\n\n" + "Context:" + "\n" + context + "\n\n" + "Question:" + "\n" + question.
// Byte-stable; the question must be non-empty.
std::string assemble_text(const PromptTemplate& tmpl, std::string_view context,
                          std::string_view question);

AssembledPrompt assemble(const PromptTemplate& tmpl, const RetrievalResult& result,
                         std::string_view question, int k_requested);

}  // namespace sgrag
