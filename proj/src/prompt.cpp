#include "sgrag/prompt.hpp"

#include "sgrag/errors.hpp"
#include "sgrag/resources.hpp"
#include "sgrag/util.hpp"

namespace sgrag {

PromptTemplate PromptTemplate::with_default_head() {
  PromptTemplate tmpl;
  tmpl.head_text = std::string(default_prompt_head());
  return tmpl;
}

PromptTemplate PromptTemplate::from_head_file(const std::string& path) {
  std::string text = read_text_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  if (text.empty()) {
    throw Error(ErrorCode::input, "prompt head file is empty: " + path);
  }
  PromptTemplate tmpl;
  tmpl.head_text = std::move(text);
  return tmpl;
}

std::string format_context(const RetrievalResult& result) {
  if (result.hits.empty()) {
    return std::string(kEmptyContextSentinel);
  }
  std::string out;
  for (std::size_t i = 0; i < result.hits.size(); ++i) {
    if (i != 0) out.push_back('\n');
    out += "[" + std::to_string(i + 1) + "] " + result.hits[i].payload.canonical_text;
  }
  return out;
}

std::string assemble_text(const PromptTemplate& tmpl, std::string_view context,
                          std::string_view question) {
  if (question.empty()) {
    throw Error(ErrorCode::input, "question must be non-empty");
  }
  if (tmpl.head_text.empty()) {
    throw Error(ErrorCode::input, "prompt head must be non-empty");
  }
  std::string text;
  text.reserve(tmpl.head_text.size() + context.size() + question.size() + 32);
  text += tmpl.head_text;
  text += "\n\n";
  text += tmpl.context_label;
  text += "\n";
  text += context;
  text += "\n\n";
  text += tmpl.question_label;
  text += "\n";
  text += question;
  return text;
}

AssembledPrompt assemble(const PromptTemplate& tmpl, const RetrievalResult& result,
                         std::string_view question, int k_requested) {
  AssembledPrompt prompt;
  prompt.text = assemble_text(tmpl, format_context(result), question);
  prompt.question = std::string(question);
  prompt.k_used = k_requested;
  prompt.retrieved_chunk_ids.reserve(result.hits.size());
  prompt.similarity_scores.reserve(result.hits.size());
  for (const auto& hit : result.hits) {
    prompt.retrieved_chunk_ids.push_back(hit.chunk_id);
    prompt.similarity_scores.push_back(hit.score);
  }
  return prompt;
}

}  // namespace sgrag
