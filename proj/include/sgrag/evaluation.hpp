#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sgrag/answer.hpp"
#include "sgrag/embedder.hpp"
#include "sgrag/prompt.hpp"
#include "sgrag/scene_graph.hpp"

namespace sgrag {

// Per-image reference derived deterministically from the annotation graph.
struct GroundTruthRecord {
  std::string image_id;
  std::map<std::string, int> category_counts;
  std::map<std::string, std::map<GridCell, int>> locations;
  std::set<std::string> relation_phrases;  // "subject predicate object"

  static GroundTruthRecord from_graph(const SceneGraph& graph);
};

struct ExtractedMentions {
  std::set<std::string> categories;
  std::map<std::string, int> quantities;             // claimed count per category
  std::map<std::string, std::set<GridCell>> locations;
  std::set<std::string> relations;
};

// Rule-based answer parsing (case-insensitive, deterministic):
//  - category: vocabulary token sequence as whole words, trailing "s"/"es"
//    folded on the last word;
//  - quantity: nearest cardinal (digit or number word up to twenty) within a
//    3-token window of a matched category, ties preferring the preceding one;
//  - location: grid-cell name or synonym in the same sentence as the category;
//  - relation: subject, predicate, object tokens in order within one sentence.
ExtractedMentions extract_mentions(std::string_view answer_text,
                                   const std::vector<std::string>& category_vocabulary,
                                   const std::vector<std::string>& predicate_vocabulary);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  PRF scores() const;
  void add(const ConfusionCounts& other);
};

// Pooled counts per attribute; summing across images yields micro-averaged
// scores.
struct AttributeConfusion {
  ConfusionCounts category;
  ConfusionCounts quantity;
  ConfusionCounts location;
  ConfusionCounts relation;

  void add(const AttributeConfusion& other);
};

struct AttributeScores {
  PRF category;
  PRF quantity;
  PRF location;
  PRF relation;
};

AttributeConfusion attribute_confusion(const ExtractedMentions& mentions,
                                       const GroundTruthRecord& truth);

AttributeScores scores_from_confusion(const AttributeConfusion& confusion);

AttributeScores score_attributes(const ExtractedMentions& mentions,
                                 const GroundTruthRecord& truth);

// VQAv2 convention: mean over leave-one-out subsets of
// min(matching answers / 3, 1), after lowercase/punctuation/article
// normalization. Requires at least 3 human answers.
double vqa_accuracy(std::string_view predicted_answer,
                    const std::vector<std::string>& human_answers);

std::string normalize_vqa_answer(std::string_view answer);

struct QAItem {
  std::string image_id;
  std::string question;
  std::vector<std::string> human_answers;  // optional, enables VQA accuracy
};

// Questions file: one JSON object per line with "image_id", "question" and
// optional "human_answers".
std::vector<QAItem> read_questions(const std::string& path);

struct EvalOutcome {
  AttributeScores scores;
  AttributeConfusion confusion;
  long images_scored = 0;
  long failures = 0;
  double mean_vqa_accuracy = -1.0;  // negative when no human answers were given
  long vqa_samples = 0;
};

// Scores transcript answers against ground truth from the dataset,
// micro-averaged across images (aggregation sorted by image_id first).
EvalOutcome evaluate_transcript(const std::vector<TranscriptRecord>& transcript,
                                const Dataset& dataset,
                                const std::vector<QAItem>& questions = {});

struct AblationOptions {
  std::vector<int> k_values{1, 2, 4, 8, 16};
  bool corpus_mode = true;
  int jobs = 1;
};

struct AblationRow {
  int k = 0;
  AttributeScores scores;
  long failures = 0;
};

// Runs the identical retrieve -> prompt -> generate -> score pipeline once
// per k, rows in ascending k. Questions run concurrently on a bounded worker
// pool; per-question failures are counted and skipped.
std::vector<AblationRow> run_ablation(const Dataset& dataset,
                                      const std::vector<QAItem>& questions,
                                      Embedder& embedder, GenerationBackend& backend,
                                      const PromptTemplate& tmpl,
                                      const AblationOptions& options);

struct ReportRow {
  std::string label;
  AttributeScores scores;
};

// Table-1-style layout: a Recall block then an F1 block, each with
// Category/Quantity/Location/Relation columns, 4 decimal places.
std::string render_report_markdown(const std::vector<ReportRow>& rows,
                                   std::string_view label_header = "Method");
std::string render_report_csv(const std::vector<ReportRow>& rows,
                              std::string_view label_header = "method");

std::string scores_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> scores_from_json(std::string_view text);

}  // namespace sgrag
