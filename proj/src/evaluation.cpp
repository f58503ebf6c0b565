#include "sgrag/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgrag/errors.hpp"
#include "sgrag/resources.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

using json = nlohmann::json;

// Evaluation tokens keep internal hyphens so grid-cell names and hyphenated
// predicates survive as single tokens.
std::vector<std::string> eval_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    while (!current.empty() && current.front() == '-') current.erase(current.begin());
    while (!current.empty() && current.back() == '-') current.pop_back();
    if (!current.empty()) tokens.push_back(current);
    current.clear();
  };
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '-') {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::vector<std::string>> split_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> sentences;
  std::string current;
  auto flush = [&] {
    auto tokens = eval_tokens(current);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
    current.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '?' || c == '!' || c == ';' || c == '\n') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return sentences;
}

bool token_matches(std::string_view answer_token, std::string_view vocab_token) {
  if (answer_token == vocab_token) return true;
  if (answer_token.size() > 2 && answer_token.substr(answer_token.size() - 2) == "es" &&
      answer_token.substr(0, answer_token.size() - 2) == vocab_token) {
    return true;
  }
  if (answer_token.size() > 1 && answer_token.back() == 's' &&
      answer_token.substr(0, answer_token.size() - 1) == vocab_token) {
    return true;
  }
  return false;
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
};

std::vector<Span> find_sequence(const std::vector<std::string>& tokens,
                                const std::vector<std::string>& sequence) {
  std::vector<Span> spans;
  if (sequence.empty() || tokens.size() < sequence.size()) return spans;
  for (std::size_t i = 0; i + sequence.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < sequence.size(); ++j) {
      if (!token_matches(tokens[i + j], sequence[j])) {
        match = false;
        break;
      }
    }
    if (match) {
      spans.push_back(Span{i, i + sequence.size() - 1});
    }
  }
  return spans;
}

const std::map<std::string, int>& number_words() {
  static const std::map<std::string, int> words = {
      {"zero", 0},    {"one", 1},       {"two", 2},      {"three", 3},
      {"four", 4},    {"five", 5},      {"six", 6},      {"seven", 7},
      {"eight", 8},   {"nine", 9},      {"ten", 10},     {"eleven", 11},
      {"twelve", 12}, {"thirteen", 13}, {"fourteen", 14}, {"fifteen", 15},
      {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20},
  };
  return words;
}

std::optional<int> parse_cardinal(const std::string& token) {
  if (!token.empty() && token.size() <= 9 &&
      std::all_of(token.begin(), token.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    return std::stoi(token);
  }
  auto it = number_words().find(token);
  if (it != number_words().end()) return it->second;
  return std::nullopt;
}

struct SynonymEntry {
  std::vector<std::string> tokens;
  GridCell cell;
};

// Parsed once from the embedded v1 table, longest phrases first so "middle
// left" wins over the bare "middle".
const std::vector<SynonymEntry>& synonym_entries() {
  static const std::vector<SynonymEntry> entries = [] {
    std::vector<SynonymEntry> parsed;
    for (const auto& line : split(std::string(grid_cell_synonym_table()), '\n')) {
      if (line.empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw Error(ErrorCode::internal, "synonym table line without a tab: " + line);
      }
      auto cell = grid_cell_from_name(line.substr(tab + 1));
      if (!cell) {
        throw Error(ErrorCode::internal,
                    "synonym table names unknown cell: " + line.substr(tab + 1));
      }
      SynonymEntry entry;
      entry.tokens = eval_tokens(line.substr(0, tab));
      entry.cell = *cell;
      parsed.push_back(std::move(entry));
    }
    std::stable_sort(parsed.begin(), parsed.end(), [](const auto& a, const auto& b) {
      return a.tokens.size() > b.tokens.size();
    });
    return parsed;
  }();
  return entries;
}

std::set<GridCell> cells_in_sentence(const std::vector<std::string>& tokens) {
  std::set<GridCell> cells;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool advanced = false;
    for (const auto& entry : synonym_entries()) {
      if (entry.tokens.size() > tokens.size() - i) continue;
      bool match = true;
      for (std::size_t j = 0; j < entry.tokens.size(); ++j) {
        if (tokens[i + j] != entry.tokens[j]) {
          match = false;
          break;
        }
      }
      if (match) {
        cells.insert(entry.cell);
        i += entry.tokens.size();
        advanced = true;
        break;
      }
    }
    if (!advanced) ++i;
  }
  return cells;
}

}  // namespace

GroundTruthRecord GroundTruthRecord::from_graph(const SceneGraph& graph) {
  GroundTruthRecord truth;
  truth.image_id = graph.image_id;
  truth.category_counts = sgrag::category_counts(graph);
  truth.locations = category_grid_histograms(graph);
  for (const auto& relation : graph.relations) {
    const ObjectInstance* subject = graph.find_object(relation.subject_id);
    const ObjectInstance* object = graph.find_object(relation.object_id);
    if (subject == nullptr || object == nullptr) {
      throw Error(ErrorCode::referential_integrity,
                  "ground truth from graph with dangling relation id");
    }
    truth.relation_phrases.insert(subject->category_label + " " +
                                  relation.predicate_label + " " +
                                  object->category_label);
  }
  return truth;
}

ExtractedMentions extract_mentions(std::string_view answer_text,
                                   const std::vector<std::string>& category_vocabulary,
                                   const std::vector<std::string>& predicate_vocabulary) {
  if (category_vocabulary.empty() && predicate_vocabulary.empty()) {
    throw Error(ErrorCode::input, "extract_mentions: both vocabularies are empty");
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> categories;
  for (const auto& label : category_vocabulary) {
    auto tokens = eval_tokens(normalize_label(label));
    if (!tokens.empty()) categories.emplace_back(label, std::move(tokens));
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> predicates;
  for (const auto& label : predicate_vocabulary) {
    auto tokens = eval_tokens(normalize_label(label));
    if (!tokens.empty()) predicates.emplace_back(label, std::move(tokens));
  }

  ExtractedMentions mentions;
  for (const auto& sentence : split_sentences(answer_text)) {
    // Category spans in this sentence.
    std::vector<std::pair<std::size_t, Span>> category_spans;  // (vocab idx, span)
    for (std::size_t c = 0; c < categories.size(); ++c) {
      for (const Span& span : find_sequence(sentence, categories[c].second)) {
        category_spans.emplace_back(c, span);
      }
    }
    if (category_spans.empty() && predicates.empty()) continue;

    std::set<GridCell> sentence_cells = cells_in_sentence(sentence);

    std::set<std::size_t> seen_categories;
    for (const auto& [c, span] : category_spans) {
      const std::string& label = categories[c].first;
      mentions.categories.insert(label);
      for (GridCell cell : sentence_cells) {
        mentions.locations[label].insert(cell);
      }
      seen_categories.insert(c);

      // Nearest cardinal within 3 tokens of the span; ties take the
      // preceding side ("3 cars" over "cars ... 3").
      if (!mentions.quantities.count(label)) {
        std::optional<int> best;
        std::size_t best_distance = 4;
        for (std::size_t distance = 1; distance <= 3; ++distance) {
          if (span.start >= distance) {
            if (auto value = parse_cardinal(sentence[span.start - distance])) {
              if (distance < best_distance) {
                best = value;
                best_distance = distance;
              }
            }
          }
          std::size_t after = span.end + distance;
          if (after < sentence.size() && distance < best_distance) {
            if (auto value = parse_cardinal(sentence[after])) {
              best = value;
              best_distance = distance;
            }
          }
          if (best && best_distance <= distance) break;
        }
        if (best) {
          mentions.quantities[label] = *best;
        }
      }
    }

    // Relations: subject span, then predicate span, then object span,
    // strictly in order.
    if (!category_spans.empty()) {
      for (std::size_t p = 0; p < predicates.size(); ++p) {
        std::vector<Span> predicate_spans = find_sequence(sentence, predicates[p].second);
        if (predicate_spans.empty()) continue;
        for (std::size_t subj : seen_categories) {
          for (std::size_t obj : seen_categories) {
            // Earliest subject span.
            std::optional<Span> subject_span;
            for (const auto& [c, span] : category_spans) {
              if (c == subj && (!subject_span || span.start < subject_span->start)) {
                subject_span = span;
              }
            }
            if (!subject_span) continue;
            std::optional<Span> predicate_span;
            for (const Span& span : predicate_spans) {
              if (span.start > subject_span->end &&
                  (!predicate_span || span.start < predicate_span->start)) {
                predicate_span = span;
              }
            }
            if (!predicate_span) continue;
            bool object_found = false;
            for (const auto& [c, span] : category_spans) {
              if (c == obj && span.start > predicate_span->end) {
                object_found = true;
                break;
              }
            }
            if (object_found) {
              mentions.relations.insert(categories[subj].first + " " +
                                        predicates[p].first + " " +
                                        categories[obj].first);
            }
          }
        }
      }
    }
  }
  return mentions;
}

PRF ConfusionCounts::scores() const {
  PRF prf;
  if (tp + fp > 0) prf.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) prf.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (prf.precision + prf.recall > 0) {
    prf.f1 = 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall);
  }
  return prf;
}

void ConfusionCounts::add(const ConfusionCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
}

void AttributeConfusion::add(const AttributeConfusion& other) {
  category.add(other.category);
  quantity.add(other.quantity);
  location.add(other.location);
  relation.add(other.relation);
}

AttributeConfusion attribute_confusion(const ExtractedMentions& mentions,
                                       const GroundTruthRecord& truth) {
  AttributeConfusion confusion;

  for (const auto& label : mentions.categories) {
    if (truth.category_counts.count(label)) {
      confusion.category.tp += 1;
    } else {
      confusion.category.fp += 1;
    }
  }
  for (const auto& [label, count] : truth.category_counts) {
    (void)count;
    if (!mentions.categories.count(label)) confusion.category.fn += 1;
  }

  for (const auto& [label, claimed] : mentions.quantities) {
    auto it = truth.category_counts.find(label);
    if (it != truth.category_counts.end() && it->second == claimed) {
      confusion.quantity.tp += 1;
    } else {
      confusion.quantity.fp += 1;
    }
  }
  confusion.quantity.fn =
      static_cast<long>(truth.category_counts.size()) - confusion.quantity.tp;

  for (const auto& [label, cells] : mentions.locations) {
    auto it = truth.locations.find(label);
    for (GridCell cell : cells) {
      if (it != truth.locations.end() && it->second.count(cell)) {
        confusion.location.tp += 1;
      } else {
        confusion.location.fp += 1;
      }
    }
  }
  for (const auto& [label, cells] : truth.locations) {
    auto it = mentions.locations.find(label);
    for (const auto& [cell, count] : cells) {
      (void)count;
      if (it == mentions.locations.end() || !it->second.count(cell)) {
        confusion.location.fn += 1;
      }
    }
  }

  for (const auto& phrase : mentions.relations) {
    if (truth.relation_phrases.count(phrase)) {
      confusion.relation.tp += 1;
    } else {
      confusion.relation.fp += 1;
    }
  }
  for (const auto& phrase : truth.relation_phrases) {
    if (!mentions.relations.count(phrase)) confusion.relation.fn += 1;
  }

  return confusion;
}

AttributeScores scores_from_confusion(const AttributeConfusion& confusion) {
  AttributeScores scores;
  scores.category = confusion.category.scores();
  scores.quantity = confusion.quantity.scores();
  scores.location = confusion.location.scores();
  scores.relation = confusion.relation.scores();
  return scores;
}

AttributeScores score_attributes(const ExtractedMentions& mentions,
                                 const GroundTruthRecord& truth) {
  return scores_from_confusion(attribute_confusion(mentions, truth));
}

std::string normalize_vqa_answer(std::string_view answer) {
  std::string spaced;
  spaced.reserve(answer.size());
  for (char raw : answer) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      spaced.push_back(static_cast<char>(std::tolower(c)));
    } else {
      spaced.push_back(' ');
    }
  }
  std::vector<std::string> kept;
  for (const auto& token : split(spaced, ' ')) {
    if (token.empty() || token == "a" || token == "an" || token == "the") continue;
    kept.push_back(token);
  }
  return join(kept, " ");
}

double vqa_accuracy(std::string_view predicted_answer,
                    const std::vector<std::string>& human_answers) {
  if (human_answers.size() < 3) {
    throw Error(ErrorCode::input,
                "vqa_accuracy requires at least 3 human answers, got " +
                    std::to_string(human_answers.size()));
  }
  std::string predicted = normalize_vqa_answer(predicted_answer);
  long matches = 0;
  for (const auto& answer : human_answers) {
    if (normalize_vqa_answer(answer) == predicted) ++matches;
  }
  // Leave-one-out average of min(matches-in-subset / 3, 1) in closed form.
  double total = 0.0;
  auto n = static_cast<double>(human_answers.size());
  double with_match = std::min(static_cast<double>(matches - 1) / 3.0, 1.0);
  double without_match = std::min(static_cast<double>(matches) / 3.0, 1.0);
  total = static_cast<double>(matches) * (matches > 0 ? with_match : 0.0) +
          (n - static_cast<double>(matches)) * without_match;
  return total / n;
}

std::vector<QAItem> read_questions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::input, "cannot open questions file: " + path);
  }
  std::vector<QAItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("image_id") ||
        !parsed.contains("question")) {
      throw Error(ErrorCode::parse,
                  path + ":" + std::to_string(line_no) +
                      ": expected {\"image_id\": ..., \"question\": ...}");
    }
    QAItem item;
    item.image_id = parsed.at("image_id").get<std::string>();
    item.question = parsed.at("question").get<std::string>();
    if (parsed.contains("human_answers")) {
      item.human_answers = parsed.at("human_answers").get<std::vector<std::string>>();
    }
    items.push_back(std::move(item));
  }
  return items;
}

namespace {

struct VocabularyPair {
  std::vector<std::string> categories;
  std::vector<std::string> predicates;
};

VocabularyPair dataset_vocabulary(const Dataset& dataset) {
  std::set<std::string> categories;
  std::set<std::string> predicates;
  for (const auto& graph : dataset.graphs) {
    for (const auto& object : graph.objects) {
      categories.insert(object.category_label);
    }
    for (const auto& predicate : graph.predicate_set()) {
      predicates.insert(predicate);
    }
  }
  return VocabularyPair{{categories.begin(), categories.end()},
                        {predicates.begin(), predicates.end()}};
}

}  // namespace

EvalOutcome evaluate_transcript(const std::vector<TranscriptRecord>& transcript,
                                const Dataset& dataset,
                                const std::vector<QAItem>& questions) {
  VocabularyPair vocabulary = dataset_vocabulary(dataset);

  std::map<std::pair<std::string, std::string>, const QAItem*> qa_lookup;
  for (const auto& item : questions) {
    qa_lookup[{item.image_id, item.question}] = &item;
  }

  std::vector<const TranscriptRecord*> ordered;
  ordered.reserve(transcript.size());
  for (const auto& record : transcript) ordered.push_back(&record);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->image_id < b->image_id;
  });

  EvalOutcome outcome;
  double vqa_total = 0.0;
  for (const TranscriptRecord* record : ordered) {
    const SceneGraph* graph = dataset.find(record->image_id);
    if (graph == nullptr) {
      outcome.failures += 1;
      continue;
    }
    GroundTruthRecord truth = GroundTruthRecord::from_graph(*graph);
    ExtractedMentions mentions = extract_mentions(
        record->refused ? std::string_view("") : std::string_view(record->answer),
        vocabulary.categories, vocabulary.predicates);
    outcome.confusion.add(attribute_confusion(mentions, truth));
    outcome.images_scored += 1;

    auto qa = qa_lookup.find({record->image_id, record->question});
    if (qa != qa_lookup.end() && qa->second->human_answers.size() >= 3) {
      vqa_total += vqa_accuracy(record->answer, qa->second->human_answers);
      outcome.vqa_samples += 1;
    }
  }
  outcome.scores = scores_from_confusion(outcome.confusion);
  if (outcome.vqa_samples > 0) {
    outcome.mean_vqa_accuracy = vqa_total / static_cast<double>(outcome.vqa_samples);
  }
  return outcome;
}

std::vector<AblationRow> run_ablation(const Dataset& dataset,
                                      const std::vector<QAItem>& questions,
                                      Embedder& embedder, GenerationBackend& backend,
                                      const PromptTemplate& tmpl,
                                      const AblationOptions& options) {
  std::vector<int> k_values = options.k_values;
  std::sort(k_values.begin(), k_values.end());
  k_values.erase(std::unique(k_values.begin(), k_values.end()), k_values.end());
  if (k_values.empty()) {
    throw Error(ErrorCode::usage, "ablation needs at least one k value");
  }
  for (int k : k_values) {
    if (k < 1) {
      throw Error(ErrorCode::usage, "k must be >= 1, got " + std::to_string(k));
    }
  }

  VocabularyPair vocabulary = dataset_vocabulary(dataset);

  // Indexes are built once; the per-k pipelines are otherwise identical.
  std::map<std::string, VectorIndex> per_image;
  VectorIndex corpus;
  if (options.corpus_mode) {
    std::vector<IndexInput> inputs;
    for (const auto& graph : dataset.graphs) {
      auto graph_inputs = index_inputs_from_chunks(build_chunks(graph), true);
      inputs.insert(inputs.end(), graph_inputs.begin(), graph_inputs.end());
    }
    corpus = build_index(inputs, embedder);
  } else {
    for (const auto& graph : dataset.graphs) {
      per_image.emplace(graph.image_id,
                        build_index(index_inputs_from_chunks(build_chunks(graph), false),
                                    embedder));
    }
  }

  std::vector<AblationRow> rows;
  for (int k : k_values) {
    std::vector<std::optional<AttributeConfusion>> partials(questions.size());
    std::atomic<std::size_t> next{0};
    std::atomic<long> failures{0};

    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= questions.size()) break;
        const QAItem& item = questions[i];
        try {
          const SceneGraph* graph = dataset.find(item.image_id);
          if (graph == nullptr) {
            throw Error(ErrorCode::input, "unknown image_id " + item.image_id);
          }
          const VectorIndex& index =
              options.corpus_mode ? corpus : per_image.at(item.image_id);
          AnswerRecord record =
              ask(index, item.image_id, item.question, k, tmpl, embedder, backend);
          ExtractedMentions mentions =
              extract_mentions(record.refused ? std::string_view("")
                                              : std::string_view(record.answer_text),
                               vocabulary.categories, vocabulary.predicates);
          partials[i] = attribute_confusion(mentions,
                                            GroundTruthRecord::from_graph(*graph));
        } catch (const Error&) {
          failures.fetch_add(1);
        }
      }
    };

    int jobs = std::max(1, options.jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();

    // Reduction sorted by image_id, independent of thread scheduling.
    std::vector<std::size_t> order(questions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return questions[a].image_id < questions[b].image_id;
    });
    AblationRow row;
    row.k = k;
    row.failures = failures.load();
    AttributeConfusion total;
    for (std::size_t i : order) {
      if (partials[i]) total.add(*partials[i]);
    }
    row.scores = scores_from_confusion(total);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

const char* kAttributeNames[4] = {"Category", "Quantity", "Location", "Relation"};

std::vector<const PRF*> attribute_list(const AttributeScores& scores) {
  return {&scores.category, &scores.quantity, &scores.location, &scores.relation};
}

}  // namespace

std::string render_report_markdown(const std::vector<ReportRow>& rows,
                                   std::string_view label_header) {
  std::string out = "| " + std::string(label_header);
  for (const char* block : {"Recall", "F1"}) {
    for (const char* attribute : kAttributeNames) {
      out += " | " + std::string(block) + " " + attribute;
    }
  }
  out += " |\n|";
  for (int i = 0; i < 9; ++i) out += "---|";
  out += "\n";
  for (const auto& row : rows) {
    out += "| " + row.label;
    for (const PRF* prf : attribute_list(row.scores)) {
      out += " | " + format_fixed(prf->recall, 4);
    }
    for (const PRF* prf : attribute_list(row.scores)) {
      out += " | " + format_fixed(prf->f1, 4);
    }
    out += " |\n";
  }
  return out;
}

std::string render_report_csv(const std::vector<ReportRow>& rows,
                              std::string_view label_header) {
  std::string out(label_header);
  for (const char* block : {"recall", "f1"}) {
    for (const char* attribute : kAttributeNames) {
      out += "," + std::string(block) + "_" + to_lower_ascii(attribute);
    }
  }
  out += "\n";
  for (const auto& row : rows) {
    out += row.label;
    for (const PRF* prf : attribute_list(row.scores)) {
      out += "," + format_fixed(prf->recall, 4);
    }
    for (const PRF* prf : attribute_list(row.scores)) {
      out += "," + format_fixed(prf->f1, 4);
    }
    out += "\n";
  }
  return out;
}

std::string scores_to_json(const std::vector<ReportRow>& rows) {
  json doc;
  doc["rows"] = json::array();
  for (const auto& row : rows) {
    json entry;
    entry["label"] = row.label;
    const char* names[4] = {"category", "quantity", "location", "relation"};
    auto prfs = attribute_list(row.scores);
    for (int i = 0; i < 4; ++i) {
      entry["scores"][names[i]] = {{"precision", prfs[i]->precision},
                                   {"recall", prfs[i]->recall},
                                   {"f1", prfs[i]->f1}};
    }
    doc["rows"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::vector<ReportRow> scores_from_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("rows") ||
      !doc.at("rows").is_array()) {
    throw Error(ErrorCode::parse, "scores document: expected {\"rows\": [...]}");
  }
  std::vector<ReportRow> rows;
  for (const auto& entry : doc.at("rows")) {
    try {
      ReportRow row;
      row.label = entry.at("label").get<std::string>();
      const char* names[4] = {"category", "quantity", "location", "relation"};
      PRF* prfs[4] = {&row.scores.category, &row.scores.quantity, &row.scores.location,
                      &row.scores.relation};
      for (int i = 0; i < 4; ++i) {
        const json& block = entry.at("scores").at(names[i]);
        prfs[i]->precision = block.at("precision").get<double>();
        prfs[i]->recall = block.at("recall").get<double>();
        prfs[i]->f1 = block.at("f1").get<double>();
      }
      rows.push_back(std::move(row));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::parse, std::string("scores document: ") + ex.what());
    }
  }
  return rows;
}

}  // namespace sgrag
