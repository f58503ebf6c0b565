#include "support/fixtures.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <iterator>
#include <set>
#include <stdexcept>
#include <sys/wait.h>

namespace sgrag::test {

TempDir::TempDir(const std::string& tag) {
  SplitMix64 rng(fnv1a64(tag) ^ static_cast<std::uint64_t>(
                                    std::chrono::steady_clock::now().time_since_epoch().count()));
  path_ = std::filesystem::temp_directory_path() /
          ("sgrag-" + tag + "-" + hex64(rng.next()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

SceneGraph random_scene_graph(std::uint64_t seed, int max_objects, int max_relations) {
  static const char* kLabels[] = {"car",  "tree",  "road",     "building", "truck",
                                  "pool", "house", "driveway", "boat",     "tank"};
  static const char* kPredicates[] = {"parked-on", "next-to", "inside", "behind",
                                      "covering"};
  SplitMix64 rng(seed);
  SceneGraph graph;
  graph.image_id = "rand" + hex64(seed).substr(8);
  graph.image_width = 300 + static_cast<int>(rng.next_below(500));
  graph.image_height = 300 + static_cast<int>(rng.next_below(500));

  int object_count = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_objects) + 1));
  for (int i = 0; i < object_count; ++i) {
    ObjectInstance object;
    object.object_id = i;
    object.category_label = kLabels[rng.next_below(std::size(kLabels))];
    double x = rng.uniform(0.0, graph.image_width - 2.0);
    double y = rng.uniform(0.0, graph.image_height - 2.0);
    double w = rng.uniform(1.0, graph.image_width - x);
    double h = rng.uniform(1.0, graph.image_height - y);
    object.bbox = BoundingBox{x, y, x + w, y + h};
    object.detection_score = rng.uniform(0.2, 1.0);
    graph.objects.push_back(std::move(object));
  }
  if (object_count >= 2) {
    int relation_count =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_relations) + 1));
    for (int i = 0; i < relation_count; ++i) {
      RelationTriple relation;
      relation.subject_id = static_cast<int>(rng.next_below(object_count));
      do {
        relation.object_id = static_cast<int>(rng.next_below(object_count));
      } while (relation.object_id == relation.subject_id);
      relation.predicate_label = kPredicates[rng.next_below(std::size(kPredicates))];
      relation.relation_score = rng.uniform(0.2, 1.0);
      graph.relations.push_back(std::move(relation));
    }
  }
  validate_scene_graph(graph);
  return graph;
}

namespace {

// Signed feature hashing maps tokens into 256 buckets, so independently named
// fixture tokens can collide and cancel. The corpus guarantees its
// discriminative tokens occupy distinct buckets (the retrieval margins are
// then structural, not luck).
std::string bucket_free_token(const std::string& base, std::set<std::uint64_t>& used) {
  std::string candidate = base;
  for (int attempt = 0;; ++attempt) {
    std::uint64_t bucket = fnv1a64(candidate) % 256;
    if (used.insert(bucket).second) {
      return candidate;
    }
    candidate = base;
    int n = attempt;
    do {
      candidate.push_back(static_cast<char>('a' + n % 26));
      n /= 26;
    } while (n > 0);
  }
}

std::set<std::uint64_t> reserved_buckets() {
  static const char* kScaffold[] = {
      "image",  "category",  "count", "locations", "relations", "none", "top",
      "left",   "right",     "bottom", "middle",   "center",    "x1",  "x2",
      "1",      "2",         "in",     "how",      "many",      "are", "there",
      "and",    "what",      "hold",   "the",      "region",
  };
  std::set<std::uint64_t> used;
  for (const char* token : kScaffold) {
    used.insert(fnv1a64(token) % 256);
  }
  return used;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(int images) {
  SyntheticCorpus corpus;
  std::set<std::uint64_t> used = reserved_buckets();
  for (int i = 0; i < images; ++i) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%02d", i);
    std::string marker = bucket_free_token("uniq" + std::string(suffix), used);
    std::string base = bucket_free_token("base" + std::string(suffix), used);
    std::string predicate = bucket_free_token("rel" + std::string(suffix), used);
    std::string image_id = bucket_free_token("img" + std::string(suffix), used);

    SceneGraph graph;
    graph.image_id = image_id;
    graph.image_width = 300;
    graph.image_height = 300;
    // Marker object lands in a per-image cell; base object in the center.
    double offset = 10.0 * (i % 3);
    graph.objects.push_back(
        ObjectInstance{0, marker, BoundingBox{10 + offset, 10, 50 + offset, 50}, 1.0});
    graph.objects.push_back(ObjectInstance{1, base, BoundingBox{120, 120, 180, 180}, 1.0});
    graph.relations.push_back(RelationTriple{0, predicate, 1, 1.0});
    validate_scene_graph(graph);
    corpus.dataset.graphs.push_back(std::move(graph));

    QAItem question;
    question.image_id = image_id;
    question.question = "In image " + image_id + ", how many " + marker +
                        " are there and what relations hold?";
    corpus.questions.push_back(std::move(question));
  }
  return corpus;
}

CorpusFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const TempDir& dir) {
  CorpusFiles files;
  files.dataset_path = dir.file("corpus.jsonl");
  files.questions_path = dir.file("questions.jsonl");
  std::string dataset_lines;
  for (const auto& graph : corpus.dataset.graphs) {
    dataset_lines += serialize_scene_graph(graph);
    dataset_lines += '\n';
  }
  write_text_file(files.dataset_path, dataset_lines);
  std::string question_lines;
  for (const auto& item : corpus.questions) {
    question_lines += "{\"image_id\": \"" + item.image_id + "\", \"question\": \"" +
                      item.question + "\"}\n";
  }
  write_text_file(files.questions_path, question_lines);
  return files;
}

SceneGraph car_road_fixture() {
  SceneGraph graph;
  graph.image_id = "carroad";
  graph.image_width = 300;
  graph.image_height = 300;
  graph.objects.push_back(ObjectInstance{0, "car", BoundingBox{10, 10, 50, 50}, 1.0});
  graph.objects.push_back(ObjectInstance{1, "car", BoundingBox{120, 120, 180, 180}, 1.0});
  graph.objects.push_back(ObjectInstance{2, "car", BoundingBox{220, 220, 280, 280}, 1.0});
  graph.objects.push_back(ObjectInstance{3, "road", BoundingBox{0, 250, 300, 300}, 1.0});
  graph.relations.push_back(RelationTriple{0, "parked-on", 3, 1.0});
  validate_scene_graph(graph);
  return graph;
}

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("popen failed for: " + command);
  }
  std::array<char, 4096> buffer;
  std::size_t read = 0;
  while ((read = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), read);
  }
  int status = pclose(pipe);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

}  // namespace sgrag::test
