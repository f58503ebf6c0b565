#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgrag/evaluation.hpp"
#include "sgrag/scene_graph.hpp"
#include "sgrag/util.hpp"

namespace sgrag::test {

// Self-cleaning scratch directory under the system temp path.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Random but valid scene graph: labels from a small pool, in-frame boxes,
// relations between distinct objects. Deterministic per seed on every
// platform.
SceneGraph random_scene_graph(std::uint64_t seed, int max_objects = 12,
                              int max_relations = 10);

// Portable Fisher-Yates (std::shuffle ordering is implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// The ablation corpus: `images` scenes, each with one unique marker category,
// one unique base category and one unique relation between them, plus one
// question per image that names the image and its marker. With a pooled
// corpus index, rank 1 is the marker chunk and every chunk beyond the
// image's own two adds only foreign mentions.
struct SyntheticCorpus {
  Dataset dataset;
  std::vector<QAItem> questions;
};

SyntheticCorpus make_synthetic_corpus(int images);

// Writes dataset (lines format) and questions files; returns their paths.
struct CorpusFiles {
  std::string dataset_path;
  std::string questions_path;
};
CorpusFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const TempDir& dir);

// The car/road end-to-end fixture: 3 cars, 1 road, (car0 parked-on road).
SceneGraph car_road_fixture();

// Runs a command line, captures stdout, returns the exit code.
struct CommandResult {
  int exit_code = -1;
  std::string output;
};
CommandResult run_command(const std::string& command);

}  // namespace sgrag::test
