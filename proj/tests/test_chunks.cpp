#include <doctest.h>

#include "sgrag/chunks.hpp"
#include "sgrag/errors.hpp"
#include "support/fixtures.hpp"

using namespace sgrag;

TEST_CASE("build_chunks: empty graph yields no chunks") {
  SceneGraph graph;
  graph.image_id = "empty";
  graph.image_width = 100;
  graph.image_height = 100;
  CHECK(build_chunks(graph).empty());
}

TEST_CASE("build_chunks: single centered car") {
  SceneGraph graph;
  graph.image_id = "one";
  graph.image_width = 300;
  graph.image_height = 300;
  graph.objects.push_back(ObjectInstance{0, "car", BoundingBox{120, 120, 180, 180}, 1.0});
  auto chunks = build_chunks(graph);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].chunk_id == "one#car");
  CHECK(chunks[0].count == 1);
  CHECK(chunks[0].location_histogram ==
        std::map<GridCell, int>{{GridCell::center, 1}});
  CHECK(chunks[0].relation_phrases.empty());
  CHECK(chunks[0].canonical_text ==
        "category: car | count: 1 | locations: center x1 | relations: none");
}

TEST_CASE("build_chunks: relation phrased into both endpoint chunks") {
  SceneGraph graph = test::car_road_fixture();
  auto chunks = build_chunks(graph);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].category_label == "car");  // sorted by label
  CHECK(chunks[1].category_label == "road");
  REQUIRE(chunks[0].relation_phrases.size() == 1);
  REQUIRE(chunks[1].relation_phrases.size() == 1);
  CHECK(chunks[0].relation_phrases[0] == "car parked-on road");
  CHECK(chunks[1].relation_phrases[0] == "car parked-on road");
}

TEST_CASE("build_chunks: duplicate triples deduplicate in phrases") {
  SceneGraph graph;
  graph.image_id = "dup";
  graph.image_width = 300;
  graph.image_height = 300;
  graph.objects.push_back(ObjectInstance{0, "car", BoundingBox{10, 10, 50, 50}, 1.0});
  graph.objects.push_back(ObjectInstance{1, "road", BoundingBox{0, 250, 300, 290}, 1.0});
  graph.objects.push_back(ObjectInstance{2, "car", BoundingBox{60, 10, 90, 50}, 1.0});
  graph.relations.push_back(RelationTriple{0, "parked-on", 1, 1.0});
  graph.relations.push_back(RelationTriple{2, "parked-on", 1, 1.0});  // same phrase
  auto chunks = build_chunks(graph);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].relation_phrases == std::vector<std::string>{"car parked-on road"});
  CHECK(chunks[0].count == 2);  // the histogram still reflects all instances
}

TEST_CASE("render_chunk_text: grammar and idempotence") {
  KnowledgeChunk chunk;
  chunk.category_label = "tree";
  chunk.count = 3;
  chunk.location_histogram = {{GridCell::top_left, 2}, {GridCell::center, 1}};
  CHECK(render_chunk_text(chunk) ==
        "category: tree | count: 3 | locations: top-left x2, center x1 | relations: none");
  CHECK(render_chunk_text(chunk) == render_chunk_text(chunk));

  chunk.relation_phrases = {"tree behind house", "tree next-to road"};
  CHECK(render_chunk_text(chunk) ==
        "category: tree | count: 3 | locations: top-left x2, center x1 | "
        "relations: tree behind house; tree next-to road");
}

TEST_CASE("render_chunk_text: locations come out row-major") {
  KnowledgeChunk chunk;
  chunk.category_label = "x";
  chunk.count = 3;
  chunk.location_histogram = {{GridCell::bottom_right, 1},
                              {GridCell::top_right, 1},
                              {GridCell::middle_left, 1}};
  CHECK(render_chunk_text(chunk) ==
        "category: x | count: 3 | locations: top-right x1, middle-left x1, "
        "bottom-right x1 | relations: none");
}

TEST_CASE("permutation invariance: shuffled graphs render identical dumps") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SceneGraph graph = test::random_scene_graph(seed);
    std::string baseline = render_chunk_dump(build_chunks(graph));

    SceneGraph shuffled = graph;
    test::deterministic_shuffle(shuffled.objects, seed * 31 + 1);
    test::deterministic_shuffle(shuffled.relations, seed * 31 + 2);
    CHECK(render_chunk_dump(build_chunks(shuffled)) == baseline);
  }
}

TEST_CASE("conservation: chunk counts sum to object count") {
  for (std::uint64_t seed = 50; seed < 80; ++seed) {
    SceneGraph graph = test::random_scene_graph(seed);
    auto chunks = build_chunks(graph);
    int total = 0;
    std::set<std::string> labels;
    for (const auto& chunk : chunks) {
      total += chunk.count;
      CHECK(labels.insert(chunk.category_label).second);  // one chunk per category
      CHECK(chunk.count > 0);
      int histogram_total = 0;
      for (const auto& [cell, count] : chunk.location_histogram) histogram_total += count;
      CHECK(histogram_total == chunk.count);
    }
    CHECK(total == static_cast<int>(graph.objects.size()));
    CHECK(labels == std::set<std::string>(
                        [&] {
                          std::set<std::string> expected;
                          for (const auto& object : graph.objects)
                            expected.insert(object.category_label);
                          return expected;
                        }()));
  }
}

TEST_CASE("each distinct phrase lands in exactly its endpoint chunks") {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    SceneGraph graph = test::random_scene_graph(seed);
    auto chunks = build_chunks(graph);

    std::map<std::string, int> appearances;  // phrase -> chunks containing it
    for (const auto& chunk : chunks) {
      for (const auto& phrase : chunk.relation_phrases) appearances[phrase] += 1;
    }
    std::map<std::string, std::set<std::string>> endpoint_labels;
    for (const auto& relation : graph.relations) {
      const auto* subject = graph.find_object(relation.subject_id);
      const auto* object = graph.find_object(relation.object_id);
      std::string phrase = subject->category_label + " " + relation.predicate_label +
                           " " + object->category_label;
      endpoint_labels[phrase].insert(subject->category_label);
      endpoint_labels[phrase].insert(object->category_label);
    }
    CHECK(appearances.size() == endpoint_labels.size());
    for (const auto& [phrase, labels] : endpoint_labels) {
      // Twice when the endpoints differ, once when they share a category.
      CHECK(appearances.at(phrase) == static_cast<int>(labels.size()));
    }
  }
}

TEST_CASE("min_score filter drops low-scoring objects and their relations") {
  SceneGraph graph = test::car_road_fixture();
  graph.objects[0].detection_score = 0.1;  // the car that is parked-on the road
  auto chunks = build_chunks(graph, 0.5);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].count == 2);  // one car dropped
  CHECK(chunks[0].relation_phrases.empty());
  CHECK(chunks[1].relation_phrases.empty());

  // Default threshold keeps everything.
  auto all = build_chunks(graph);
  CHECK(all[0].count == 3);
  CHECK(all[0].relation_phrases.size() == 1);
}

TEST_CASE("chunk records round-trip and validate") {
  SceneGraph graph = test::car_road_fixture();
  auto chunks = build_chunks(graph);
  std::string dump = render_chunk_dump(chunks);
  auto reparsed = parse_chunk_dump(dump);
  REQUIRE(reparsed.size() == chunks.size());
  CHECK(render_chunk_dump(reparsed) == dump);

  // Tampered text that no longer regenerates is rejected.
  std::string record = chunk_to_record(chunks[0]);
  std::string tampered = record;
  auto pos = tampered.find("count: 3");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 8, "count: 4");
  CHECK_THROWS_AS((void)chunk_from_record(tampered), Error);
}
