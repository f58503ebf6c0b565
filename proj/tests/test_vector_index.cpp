#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"
#include "sgrag/vector_index.hpp"
#include "support/fixtures.hpp"

using namespace sgrag;

namespace {

EmbeddingVector random_unit(SplitMix64& rng, int dim) {
  EmbeddingVector v;
  v.values.resize(dim);
  for (int i = 0; i < dim; ++i) v.values[i] = rng.uniform(-1, 1);
  l2_normalize(v);
  return v;
}

KnowledgeChunk dummy_chunk(const std::string& id) {
  KnowledgeChunk chunk;
  chunk.chunk_id = id;
  chunk.image_id = "img";
  chunk.category_label = "thing";
  chunk.count = 1;
  chunk.location_histogram[GridCell::center] = 1;
  chunk.canonical_text = render_chunk_text(chunk);
  return chunk;
}

// Naive full-scan oracle, written independently of VectorIndex::top_k:
// compute every cosine from scratch and sort the whole list.
std::vector<std::pair<std::string, double>> naive_top_k(const VectorIndex& index,
                                                        const EmbeddingVector& query,
                                                        int k) {
  std::vector<std::pair<std::string, double>> all;
  for (const auto& entry : index.entries()) {
    double dot = 0, qq = 0, ee = 0;
    for (std::size_t i = 0; i < entry.vector.values.size(); ++i) {
      dot += entry.vector.values[i] * query.values[i];
      ee += entry.vector.values[i] * entry.vector.values[i];
    }
    for (double v : query.values) qq += v * v;
    all.emplace_back(entry.chunk_id, dot / (std::sqrt(ee) * std::sqrt(qq)));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(all.size()) > k) all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("top_k: trivial contracts") {
  VectorIndex index;
  EmbeddingVector q;
  q.values = {1, 0, 0};
  CHECK(index.top_k(q, 4).hits.empty());  // empty index is not an error

  SplitMix64 rng(7);
  for (int i = 0; i < 3; ++i) {
    index.insert("c" + std::to_string(i), random_unit(rng, 3), dummy_chunk("c" + std::to_string(i)));
  }
  // k >= n returns all entries sorted.
  auto all = index.top_k(q, 10);
  CHECK(all.hits.size() == 3);
  CHECK(all.hits[0].score >= all.hits[1].score);
  CHECK(all.hits[1].score >= all.hits[2].score);

  // Query equal to a stored vector ranks that entry first with score ~1.
  EmbeddingVector stored;
  stored.values = index.entries()[1].vector.values;
  auto exact = index.top_k(stored, 1);
  REQUIRE(exact.hits.size() == 1);
  CHECK(exact.hits[0].chunk_id == index.entries()[1].chunk_id);
  CHECK(exact.hits[0].score == doctest::Approx(1.0).epsilon(1e-9));

  // Dimension mismatch.
  EmbeddingVector wrong;
  wrong.values = {1, 0};
  CHECK_THROWS_AS((void)index.top_k(wrong, 1), Error);
  CHECK_THROWS_AS((void)index.top_k(q, 0), Error);
}

TEST_CASE("insert: duplicate ids conflict") {
  VectorIndex index;
  SplitMix64 rng(3);
  index.insert("dup", random_unit(rng, 4), dummy_chunk("dup"));
  try {
    index.insert("dup", random_unit(rng, 4), dummy_chunk("dup"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
}

TEST_CASE("top_k matches the naive oracle on random corpora") {
  SplitMix64 rng(20260809);
  VectorIndex index;
  for (int i = 0; i < 400; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "c%04d", i);
    index.insert(id, random_unit(rng, 64), dummy_chunk(id));
  }
  for (int q = 0; q < 25; ++q) {
    EmbeddingVector query = random_unit(rng, 64);
    for (int k : {1, 5, 50}) {
      auto expected = naive_top_k(index, query, k);
      auto actual = index.top_k(query, k);
      REQUIRE(actual.hits.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(actual.hits[i].chunk_id == expected[i].first);
        CHECK(std::abs(actual.hits[i].score - expected[i].second) < 1e-12);
        CHECK(std::abs(actual.hits[i].score) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("tie-break: duplicated vectors appear in id order") {
  VectorIndex index;
  EmbeddingVector v;
  v.values = {0.5, 0.5, 0.0};
  l2_normalize(v);
  for (const char* id : {"zebra", "alpha", "mike"}) {
    index.insert(id, v, dummy_chunk(id));
  }
  EmbeddingVector q;
  q.values = {1, 1, 0};
  auto hits = index.top_k(q, 3).hits;
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk_id == "alpha");
  CHECK(hits[1].chunk_id == "mike");
  CHECK(hits[2].chunk_id == "zebra");
}

TEST_CASE("persistence: round-trip preserves entries and top_k exactly") {
  test::TempDir dir("index");
  SplitMix64 rng(99);
  VectorIndex index;
  for (int i = 0; i < 50; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "c%03d", i);
    index.insert(id, random_unit(rng, 32), dummy_chunk(id));
  }
  std::string path = dir.file("test.idx");
  index.save(path);
  VectorIndex loaded = VectorIndex::load(path);
  REQUIRE(loaded.size() == index.size());
  CHECK(loaded.dimension() == index.dimension());
  for (std::size_t i = 0; i < index.size(); ++i) {
    CHECK(loaded.entries()[i].chunk_id == index.entries()[i].chunk_id);
    CHECK(loaded.entries()[i].vector.values == index.entries()[i].vector.values);
  }
  EmbeddingVector q = random_unit(rng, 32);
  auto before = index.top_k(q, 7);
  auto after = loaded.top_k(q, 7);
  REQUIRE(before.hits.size() == after.hits.size());
  for (std::size_t i = 0; i < before.hits.size(); ++i) {
    CHECK(before.hits[i].chunk_id == after.hits[i].chunk_id);
    CHECK(before.hits[i].score == after.hits[i].score);
  }

  // Saving the loaded index reproduces the same bytes.
  std::string path2 = dir.file("test2.idx");
  loaded.save(path2);
  CHECK(read_text_file(path) == read_text_file(path2));
}

TEST_CASE("persistence: empty index round-trips") {
  test::TempDir dir("index-empty");
  VectorIndex index;
  index.save(dir.file("empty.idx"));
  VectorIndex loaded = VectorIndex::load(dir.file("empty.idx"));
  CHECK(loaded.size() == 0);
}

TEST_CASE("persistence: distinct corruption errors") {
  test::TempDir dir("index-corrupt");
  SplitMix64 rng(5);
  VectorIndex index;
  index.insert("only", random_unit(rng, 8), dummy_chunk("only"));
  std::string path = dir.file("x.idx");
  index.save(path);
  std::string bytes = read_text_file(path);

  // Flipped byte in the body -> checksum error.
  std::string flipped = bytes;
  flipped[bytes.size() / 2] = static_cast<char>(flipped[bytes.size() / 2] ^ 0x40);
  write_text_file(path, flipped);
  try {
    VectorIndex::load(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::checksum_mismatch);
  }

  // Truncated file.
  write_text_file(path, bytes.substr(0, 10));
  try {
    VectorIndex::load(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncated_file);
  }

  // Version mismatch (bump the version field and refresh the CRC; the CRC
  // check passes, the version check fires).
  std::string versioned = bytes;
  versioned[8] = 2;  // u32 version little-endian starts right after the magic
  // Recompute trailing CRC over everything but the last 4 bytes.
  {
    auto crc32_sw = [](std::string_view data) {
      std::uint32_t crc = 0xffffffffu;
      for (unsigned char byte : data) {
        crc ^= byte;
        for (int bit = 0; bit < 8; ++bit) {
          crc = (crc >> 1) ^ (0xedb88320u & (~(crc & 1u) + 1u));
        }
      }
      return ~crc;
    };
    std::uint32_t crc = crc32_sw(std::string_view(versioned).substr(0, versioned.size() - 4));
    for (int i = 0; i < 4; ++i) {
      versioned[versioned.size() - 4 + static_cast<std::size_t>(i)] =
          static_cast<char>((crc >> (8 * i)) & 0xff);
    }
  }
  write_text_file(path, versioned);
  try {
    VectorIndex::load(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::version_mismatch);
  }

  // Bad magic.
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  write_text_file(path, bad_magic);
  try {
    VectorIndex::load(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse);
  }
}

TEST_CASE("corpus-mode inputs prefix the embedded text with the image id") {
  auto chunks = build_chunks(test::car_road_fixture());
  auto plain = index_inputs_from_chunks(chunks, false);
  auto corpus = index_inputs_from_chunks(chunks, true);
  REQUIRE(plain.size() == corpus.size());
  CHECK(plain[0].text == chunks[0].canonical_text);
  CHECK(corpus[0].text == "image: carroad | " + chunks[0].canonical_text);
  CHECK(corpus[0].payload.canonical_text == chunks[0].canonical_text);
}
