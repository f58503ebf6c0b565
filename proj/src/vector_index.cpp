#include "sgrag/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include <zlib.h>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

constexpr char kMagic[8] = {'S', 'G', 'R', 'A', 'G', 'I', 'D', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void put_u64(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void put_f32(std::string& out, float value) {
  put_u32(out, std::bit_cast<std::uint32_t>(value));
}

class Reader {
 public:
  Reader(std::string_view data, const std::string& path) : data_(data), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      value |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
               << (8 * i);
    }
    pos_ += 4;
    return value;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
               << (8 * i);
    }
    pos_ += 8;
    return value;
  }

  float f32() { return std::bit_cast<float>(u32()); }

  std::string bytes(std::size_t n) {
    need(n);
    std::string out(data_.substr(pos_, n));
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (data_.size() - pos_ < n) {
      throw Error(ErrorCode::truncated_file, path_ + ": index file ends early");
    }
  }

  std::string_view data_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void VectorIndex::insert(std::string chunk_id, EmbeddingVector vector,
                         KnowledgeChunk payload) {
  if (vector.values.empty()) {
    throw Error(ErrorCode::dimension, "cannot insert an empty vector");
  }
  if (dimension_ == 0) {
    dimension_ = vector.dimension();
  } else if (vector.dimension() != dimension_) {
    throw Error(ErrorCode::dimension,
                "vector dimension " + std::to_string(vector.dimension()) +
                    " != index dimension " + std::to_string(dimension_));
  }
  for (const auto& entry : entries_) {
    if (entry.chunk_id == chunk_id) {
      throw Error(ErrorCode::conflict, "duplicate chunk_id '" + chunk_id + "'");
    }
  }
  if (!vector.normalized) {
    l2_normalize(vector);
  }
  // Snap to the float32 grid so save/load is bit-exact; the cached norm keeps
  // cosine scores exact despite the quantization residual.
  for (double& v : vector.values) {
    v = static_cast<double>(static_cast<float>(v));
  }
  IndexEntry entry;
  entry.chunk_id = std::move(chunk_id);
  entry.vector = std::move(vector);
  entry.norm = l2_norm(entry.vector);
  if (entry.norm == 0.0) {
    throw Error(ErrorCode::input, "cannot index a zero vector");
  }
  entry.payload = std::move(payload);
  entries_.push_back(std::move(entry));
}

RetrievalResult VectorIndex::top_k(const EmbeddingVector& query, int k) const {
  if (k < 1) {
    throw Error(ErrorCode::validation, "k must be >= 1, got " + std::to_string(k));
  }
  RetrievalResult result;
  if (entries_.empty()) {
    return result;
  }
  if (query.dimension() != dimension_) {
    throw Error(ErrorCode::dimension,
                "query dimension " + std::to_string(query.dimension()) +
                    " != index dimension " + std::to_string(dimension_));
  }
  double query_norm = l2_norm(query);
  if (query_norm == 0.0) {
    throw Error(ErrorCode::input, "query vector is zero");
  }

  std::vector<std::pair<double, std::size_t>> scored;  // (score, entry position)
  scored.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const IndexEntry& entry = entries_[i];
    double dot = 0.0;
    for (std::size_t c = 0; c < entry.vector.values.size(); ++c) {
      dot += entry.vector.values[c] * query.values[c];
    }
    scored.emplace_back(dot / (entry.norm * query_norm), i);
  }
  auto better = [this](const std::pair<double, std::size_t>& lhs,
                       const std::pair<double, std::size_t>& rhs) {
    if (lhs.first != rhs.first) return lhs.first > rhs.first;
    return entries_[lhs.second].chunk_id < entries_[rhs.second].chunk_id;
  };
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), better);
  result.hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const IndexEntry& entry = entries_[scored[i].second];
    result.hits.push_back(RetrievalHit{entry.chunk_id, scored[i].first, entry.payload});
  }
  return result;
}

void VectorIndex::save(const std::string& path) const {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(dimension_));
  put_u64(out, entries_.size());
  for (const auto& entry : entries_) {
    put_u32(out, static_cast<std::uint32_t>(entry.chunk_id.size()));
    out.append(entry.chunk_id);
    for (double v : entry.vector.values) {
      put_f32(out, static_cast<float>(v));
    }
    std::string payload = chunk_to_record(entry.payload);
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    out.append(payload);
  }
  put_u32(out, crc32_of(out));
  write_text_file(path, out);
}

VectorIndex VectorIndex::load(const std::string& path) {
  std::string data = read_text_file(path);
  constexpr std::size_t kHeaderSize = sizeof(kMagic) + 4 + 4 + 8;
  if (data.size() < kHeaderSize + 4) {
    throw Error(ErrorCode::truncated_file, path + ": smaller than an empty index");
  }
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::parse, path + ": not an index file (bad magic)");
  }
  std::string_view body(data.data(), data.size() - 4);
  Reader trailer_reader(std::string_view(data).substr(data.size() - 4), path);
  std::uint32_t stored_crc = trailer_reader.u32();
  std::uint32_t actual_crc = crc32_of(body);
  if (stored_crc != actual_crc) {
    throw Error(ErrorCode::checksum_mismatch,
                path + ": CRC32 " + hex64(actual_crc) + " != stored " + hex64(stored_crc));
  }

  Reader reader(body.substr(sizeof(kMagic)), path);
  std::uint32_t version = reader.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::version_mismatch,
                path + ": format version " + std::to_string(version) + ", expected " +
                    std::to_string(kFormatVersion));
  }
  std::uint32_t dimension = reader.u32();
  std::uint64_t count = reader.u64();

  VectorIndex index;
  index.dimension_ = static_cast<int>(dimension);
  index.entries_.reserve(count);
  std::unordered_set<std::string> seen_ids;
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexEntry entry;
    std::uint32_t id_len = reader.u32();
    entry.chunk_id = reader.bytes(id_len);
    if (!seen_ids.insert(entry.chunk_id).second) {
      throw Error(ErrorCode::conflict, path + ": duplicate chunk_id '" + entry.chunk_id + "'");
    }
    entry.vector.values.resize(dimension);
    for (std::uint32_t c = 0; c < dimension; ++c) {
      entry.vector.values[c] = static_cast<double>(reader.f32());
    }
    entry.vector.normalized = true;
    entry.norm = l2_norm(entry.vector);
    std::uint32_t payload_len = reader.u32();
    entry.payload = chunk_from_record(reader.bytes(payload_len));
    index.entries_.push_back(std::move(entry));
  }
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::parse, path + ": trailing bytes after last entry");
  }
  return index;
}

VectorIndex build_index(const std::vector<IndexInput>& inputs, Embedder& embedder) {
  VectorIndex index(embedder.dimension());
  std::vector<std::string> texts;
  texts.reserve(inputs.size());
  for (const auto& input : inputs) {
    texts.push_back(input.text);
  }
  std::vector<EmbeddingVector> vectors = embedder.embed_batch(texts);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    index.insert(inputs[i].chunk_id, std::move(vectors[i]), inputs[i].payload);
  }
  return index;
}

std::vector<IndexInput> index_inputs_from_chunks(const std::vector<KnowledgeChunk>& chunks,
                                                 bool corpus_mode) {
  std::vector<IndexInput> inputs;
  inputs.reserve(chunks.size());
  for (const auto& chunk : chunks) {
    IndexInput input;
    input.chunk_id = chunk.chunk_id;
    input.text = corpus_mode ? "image: " + chunk.image_id + " | " + chunk.canonical_text
                             : chunk.canonical_text;
    input.payload = chunk;
    inputs.push_back(std::move(input));
  }
  return inputs;
}

}  // namespace sgrag
