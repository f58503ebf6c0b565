#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sgrag {

struct EmbeddingVector {
  std::vector<double> values;
  bool normalized = false;

  int dimension() const { return static_cast<int>(values.size()); }
};

// L2-normalizes in place; a zero vector cannot be normalized.
void l2_normalize(EmbeddingVector& vector);

double l2_norm(const EmbeddingVector& vector);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Text-to-vector backend contract. embed() must be deterministic per
// (backend, text), return a normalized vector of a fixed dimension, and be
// safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string name() const = 0;

  // 0 while unknown (remote backends pin it on first response).
  virtual int dimension() const = 0;

  virtual EmbeddingVector embed(std::string_view text) = 0;

  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);
};

struct HashEmbedderOptions {
  int dimension = 256;
  bool use_bigrams = true;
};

// Deterministic offline embedder: lowercases, tokenizes on
// whitespace/punctuation, hashes each unigram and bigram to a signed bucket,
// accumulates, and L2-normalizes. Texts sharing more tokens generically have
// higher cosine.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(HashEmbedderOptions options = {});

  std::string name() const override { return "local-hash"; }
  int dimension() const override { return options_.dimension; }
  EmbeddingVector embed(std::string_view text) override;

  // Exposed for the hand-evaluated hashing oracle in tests.
  static std::vector<std::string> tokenize(std::string_view text);

 private:
  HashEmbedderOptions options_;
};

}  // namespace sgrag
