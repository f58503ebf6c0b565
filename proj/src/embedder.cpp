#include "sgrag/embedder.hpp"

#include <cctype>
#include <cmath>

#include "sgrag/errors.hpp"
#include "sgrag/util.hpp"

namespace sgrag {

double l2_norm(const EmbeddingVector& vector) {
  double sum = 0.0;
  for (double v : vector.values) {
    sum += v * v;
  }
  return std::sqrt(sum);
}

void l2_normalize(EmbeddingVector& vector) {
  double norm = l2_norm(vector);
  if (norm == 0.0) {
    throw Error(ErrorCode::input, "cannot normalize a zero vector");
  }
  for (double& v : vector.values) {
    v /= norm;
  }
  vector.normalized = true;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::dimension,
                "cosine: dimensions " + std::to_string(a.dimension()) + " and " +
                    std::to_string(b.dimension()) + " differ");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  double na = l2_norm(a);
  double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return dot / (na * nb);
}

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(texts.size());
  for (const auto& text : texts) {
    vectors.push_back(embed(text));
  }
  return vectors;
}

HashEmbedder::HashEmbedder(HashEmbedderOptions options) : options_(options) {
  if (options_.dimension <= 0) {
    throw Error(ErrorCode::config, "embedding dimension must be positive");
  }
}

std::vector<std::string> HashEmbedder::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

EmbeddingVector HashEmbedder::embed(std::string_view text) {
  if (text.empty()) {
    throw Error(ErrorCode::input, "cannot embed empty text");
  }
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::input, "text contains no tokens");
  }

  EmbeddingVector vector;
  vector.values.assign(static_cast<std::size_t>(options_.dimension), 0.0);
  auto accumulate = [&](std::string_view feature) {
    std::uint64_t h = fnv1a64(feature);
    std::size_t bucket = h % static_cast<std::uint64_t>(options_.dimension);
    double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
    vector.values[bucket] += sign;
  };
  for (const auto& token : tokens) {
    accumulate(token);
  }
  if (options_.use_bigrams) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      accumulate(tokens[i] + "\x1f" + tokens[i + 1]);
    }
  }

  // Opposite-signed collisions can cancel the whole accumulation; that text
  // has no usable direction.
  l2_normalize(vector);
  return vector;
}

}  // namespace sgrag
