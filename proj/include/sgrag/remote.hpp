#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "sgrag/answer.hpp"
#include "sgrag/embedder.hpp"

namespace sgrag {

struct RetryPolicy {
  int max_attempts = 3;
  int base_delay_ms = 100;  // doubles per retry
};

struct RemoteEndpoint {
  std::string url;  // full URL including path, e.g. http://host:8080/v1/embeddings
  std::string api_key;
  std::string model;
  int timeout_ms = 30000;
  int max_in_flight = 4;
  RetryPolicy retry;
};

// OpenAI-style embeddings client: POST {"model", "input": [texts]} ->
// {"data": [{"embedding": [floats]}, ...]}. The vector dimension is pinned
// from the first response. Safe for concurrent use; in-flight requests are
// bounded by max_in_flight.
class RemoteEmbedder : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEndpoint endpoint);
  ~RemoteEmbedder() override;

  std::string name() const override { return "remote-embed"; }
  int dimension() const override;
  EmbeddingVector embed(std::string_view text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Chat-style single-turn client: the full prompt text rides as the user
// message; the system role stays empty because the head H already carries the
// instructions. Temperature defaults to 0 for evaluability.
class RemoteChatBackend : public GenerationBackend {
 public:
  RemoteChatBackend(RemoteEndpoint endpoint, double temperature, int max_tokens);
  ~RemoteChatBackend() override;

  std::string name() const override;
  GenerationResult run(const GenerationRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgrag
