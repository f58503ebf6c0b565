#include "sgrag/remote.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sgrag/errors.hpp"

namespace sgrag {
namespace {

using json = nlohmann::json;

// Bounds concurrent requests per backend.
class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return count_ > 0; });
    --count_;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int count_;
};

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(Semaphore& sem) : sem_(sem) { sem_.acquire(); }
  ~SemaphoreGuard() { sem_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  Semaphore& sem_;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::config, "endpoint URL must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return SplitUrl{url, "/"};
  }
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string body_excerpt(const std::string& body) {
  constexpr std::size_t kLimit = 200;
  if (body.size() <= kLimit) return body;
  return body.substr(0, kLimit) + "...";
}

// POSTs a JSON body with bounded retries and exponential backoff. Retries
// cover connection failures and 408/429/5xx; other statuses surface
// immediately with a body excerpt.
json post_json(const RemoteEndpoint& endpoint, const json& body) {
  if (endpoint.url.empty()) {
    throw Error(ErrorCode::config, "remote endpoint URL is not configured");
  }
  SplitUrl url = split_url(endpoint.url);
  std::string payload = body.dump();
  std::string last_failure = "no attempt made";

  for (int attempt = 1; attempt <= endpoint.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      int delay = endpoint.retry.base_delay_ms << (attempt - 2);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    httplib::Client client(url.origin);
    auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + endpoint.api_key);
    }
    auto response = client.Post(url.path, headers, payload, "application/json");
    if (!response) {
      last_failure = "connection failed (" + httplib::to_string(response.error()) + ")";
      continue;
    }
    if (response->status >= 200 && response->status < 300) {
      json parsed = json::parse(response->body, nullptr, false);
      if (parsed.is_discarded()) {
        throw Error(ErrorCode::transport,
                    endpoint.url + ": response is not valid JSON: " +
                        body_excerpt(response->body));
      }
      return parsed;
    }
    if (!retryable_status(response->status)) {
      throw Error(ErrorCode::transport,
                  endpoint.url + ": HTTP " + std::to_string(response->status) + ": " +
                      body_excerpt(response->body));
    }
    last_failure = "HTTP " + std::to_string(response->status);
  }
  throw Error(ErrorCode::transport,
              endpoint.url + ": giving up after " +
                  std::to_string(endpoint.retry.max_attempts) + " attempts; last: " +
                  last_failure);
}

}  // namespace

struct RemoteEmbedder::Impl {
  RemoteEndpoint endpoint;
  Semaphore in_flight;
  std::mutex dimension_mutex;
  int dimension = 0;  // pinned by the first response

  explicit Impl(RemoteEndpoint e)
      : endpoint(std::move(e)), in_flight(std::max(1, endpoint.max_in_flight)) {}
};

RemoteEmbedder::RemoteEmbedder(RemoteEndpoint endpoint)
    : impl_(std::make_unique<Impl>(std::move(endpoint))) {}

RemoteEmbedder::~RemoteEmbedder() = default;

int RemoteEmbedder::dimension() const {
  std::lock_guard lock(impl_->dimension_mutex);
  return impl_->dimension;
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) {
  std::vector<std::string> texts{std::string(text)};
  return embed_batch(texts).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    const std::vector<std::string>& texts) {
  for (const auto& text : texts) {
    if (text.empty()) {
      throw Error(ErrorCode::input, "cannot embed empty text");
    }
  }
  if (texts.empty()) {
    return {};
  }
  json body;
  body["model"] = impl_->endpoint.model;
  body["input"] = texts;

  json response;
  {
    SemaphoreGuard guard(impl_->in_flight);
    response = post_json(impl_->endpoint, body);
  }

  if (!response.contains("data") || !response.at("data").is_array() ||
      response.at("data").size() != texts.size()) {
    throw Error(ErrorCode::transport,
                impl_->endpoint.url + ": embedding response has no matching 'data' array");
  }
  // Responses may arrive index-tagged; restore input order when they are.
  std::vector<EmbeddingVector> vectors(texts.size());
  std::vector<bool> filled(texts.size(), false);
  std::size_t position = 0;
  for (const auto& item : response.at("data")) {
    std::size_t slot = position;
    if (item.contains("index") && item.at("index").is_number_integer()) {
      slot = item.at("index").get<std::size_t>();
    }
    if (slot >= vectors.size() || filled[slot] || !item.contains("embedding") ||
        !item.at("embedding").is_array()) {
      throw Error(ErrorCode::transport,
                  impl_->endpoint.url + ": malformed embedding entry in response");
    }
    EmbeddingVector vector;
    vector.values.reserve(item.at("embedding").size());
    for (const auto& value : item.at("embedding")) {
      vector.values.push_back(value.get<double>());
    }
    l2_normalize(vector);
    vectors[slot] = std::move(vector);
    filled[slot] = true;
    ++position;
  }

  {
    std::lock_guard lock(impl_->dimension_mutex);
    for (const auto& vector : vectors) {
      if (impl_->dimension == 0) {
        impl_->dimension = vector.dimension();
      } else if (vector.dimension() != impl_->dimension) {
        throw Error(ErrorCode::dimension,
                    impl_->endpoint.url + ": embedding dimension changed from " +
                        std::to_string(impl_->dimension) + " to " +
                        std::to_string(vector.dimension()));
      }
    }
  }
  return vectors;
}

struct RemoteChatBackend::Impl {
  RemoteEndpoint endpoint;
  double temperature;
  int max_tokens;
  Semaphore in_flight;

  Impl(RemoteEndpoint e, double temp, int tokens)
      : endpoint(std::move(e)),
        temperature(temp),
        max_tokens(tokens),
        in_flight(std::max(1, endpoint.max_in_flight)) {}
};

RemoteChatBackend::RemoteChatBackend(RemoteEndpoint endpoint, double temperature,
                                     int max_tokens)
    : impl_(std::make_unique<Impl>(std::move(endpoint), temperature, max_tokens)) {}

RemoteChatBackend::~RemoteChatBackend() = default;

std::string RemoteChatBackend::name() const {
  return "remote:" + impl_->endpoint.model;
}

GenerationResult RemoteChatBackend::run(const GenerationRequest& request) {
  json body;
  body["model"] = impl_->endpoint.model;
  body["temperature"] = impl_->temperature;
  body["max_tokens"] = impl_->max_tokens;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt.text}}});

  json response;
  {
    SemaphoreGuard guard(impl_->in_flight);
    response = post_json(impl_->endpoint, body);
  }

  if (!response.contains("choices") || !response.at("choices").is_array() ||
      response.at("choices").empty()) {
    throw Error(ErrorCode::transport,
                impl_->endpoint.url + ": chat response has no choices");
  }
  const json& message = response.at("choices")[0].value("message", json::object());
  if (message.contains("content") && message.at("content").is_string()) {
    std::string content = message.at("content").get<std::string>();
    return GenerationResult{content, content.empty()};
  }
  if (message.contains("refusal") && message.at("refusal").is_string()) {
    return GenerationResult{"", true};
  }
  throw Error(ErrorCode::transport,
              impl_->endpoint.url + ": chat response message has no content");
}

}  // namespace sgrag
