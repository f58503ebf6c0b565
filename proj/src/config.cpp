#include "sgrag/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

#include "sgrag/errors.hpp"
#include "sgrag/scene_graph.hpp"
#include "sgrag/util.hpp"

namespace sgrag {
namespace {

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

int default_jobs() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(std::min(hw, 8u));
}

// Every key the tool understands, with its default. "" means empty-by-default
// paths and identifiers.
std::vector<std::pair<std::string, std::string>> known_keys() {
  return {
      {"dataset", ""},
      {"dataset.format", "dir"},
      {"adapter", "canonical"},
      {"questions", ""},
      {"chunks", ""},
      {"index", ""},
      {"image", ""},
      {"question", ""},
      {"out", ""},
      {"out.format", "md"},
      {"json.out", ""},
      {"label", "sgrag"},
      {"k", "4"},
      {"k.values", "1,2,4,8,16"},
      {"seed", "42"},
      {"jobs", std::to_string(default_jobs())},
      {"corpus", "false"},
      {"dry-run", "false"},
      {"min-score", "0"},
      {"relation.model", "annotated"},
      {"relation.threshold", "0.5"},
      {"prototypes.entity", ""},
      {"prototypes.predicate", ""},
      {"weights", ""},
      {"embedder", "local"},
      {"embed.url", ""},
      {"embed.model", ""},
      {"embed.dim", "256"},
      {"embed.api-key", ""},
      {"backend", "template"},
      {"script", ""},
      {"llm.url", ""},
      {"llm.model", "Qwen2-72B-Instruct"},
      {"temperature", "0"},
      {"max-tokens", "512"},
      {"timeout-ms", "30000"},
      {"llm.api-key", ""},
      {"prompt-head", ""},
      {"transcript", ""},
      {"dump-prompts", ""},
  };
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw Error(ErrorCode::usage, key + ": expected an integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw Error(ErrorCode::usage, key + ": expected a number, got '" + value + "'");
  }
}

bool parse_boolean(const std::string& key, const std::string& value) {
  std::string lowered = to_lower_ascii(value);
  if (lowered == "true" || lowered == "1" || lowered == "yes" || lowered == "on") {
    return true;
  }
  if (lowered == "false" || lowered == "0" || lowered == "no" || lowered == "off") {
    return false;
  }
  throw Error(ErrorCode::usage, key + ": expected a boolean, got '" + value + "'");
}

void expect_choice(const std::string& key, const std::string& value,
                   std::initializer_list<std::string_view> choices) {
  for (std::string_view choice : choices) {
    if (value == choice) return;
  }
  std::string expected;
  for (std::string_view choice : choices) {
    if (!expected.empty()) expected += "|";
    expected += std::string(choice);
  }
  throw Error(ErrorCode::usage, key + ": expected one of {" + expected + "}, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config_file_text(std::string_view text,
                                                          const std::string& origin) {
  std::map<std::string, std::string> values;
  std::size_t line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::usage,
                  origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::usage,
                  origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (values.count(key)) {
      throw Error(ErrorCode::usage,
                  origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    values.emplace(std::move(key), std::move(value));
  }
  return values;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  return parse_config_file_text(read_text_file(path), path);
}

std::string env_var_name(std::string_view key) {
  std::string name = "SGRAG_";
  for (char c : key) {
    if (c == '.' || c == '-') {
      name.push_back('_');
    } else {
      name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return name;
}

EnvLookup system_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* value = std::getenv(std::string(name).c_str());
    if (value == nullptr) return std::nullopt;
    return std::string(value);
  };
}

RunConfig resolve_config(const std::map<std::string, std::string>& flags,
                         const EnvLookup& env,
                         const std::map<std::string, std::string>& file_values) {
  std::map<std::string, std::string> resolved;
  for (const auto& [key, value] : known_keys()) {
    resolved.emplace(key, value);
  }

  for (const auto& [key, value] : file_values) {
    auto it = resolved.find(key);
    if (it == resolved.end()) {
      throw Error(ErrorCode::usage, "unknown config key '" + key + "'");
    }
    it->second = value;
  }
  if (env) {
    for (auto& [key, value] : resolved) {
      if (auto from_env = env(env_var_name(key))) {
        value = *from_env;
      }
    }
  }
  for (const auto& [key, value] : flags) {
    auto it = resolved.find(key);
    if (it == resolved.end()) {
      throw Error(ErrorCode::usage, "unknown config key '" + key + "'");
    }
    it->second = value;
  }

  RunConfig cfg;
  cfg.resolved = resolved;
  auto get = [&](const char* key) -> const std::string& { return resolved.at(key); };

  cfg.dataset_path = get("dataset");
  cfg.dataset_format = get("dataset.format");
  dataset_format_from_name(cfg.dataset_format);  // validates
  cfg.adapter = get("adapter");
  adapter_from_name(cfg.adapter);
  cfg.questions_path = get("questions");
  cfg.chunks_path = get("chunks");
  cfg.index_path = get("index");
  cfg.image_id = get("image");
  cfg.question = get("question");
  cfg.out_path = get("out");
  cfg.out_format = get("out.format");
  expect_choice("out.format", cfg.out_format, {"md", "csv"});
  cfg.json_out_path = get("json.out");
  cfg.label = get("label");

  long long k = parse_integer("k", get("k"));
  if (k < 1) {
    throw Error(ErrorCode::usage, "k: must be >= 1, got " + std::to_string(k));
  }
  cfg.k = static_cast<int>(k);

  cfg.k_values.clear();
  for (const auto& part : split(get("k.values"), ',')) {
    std::string value = trim(part);
    if (value.empty()) continue;
    long long parsed = parse_integer("k.values", value);
    if (parsed < 1) {
      throw Error(ErrorCode::usage, "k.values: every k must be >= 1");
    }
    cfg.k_values.push_back(static_cast<int>(parsed));
  }
  if (cfg.k_values.empty()) {
    throw Error(ErrorCode::usage, "k.values: expected a comma-separated list of integers");
  }

  long long seed = parse_integer("seed", get("seed"));
  cfg.seed = static_cast<std::uint64_t>(seed);

  long long jobs = parse_integer("jobs", get("jobs"));
  if (jobs < 1) {
    throw Error(ErrorCode::usage, "jobs: must be >= 1, got " + std::to_string(jobs));
  }
  cfg.jobs = static_cast<int>(jobs);

  cfg.corpus = parse_boolean("corpus", get("corpus"));
  cfg.dry_run = parse_boolean("dry-run", get("dry-run"));

  cfg.min_score = parse_real("min-score", get("min-score"));
  if (cfg.min_score < 0.0 || cfg.min_score > 1.0) {
    throw Error(ErrorCode::usage, "min-score: must be in [0, 1]");
  }

  cfg.relation_model = get("relation.model");
  expect_choice("relation.model", cfg.relation_model, {"annotated", "penet-toy"});
  cfg.relation_threshold = parse_real("relation.threshold", get("relation.threshold"));
  if (cfg.relation_threshold < -1.0 || cfg.relation_threshold > 1.0) {
    throw Error(ErrorCode::usage, "relation.threshold: must be in [-1, 1]");
  }
  cfg.entity_prototypes_path = get("prototypes.entity");
  cfg.predicate_prototypes_path = get("prototypes.predicate");
  cfg.weights_path = get("weights");

  cfg.embedder = get("embedder");
  expect_choice("embedder", cfg.embedder, {"local", "remote"});
  cfg.embed_url = get("embed.url");
  cfg.embed_model = get("embed.model");
  long long embed_dim = parse_integer("embed.dim", get("embed.dim"));
  if (embed_dim < 1) {
    throw Error(ErrorCode::usage, "embed.dim: must be >= 1");
  }
  cfg.embed_dim = static_cast<int>(embed_dim);
  cfg.embed_api_key = get("embed.api-key");

  cfg.backend = get("backend");
  expect_choice("backend", cfg.backend, {"echo", "scripted", "template", "remote"});
  cfg.script_path = get("script");
  cfg.llm_url = get("llm.url");
  cfg.llm_model = get("llm.model");
  cfg.temperature = parse_real("temperature", get("temperature"));
  if (cfg.temperature < 0.0) {
    throw Error(ErrorCode::usage, "temperature: must be >= 0");
  }
  long long max_tokens = parse_integer("max-tokens", get("max-tokens"));
  if (max_tokens < 1) {
    throw Error(ErrorCode::usage, "max-tokens: must be >= 1");
  }
  cfg.max_tokens = static_cast<int>(max_tokens);
  long long timeout_ms = parse_integer("timeout-ms", get("timeout-ms"));
  if (timeout_ms < 1) {
    throw Error(ErrorCode::usage, "timeout-ms: must be >= 1");
  }
  cfg.timeout_ms = static_cast<int>(timeout_ms);
  cfg.llm_api_key = get("llm.api-key");

  cfg.prompt_head_path = get("prompt-head");
  cfg.transcript_path = get("transcript");
  cfg.dump_prompts_dir = get("dump-prompts");

  return cfg;
}

}  // namespace sgrag
