#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgrag {

// Fully resolved run configuration: every key has a materialized value in
// `resolved`, and the typed fields below mirror it.
struct RunConfig {
  std::string dataset_path;
  std::string dataset_format = "dir";
  std::string adapter = "canonical";
  std::string questions_path;
  std::string chunks_path;
  std::string index_path;
  std::string image_id;
  std::string question;
  std::string out_path;          // empty = stdout
  std::string out_format = "md"; // md | csv
  std::string json_out_path;
  std::string label = "sgrag";

  int k = 4;
  std::vector<int> k_values{1, 2, 4, 8, 16};
  std::uint64_t seed = 42;
  int jobs = 1;  // default computed at resolve time: min(nproc, 8)
  bool corpus = false;
  bool dry_run = false;

  double min_score = 0.0;
  std::string relation_model = "annotated";  // annotated | penet-toy
  double relation_threshold = 0.5;
  std::string entity_prototypes_path;
  std::string predicate_prototypes_path;
  std::string weights_path;

  std::string embedder = "local";  // local | remote
  std::string embed_url;
  std::string embed_model;
  int embed_dim = 256;
  std::string embed_api_key;

  std::string backend = "template";  // echo | scripted | template | remote
  std::string script_path;
  std::string llm_url;
  std::string llm_model = "Qwen2-72B-Instruct";
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_ms = 30000;
  std::string llm_api_key;

  std::string prompt_head_path;
  std::string transcript_path;
  std::string dump_prompts_dir;

  std::map<std::string, std::string> resolved;
};

// `key = value` lines, '#' comments; keys mirror flag names with dots for
// nesting. Returns raw key/value pairs; unknown keys are rejected at resolve
// time.
std::map<std::string, std::string> parse_config_file_text(std::string_view text,
                                                          const std::string& origin);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// SGRAG_ + key uppercased with '.'/'-' mapped to '_', e.g. "embed.api-key"
// -> SGRAG_EMBED_API_KEY.
std::string env_var_name(std::string_view key);

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

// Reads the process environment.
EnvLookup system_env();

// Precedence: flags > environment > file > defaults. Unknown or unparseable
// values raise a usage error naming the key.
RunConfig resolve_config(const std::map<std::string, std::string>& flags,
                         const EnvLookup& env,
                         const std::map<std::string, std::string>& file_values);

}  // namespace sgrag
