#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sgrag {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

// FNV-1a used everywhere a portable, platform-stable hash is needed
// (feature hashing, pseudo-prototype seeding, prompt hashes).
constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t basis = kFnvOffset) {
  std::uint64_t h = basis;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Counter-based generator (splitmix64). Used instead of <random> engines so
// that seeded artifacts are byte-identical across platforms and standard
// library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Derives an independent deterministic stream for (seed, tag).
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view tag) {
  return fnv1a64(tag, kFnvOffset ^ (seed * 0x9e3779b97f4a7c15ull));
}

std::string to_lower_ascii(std::string_view text);

// Lowercase, trim, collapse internal whitespace runs to a single space.
std::string normalize_label(std::string_view text);

std::vector<std::string> split(std::string_view text, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string hex64(std::uint64_t value);

// Fixed-point decimal with `digits` places, for report tables.
std::string format_fixed(double value, int digits);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

std::string iso8601_utc_now();

}  // namespace sgrag
