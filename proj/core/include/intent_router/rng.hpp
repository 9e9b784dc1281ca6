#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace intent_router {

// Seeded generator whose output is identical on every standard library.
// std::mt19937_64 is fully specified; the distributions in <random> are not,
// so bounded draws and shuffles are done here.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform in [0, 1).
  double unit();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a textual key into a base seed (FNV-1a over the key, then xor).
std::uint64_t derive_seed(std::uint64_t base, std::string_view key) noexcept;

}  // namespace intent_router
