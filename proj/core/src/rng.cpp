#include "intent_router/rng.hpp"

#include <limits>

#include "intent_router/embedding.hpp"

namespace intent_router {

std::uint64_t DeterministicRng::below(std::uint64_t bound) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % bound;
}

double DeterministicRng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view key) noexcept {
  return base ^ fnv1a64(key);
}

}  // namespace intent_router
