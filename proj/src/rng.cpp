#include "chaowork/rng.hpp"

namespace chaowork {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL))) {}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return CounterRng::mix(seed ^ CounterRng::mix(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace chaowork
