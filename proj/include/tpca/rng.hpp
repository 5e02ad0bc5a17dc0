#ifndef TPCA_RNG_HPP
#define TPCA_RNG_HPP

#include <cstdint>
#include <functional>
#include <random>

namespace tpca {

// splitmix64 step; used to derive independent replicate streams from
// (seed, stream_index) so results do not depend on worker scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL;
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

// Worker count: explicit argument wins, then TPCA_THREADS,
// then hardware concurrency.
int effective_threads(int requested = 0);

// Deterministic parallel map: fn(i) for i in [0, count); results must be
// written into index-addressed storage by the caller's fn.
void parallel_for(int count, const std::function<void(int)>& fn, int threads = 0);

}  // namespace tpca

#endif
