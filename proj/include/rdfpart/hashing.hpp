#ifndef RDFPART_HASHING_HPP
#define RDFPART_HASHING_HPP

#include <cstdint>
#include <initializer_list>

namespace rdfpart {

/// 64-bit avalanche mixer (the splitmix64 finalizer). Every triple-to-partition
/// decision in the library routes through this function, so partition layouts
/// are reproducible bit-for-bit across runs and platforms.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kHashPhi = 0x9e3779b97f4a7c15ULL;

/// Seeded hash of an ordered id tuple: fold each id into the running state
/// with mix64. Order-sensitive, so (s,p,o) and (o,p,s) hash differently.
constexpr std::uint64_t hash_ids(std::initializer_list<std::uint64_t> ids, std::uint64_t seed) {
    std::uint64_t h = mix64(seed + kHashPhi);
    for (std::uint64_t id : ids) {
        h = mix64(h ^ (id + kHashPhi));
    }
    return h;
}

}  // namespace rdfpart

#endif  // RDFPART_HASHING_HPP
