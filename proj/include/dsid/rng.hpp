#pragma once

#include "dsid/types.hpp"

#include <cstdint>
#include <random>

namespace dsid {

// All randomness in the library flows through explicit 64-bit seeds. A master
// seed fans out to independent substreams via derive_seed, so adding or
// reordering consumers never perturbs unrelated streams.

/// splitmix64 finalizer; good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and stream tags.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a,
                                    std::uint64_t tag_b = 0) {
    return mix64(mix64(seed ^ mix64(tag_a)) ^ mix64(tag_b));
}

/// Fills a rows x cols matrix with i.i.d. N(0, 1) draws from the given seed.
Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// Fills a vector with i.i.d. N(0, 1) draws.
Vector gaussian_vector(Index size, std::uint64_t seed);

/// Random matrix with entries uniform in [-1, 1].
Matrix uniform_matrix(Index rows, Index cols, std::uint64_t seed);

}  // namespace dsid
