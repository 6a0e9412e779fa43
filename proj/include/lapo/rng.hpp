#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lapo {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes of `text`. Stable across platforms and runs, unlike
/// std::hash.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Counter-based stream seed: folds every key component through mix64 so that
/// (seed, purpose, step, problem) tuples map to unrelated generators. Streams
/// never depend on scheduling, so results are identical for any worker count.
std::uint64_t stream_seed(std::initializer_list<std::uint64_t> keys) noexcept;

inline Rng make_stream(std::initializer_list<std::uint64_t> keys) {
    return Rng(stream_seed(keys));
}

/// Purpose tags mixed into stream seeds.
namespace stream {
inline constexpr std::uint64_t kRollout = 0x726f6c6cULL;
inline constexpr std::uint64_t kShuffle = 0x73687566ULL;
inline constexpr std::uint64_t kEval = 0x6576616cULL;
inline constexpr std::uint64_t kStage = 0x73746167ULL;
}  // namespace stream

}  // namespace lapo
