#pragma once

#include <cstdint>
#include <random>

namespace shifterr {

/// Derives independent seed streams from a master seed.
///
/// Replicate b of a bootstrap run gets its own engine seeded with
/// substream_seed(master, stream_tag, b).  Work scheduled across threads in
/// any order then produces the same draws as a serial loop, which is what
/// makes --jobs N output bit-identical to --jobs 1.
namespace rng {

/// splitmix64 finalizer; decorrelates consecutive seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combines two 64-bit values into one well-mixed seed.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)) ^ splitmix64(b));
}

/// Seed for stream `tag`, element `index` under `master`.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return mix(mix(master, tag), index);
}

/// Fresh engine for one substream.  Distributions must also be constructed
/// fresh at the point of use: std::normal_distribution keeps internal state,
/// and reuse across replicates would couple their draws.
inline std::mt19937_64 engine(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return std::mt19937_64(substream_seed(master, tag, index));
}

// Stream tags.  Keep these stable: changing them changes every seeded result.
inline constexpr std::uint64_t kTagBootTrain = 1;     // replicate outcomes at X
inline constexpr std::uint64_t kTagBootTest = 2;      // replicate outcomes at X_test
inline constexpr std::uint64_t kTagBootInsample = 3;  // in-sample penalty bootstrap
inline constexpr std::uint64_t kTagBootFresh = 4;     // fresh in-sample outcomes at X
inline constexpr std::uint64_t kTagSimTrainX = 10;
inline constexpr std::uint64_t kTagSimTrainNoise = 11;
inline constexpr std::uint64_t kTagSimTestX = 12;
inline constexpr std::uint64_t kTagSimTestNoise = 13;
inline constexpr std::uint64_t kTagSimImbalance = 14;
inline constexpr std::uint64_t kTagSnr = 15;
inline constexpr std::uint64_t kTagFolds = 20;
inline constexpr std::uint64_t kTagSplit = 30;

}  // namespace rng
}  // namespace shifterr
