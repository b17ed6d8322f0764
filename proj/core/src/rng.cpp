#include "qfb/rng.hpp"

namespace qfb {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::result_type RngStream::operator()() {
  const std::uint64_t n = counter_++;
  return mix64(mix64(key_ + kGolden) ^ (n * kGolden + 0x632be59bd9b4e019ULL));
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t index,
                                std::uint64_t tag) {
  std::uint64_t h = mix64(master_seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h + kGolden * (index + 1));
  h = mix64(h ^ (kGolden * (tag + 0x1234567ULL)));
  return h;
}

}  // namespace qfb
