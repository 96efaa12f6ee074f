#include "cobra/random.hpp"

#include <stdexcept>

namespace cobra {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSeed RandomSeed::derive(std::uint64_t label) const {
  return RandomSeed{splitmix64(splitmix64(master) ^ splitmix64(label + 0x632be59bd9b4e019ULL))};
}

RandomSeed RandomSeed::derive(std::string_view label) const {
  // FNV-1a
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return derive(hash);
}

UniformStream::UniformStream(RandomSeed seed) : engine_(splitmix64(seed.master)) {}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t UniformStream::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

}  // namespace cobra
