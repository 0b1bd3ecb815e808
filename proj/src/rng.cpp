#include "ikf/rng.hpp"

namespace ikf {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t iteration, std::uint64_t tree) noexcept {
  return SeedContext(master).child({replication, iteration}).seed(tree);
}

SeedContext::SeedContext(std::uint64_t master) noexcept : state_(mix64(master)) {}

SeedContext SeedContext::child(std::uint64_t key) const noexcept {
  return SeedContext(Raw{}, mix64(state_ + key));
}

SeedContext SeedContext::child(std::initializer_list<std::uint64_t> keys) const noexcept {
  SeedContext c = *this;
  for (auto k : keys) c = c.child(k);
  return c;
}

std::uint64_t SeedContext::seed(std::uint64_t key) const noexcept {
  return mix64(state_ + key);
}

}  // namespace ikf
