#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ikf {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for (replication, iteration, tree). Each level is folded in
/// through the bijective mixer, so for a fixed prefix distinct keys never
/// collide.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t iteration, std::uint64_t tree) noexcept;

/// Hierarchical, counter-keyed seed derivation. A context never produces
/// draws itself; it hands out independent streams keyed by integers so the
/// result of a computation does not depend on the order tasks run in.
class SeedContext {
 public:
  explicit SeedContext(std::uint64_t master) noexcept;

  SeedContext child(std::uint64_t key) const noexcept;
  SeedContext child(std::initializer_list<std::uint64_t> keys) const noexcept;

  std::uint64_t seed(std::uint64_t key) const noexcept;
  Rng stream(std::uint64_t key) const { return Rng(seed(key)); }
  std::uint64_t state() const noexcept { return state_; }

 private:
  struct Raw {};
  SeedContext(Raw, std::uint64_t state) noexcept : state_(state) {}
  std::uint64_t state_;
};

}  // namespace ikf
