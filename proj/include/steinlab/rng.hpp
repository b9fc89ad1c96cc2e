#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>

#include "steinlab/primes.hpp"

namespace steinlab {

// Stream identifier. Distinct (master, replica) pairs give statistically
// independent streams; equal pairs reproduce bit-identical values.
struct Seed {
  uint64_t master = 0;
  uint64_t replica = 0;
  friend bool operator==(const Seed&, const Seed&) = default;
};

// Seed of the k-th replica derived from a base seed.
inline Seed replica_seed(Seed base, uint64_t k) { return {base.master, base.replica + k}; }

namespace rng {

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Stafford mix13).
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t stream_key(Seed s) {
  uint64_t a = mix64(s.master + kGolden);
  uint64_t b = mix64(s.replica + 0xC2B2AE3D27D4EB4Full);
  return mix64(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

// Value at position `counter` of the SplitMix64 sequence anchored at `key`.
// Stateless: any subset of counters can be queried in any order.
inline uint64_t word(uint64_t key, uint64_t counter) {
  return mix64(key + (counter + 1) * kGolden);
}

inline double unit_double(uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }

// Counter layout: kSlots derived values per prime, addressed by the 1-based
// position of the prime in the ordered prime sequence. Slot 0 carries the
// unit-circle phase; slots 1 and 2 carry the Gaussian analogue draws.
inline constexpr uint64_t kSlots = 4;
inline constexpr uint64_t kSlotPhase = 0;
inline constexpr uint64_t kSlotNormal0 = 1;
inline constexpr uint64_t kSlotNormal1 = 2;

inline uint64_t prime_counter(uint64_t prime_index, uint64_t slot) {
  return prime_index * kSlots + slot;
}

// Standard normal pair attached to a prime index (Box-Muller).
void normal_pair(uint64_t key, uint64_t prime_index, double& g0, double& g1);

}  // namespace rng

// Reproducible assignment of one uniform phase theta_p in [0, 2pi) to every
// prime, derived lazily from (seed, prime index). No phase is stored, so the
// assignment is defined for all primes of its table simultaneously and
// querying any subset in any order yields the same values. Immutable.
class PhaseAssignment {
 public:
  PhaseAssignment(Seed seed, std::shared_ptr<const PrimeTable> primes);

  const Seed& seed() const { return seed_; }
  const PrimeTable& primes() const { return *primes_; }
  const std::shared_ptr<const PrimeTable>& primes_ptr() const { return primes_; }

  // theta_p in [0, 2pi). Throws std::domain_error if p is not prime and
  // std::out_of_range if p exceeds the table limit.
  double phase(uint64_t p) const;

  // alpha(p) = exp(i theta_p); unit modulus up to the floating representation
  // of unit complex numbers.
  std::complex<double> alpha(uint64_t p) const { return std::polar(1.0, phase(p)); }

  // Phase by 1-based position in the prime sequence; equals phase(p) for the
  // prime p at that position. Used by sieves that discover primes in order.
  double phase_at_index(uint64_t prime_index) const;

  // Copy with theta_p pinned to a fixed angle. Hook for closed-form cases.
  PhaseAssignment with_phase(uint64_t p, double theta) const;

  // Same prime table, different stream.
  PhaseAssignment with_seed(Seed s) const { return PhaseAssignment(s, primes_, overrides_); }

 private:
  using OverrideMap = std::map<uint64_t, double>;  // keyed by prime index

  PhaseAssignment(Seed seed, std::shared_ptr<const PrimeTable> primes,
                  std::shared_ptr<const OverrideMap> overrides)
      : seed_(seed), key_(rng::stream_key(seed)), primes_(std::move(primes)),
        overrides_(std::move(overrides)) {}

  Seed seed_;
  uint64_t key_;
  std::shared_ptr<const PrimeTable> primes_;
  std::shared_ptr<const OverrideMap> overrides_;  // usually empty
};

}  // namespace steinlab
