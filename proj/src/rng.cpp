#include "steinlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace steinlab {

namespace rng {

void normal_pair(uint64_t key, uint64_t prime_index, double& g0, double& g1) {
  uint64_t w0 = word(key, prime_counter(prime_index, kSlotNormal0));
  uint64_t w1 = word(key, prime_counter(prime_index, kSlotNormal1));
  double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = unit_double(w1);                                    // [0, 1)
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  g0 = r * std::cos(a);
  g1 = r * std::sin(a);
}

}  // namespace rng

PhaseAssignment::PhaseAssignment(Seed seed, std::shared_ptr<const PrimeTable> primes)
    : seed_(seed), key_(rng::stream_key(seed)), primes_(std::move(primes)) {
  if (!primes_) throw std::invalid_argument("PhaseAssignment: null prime table");
}

double PhaseAssignment::phase(uint64_t p) const {
  if (p > primes_->limit()) throw std::out_of_range("PhaseAssignment::phase: p beyond prime table");
  if (!primes_->is_prime(p)) throw std::domain_error("PhaseAssignment::phase: p is not prime");
  return phase_at_index(primes_->index_of(p));
}

double PhaseAssignment::phase_at_index(uint64_t prime_index) const {
  if (prime_index == 0) throw std::domain_error("PhaseAssignment: prime index is 1-based");
  if (overrides_) {
    auto it = overrides_->find(prime_index);
    if (it != overrides_->end()) return it->second;
  }
  uint64_t w = rng::word(key_, rng::prime_counter(prime_index, rng::kSlotPhase));
  return 2.0 * std::numbers::pi * rng::unit_double(w);
}

PhaseAssignment PhaseAssignment::with_phase(uint64_t p, double theta) const {
  uint64_t idx = primes_->index_of(p);
  auto next = overrides_ ? std::make_shared<OverrideMap>(*overrides_)
                         : std::make_shared<OverrideMap>();
  (*next)[idx] = theta;
  return PhaseAssignment(seed_, primes_, std::move(next));
}

}  // namespace steinlab
