#include "survsplit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "survsplit/error.hpp"

namespace survsplit {

double HazardModel::rate(double z) const {
  return std::exp(beta0 + (z <= c0 ? beta1 : 0.0));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ReplicateRng::ReplicateRng(const SeedSpec& seed, std::uint64_t salt)
    : engine_(mix64(mix64(mix64(seed.master_seed) ^ seed.replicate_index) ^ salt)) {}

double ReplicateRng::uniform() {
  // Top 53 bits, shifted half a step off zero: strictly inside (0,1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double ReplicateRng::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

Dataset generate_dataset(const HazardModel& model, int n, const SeedSpec& seed) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidN, "generate_dataset: n must be >= 2, got " + std::to_string(n));
  }
  ReplicateRng rng(seed, static_cast<std::uint64_t>(n));
  Dataset data(static_cast<std::size_t>(n));

  auto draw_times = [&](Subject& s) {
    const double rate = model.rate(s.z);
    const double failure = rng.exponential(rate);
    const double censor = rng.exponential(rate);
    s.time = std::min(failure, censor);
    s.event = failure <= censor;
  };

  for (auto& s : data) {
    s.z = rng.uniform();
    draw_times(s);
  }

  // Tied failure times have probability zero but can occur in floating
  // point; redraw the later subject's times rather than perturbing them.
  std::unordered_set<double> seen;
  for (auto& s : data) {
    while (s.event && seen.count(s.time) != 0) draw_times(s);
    if (s.event) seen.insert(s.time);
  }
  return data;
}

std::uint64_t dataset_checksum(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& s : data) {
    feed(&s.time, sizeof s.time);
    const unsigned char e = s.event ? 1 : 0;
    feed(&e, 1);
    feed(&s.z, sizeof s.z);
  }
  return h;
}

}  // namespace survsplit
