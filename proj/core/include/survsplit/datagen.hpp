#pragma once

#include <cstdint>
#include <random>

#include "survsplit/risk_model.hpp"

namespace survsplit {

/// Threshold hazard exp(beta0 + beta1 * I(z <= c0)), constant in time.
struct HazardModel {
  double beta0 = 1.0;
  double beta1 = 0.0;
  double c0 = 0.5;

  double rate(double z) const;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Per-replicate generator. The stream key hashes the master seed, the
/// replicate index and a caller-supplied salt (the harness passes n), so
/// every (seed, replicate, salt) triple owns its own mt19937_64 stream.
class ReplicateRng {
 public:
  ReplicateRng(const SeedSpec& seed, std::uint64_t salt = 0);

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform();
  /// Exponential with the given rate by inversion.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

/// Draws n subjects: z ~ U(0,1); latent failure and censoring times are
/// independent exponentials with the model rate at z; time is their minimum
/// and event = (failure <= censoring). Deterministic in (model, n, seed).
/// Throws InvalidN for n < 2.
Dataset generate_dataset(const HazardModel& model, int n, const SeedSpec& seed);

/// Order-sensitive FNV-1a digest of the dataset bytes.
std::uint64_t dataset_checksum(const Dataset& data);

}  // namespace survsplit
