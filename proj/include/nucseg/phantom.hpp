#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "nucseg/targets.hpp"
#include "nucseg/volume.hpp"

namespace nucseg {

/// Seedable generator with a platform-independent output sequence.
///
/// Raw bits come from std::mt19937_64, whose sequence the C++ standard fixes.
/// uniform() takes the top 53 bits of one draw scaled by 2^-53, giving [0, 1).
/// normal() uses one Box-Muller transform per call (two uniform draws, cosine branch).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct PhantomConfig {
  Shape shape{48, 48, 48};
  int n_instances = 20;
  double radius_min = 3.0;
  double radius_max = 5.0;
  bool allow_touching = false;
  int min_gap = 2;
  std::uint64_t rng_seed = 0;
  double noise_sigma = 0.05;
  double smoothing_sigma = 0.0;
  VoxelSize voxel_size{};
  int max_attempts = 1000;  ///< placement retries per instance

  bool operator==(const PhantomConfig&) const = default;
};

struct Phantom {
  LabelVolume labels;
  Volume raw;
};

/// Random axis-aligned ellipsoids with IDs 1..n_instances.
///
/// Two instances A, B are separated by gap(A, B) = (min Chebyshev distance between
/// their voxels) - 1 background voxels. Placement enforces gap >= min_gap, and at least
/// 1 unless `allow_touching`. With `allow_touching` about half of the instances are placed
/// against a previously placed one. The raw image is the per-instance intensity map,
/// optionally Gaussian-smoothed, plus N(0, noise_sigma^2) noise. Throws kPlacementFailure
/// when an instance cannot be placed within `max_attempts` draws.
Phantom generate_phantom(const PhantomConfig& cfg);

/// Separable Gaussian filter applied per channel, edge-clamped, kernel radius ceil(3 sigma).
Volume gaussian_smooth(const Volume& v, double sigma);

enum class ChannelKind { kSigned, kProbability, kVector };

/// Channel kinds of a prediction-shaped bundle (see bundle_as_prediction).
std::vector<ChannelKind> prediction_channel_kinds(Variant variant, bool with_cpv);

/// Simulated network output: seeded Gaussian noise, then smoothing, then probability
/// channels clamped to [0, 1].
Volume perturb_target(const Volume& bundle, const std::vector<ChannelKind>& kinds, double noise_sigma,
                      double smoothing_sigma, std::uint64_t rng_seed);

}  // namespace nucseg
