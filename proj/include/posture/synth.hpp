#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "posture/rng.hpp"
#include "posture/types.hpp"

namespace posture {

using Vec3 = std::array<double, 3>;

enum class MovementTier { Low, High };

/// Chest, thighs and ankles are low tier; arms and wrists high.
MovementTier movement_tier(SensorLocation location);

/// Nominal gravity direction (unit vector, sensor frame) for a posture at a site.
struct PostureOrientation {
  Vec3 gravity{};
  MovementTier tier = MovementTier::Low;
};

/// Built-in orientation table. Chest values follow the measured lying signatures
/// (supine z = +0.94, prone z = -0.80, left side x = -0.82), completed to unit
/// length in the lateral-frontal plane; right side mirrors left side.
PostureOrientation nominal_orientation(PostureLabel posture, SensorLocation location);

struct SynthConfig {
  std::size_t subjects = 20;
  std::size_t episodes_per_posture = 1;
  LabelSet postures{PostureLabel::Supine, PostureLabel::Prone, PostureLabel::LeftSide, PostureLabel::RightSide};
  std::vector<SensorLocation> locations{std::begin(kAllLocations), std::end(kAllLocations)};
  std::size_t min_length = 96;
  std::size_t max_length = 192;
  double sample_rate_hz = 30.0;
  double gravity = 1.0;               // magnitude of the emitted gravity vector
  double subject_jitter_deg = 5.0;    // std of the per-subject sensor rotation
  double noise_std = 0.02;            // white noise, g
  double high_tier_noise_scale = 3.0; // extra tremor on arms/wrists
  double limb_jitter_deg = 35.0;      // per-episode limb placement, high tier only
  double burst_rate_hz = 0.2;         // movement bursts per second, high tier only
  double burst_amplitude_deg = 60.0;  // std of the burst reorientation angle
  double burst_min_s = 1.0;
  double burst_max_s = 3.0;
  std::uint64_t seed = 42;
  std::map<std::pair<PostureLabel, SensorLocation>, Vec3> orientation_overrides;

  /// Same signal model with every stochastic term switched off.
  SynthConfig noiseless() const;
};

/// Rotation matrix (row-major) for `angle_rad` about a unit axis.
std::array<double, 9> axis_angle_rotation(const Vec3& axis, double angle_rad);
Vec3 rotate(const std::array<double, 9>& R, const Vec3& v);

/// Per-subject sensor rotation, identical for every episode of that subject.
std::array<double, 9> subject_rotation(const SynthConfig& cfg, std::size_t subject);

std::string subject_name(std::size_t subject);

/// One episode. `episode_index` distinguishes repeated runs of the same posture.
Episode generate_episode(const SynthConfig& cfg, std::size_t subject, PostureLabel posture, SensorLocation location,
                         std::size_t episode_index = 0);

/// subjects x postures x episodes_per_posture episodes at every configured location.
Dataset generate_dataset(const SynthConfig& cfg);

}  // namespace posture
