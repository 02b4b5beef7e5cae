#include "posture/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace posture {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 unit(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

/// Completes a reading to unit length along the vertical (y) axis.
Vec3 complete_vertical(double x, double z) { return {x, std::sqrt(1.0 - x * x - z * z), z}; }

// Lying down turns the torso's vertical axis horizontal, so gravity stays in
// the x-z plane; the free component takes the remaining unit length.
Vec3 complete_lateral(double z, double sign) { return {sign * std::sqrt(1.0 - z * z), 0.0, z}; }
Vec3 complete_frontal(double x, double sign) { return {x, 0.0, sign * std::sqrt(1.0 - x * x)}; }

Vec3 random_axis(Rng& rng) {
  for (;;) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-9) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

std::array<double, 9> random_rotation(Rng& rng, double std_deg) {
  const Vec3 axis = random_axis(rng);
  const double angle = rng.normal() * std_deg * kDeg;
  return axis_angle_rotation(axis, angle);
}

bool left_limb(SensorLocation l) {
  return l == SensorLocation::LeftArm || l == SensorLocation::LeftWrist || l == SensorLocation::LeftThigh ||
         l == SensorLocation::LeftAnkle;
}

std::uint64_t episode_stream(std::size_t subject, PostureLabel p, SensorLocation l, std::size_t k) {
  return ((static_cast<std::uint64_t>(subject) * 16 + static_cast<std::uint64_t>(p)) * 16 +
          static_cast<std::uint64_t>(l)) * 1024 + k + 1000;
}

}  // namespace

MovementTier movement_tier(SensorLocation location) {
  switch (location) {
    case SensorLocation::LeftArm:
    case SensorLocation::RightArm:
    case SensorLocation::LeftWrist:
    case SensorLocation::RightWrist:
      return MovementTier::High;
    default:
      return MovementTier::Low;
  }
}

PostureOrientation nominal_orientation(PostureLabel posture, SensorLocation location) {
  const MovementTier tier = movement_tier(location);
  Vec3 g{};
  switch (location) {
    case SensorLocation::Chest:
      switch (posture) {
        case PostureLabel::Supine: g = complete_lateral(0.94, -1.0); break;
        case PostureLabel::Prone: g = complete_lateral(-0.80, 1.0); break;
        case PostureLabel::LeftSide: g = complete_frontal(-0.82, -1.0); break;
        case PostureLabel::RightSide: g = complete_frontal(0.82, -1.0); break;
      }
      break;
    case SensorLocation::LeftThigh:
    case SensorLocation::RightThigh:
      // Legs lie flatter than the torso, so less gravity falls on the vertical axis.
      switch (posture) {
        case PostureLabel::Supine: g = complete_vertical(0.0, 0.96); break;
        case PostureLabel::Prone: g = complete_vertical(0.0, -0.93); break;
        case PostureLabel::LeftSide: g = complete_vertical(-0.90, 0.0); break;
        case PostureLabel::RightSide: g = complete_vertical(0.90, 0.0); break;
      }
      break;
    case SensorLocation::LeftAnkle:
    case SensorLocation::RightAnkle:
      switch (posture) {
        case PostureLabel::Supine: g = complete_vertical(0.0, 0.85); break;
        case PostureLabel::Prone: g = complete_vertical(0.0, -0.80); break;
        case PostureLabel::LeftSide: g = complete_vertical(-0.80, 0.15); break;
        case PostureLabel::RightSide: g = complete_vertical(0.80, 0.15); break;
      }
      break;
    default: {
      // Arms and wrists: the hand rests in similar poses across postures, so
      // nominals sit close together and per-episode placement blurs them further.
      // In side lying the lower limb rolls out with the body while the upper
      // limb stays near its supine pose; both end up about 22 degrees away.
      const double side = left_limb(location) ? -1.0 : 1.0;
      const Vec3 lower = unit({0.55 * side, 0.30, 0.55});
      const Vec3 upper = unit({0.0, 0.45, 0.85});
      switch (posture) {
        case PostureLabel::Supine: g = unit({0.35 * side, 0.30, 0.89}); break;
        case PostureLabel::Prone: g = unit({0.45 * side, 0.35, -0.45}); break;
        case PostureLabel::LeftSide: g = side < 0 ? lower : upper; break;
        case PostureLabel::RightSide: g = side > 0 ? lower : upper; break;
      }
      break;
    }
  }
  return {g, tier};
}

SynthConfig SynthConfig::noiseless() const {
  SynthConfig c = *this;
  c.subject_jitter_deg = 0.0;
  c.noise_std = 0.0;
  c.limb_jitter_deg = 0.0;
  c.burst_rate_hz = 0.0;
  return c;
}

std::array<double, 9> axis_angle_rotation(const Vec3& a, double t) {
  const double c = std::cos(t), s = std::sin(t), C = 1.0 - c;
  const double x = a[0], y = a[1], z = a[2];
  return {c + x * x * C,     x * y * C - z * s, x * z * C + y * s,
          y * x * C + z * s, c + y * y * C,     y * z * C - x * s,
          z * x * C - y * s, z * y * C + x * s, c + z * z * C};
}

Vec3 rotate(const std::array<double, 9>& R, const Vec3& v) {
  return {R[0] * v[0] + R[1] * v[1] + R[2] * v[2], R[3] * v[0] + R[4] * v[1] + R[5] * v[2],
          R[6] * v[0] + R[7] * v[1] + R[8] * v[2]};
}

std::array<double, 9> subject_rotation(const SynthConfig& cfg, std::size_t subject) {
  Rng rng(derive_seed(cfg.seed, subject));
  return random_rotation(rng, cfg.subject_jitter_deg);
}

std::string subject_name(std::size_t subject) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02zu", subject + 1);
  return buf;
}

Episode generate_episode(const SynthConfig& cfg, std::size_t subject, PostureLabel posture, SensorLocation location,
                         std::size_t episode_index) {
  if (cfg.min_length < 1 || cfg.max_length < cfg.min_length) {
    throw Error(Errc::InvalidArgument, "episode length range must be positive and ordered");
  }
  Rng rng(derive_seed(cfg.seed, episode_stream(subject, posture, location, episode_index)));
  PostureOrientation o = nominal_orientation(posture, location);
  if (const auto it = cfg.orientation_overrides.find({posture, location}); it != cfg.orientation_overrides.end()) {
    o.gravity = unit(it->second);
  }
  Vec3 g = rotate(subject_rotation(cfg, subject), o.gravity);
  const bool high = o.tier == MovementTier::High;
  if (high && cfg.limb_jitter_deg > 0.0) g = rotate(random_rotation(rng, cfg.limb_jitter_deg), g);
  const double noise = cfg.noise_std * (high ? cfg.high_tier_noise_scale : 1.0);

  const std::size_t len = cfg.min_length + static_cast<std::size_t>(rng.below(cfg.max_length - cfg.min_length + 1));
  Episode ep;
  ep.sample_rate_hz = cfg.sample_rate_hz;
  ep.subject_id = subject_name(subject);
  ep.location = location;
  ep.label = posture;
  ep.provenance = "synthetic";
  ep.samples.reserve(len);

  const double burst_p = high ? cfg.burst_rate_hz / cfg.sample_rate_hz : 0.0;
  std::size_t burst_left = 0;
  Vec3 burst_g = g;
  for (std::size_t t = 0; t < len; ++t) {
    if (burst_left == 0 && burst_p > 0.0 && rng.uniform() < burst_p) {
      const double secs = rng.uniform(cfg.burst_min_s, cfg.burst_max_s);
      burst_left = std::max<std::size_t>(1, static_cast<std::size_t>(secs * cfg.sample_rate_hz));
      burst_g = rotate(random_rotation(rng, cfg.burst_amplitude_deg), g);
    }
    const Vec3& base = burst_left > 0 ? burst_g : g;
    if (burst_left > 0) --burst_left;
    AccelSample s{base[0] * cfg.gravity, base[1] * cfg.gravity, base[2] * cfg.gravity};
    if (noise > 0.0) {
      s.x += rng.normal(0.0, noise);
      s.y += rng.normal(0.0, noise);
      s.z += rng.normal(0.0, noise);
    }
    ep.samples.push_back(s);
  }
  return ep;
}

Dataset generate_dataset(const SynthConfig& cfg) {
  Dataset ds;
  ds.label_set = cfg.postures;
  ds.provenance = "synthetic";
  for (std::size_t s = 0; s < cfg.subjects; ++s) {
    for (SensorLocation loc : cfg.locations) {
      std::size_t counter = 0;
      for (std::size_t k = 0; k < cfg.episodes_per_posture; ++k) {
        for (PostureLabel p : cfg.postures) {
          Episode ep = generate_episode(cfg, s, p, loc, k);
          ep.id = ep.subject_id + "/" + std::string(to_string(loc)) + "/" + std::to_string(counter++);
          ds.episodes.push_back(std::move(ep));
        }
      }
    }
  }
  return ds;
}

}  // namespace posture
