#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "posture/synth.hpp"
#include "test_util.hpp"

using namespace posture;

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 axis_means(const Episode& ep) {
  Vec3 m{};
  for (const auto& s : ep.samples) {
    m[0] += s.x;
    m[1] += s.y;
    m[2] += s.z;
  }
  for (auto& v : m) v /= static_cast<double>(ep.size());
  return m;
}

std::array<double, 3> axis_vars(const Episode& ep) {
  oracle::Axis3 a;
  for (const auto& s : ep.samples) {
    a.x.push_back(s.x);
    a.y.push_back(s.y);
    a.z.push_back(s.z);
  }
  return {oracle::sample_var(a.x), oracle::sample_var(a.y), oracle::sample_var(a.z)};
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("nominal table is unit length with the chest sign pattern") {
  for (auto p : kAllPostures) {
    for (auto l : kAllLocations) {
      const auto o = nominal_orientation(p, l);
      CHECK(norm(o.gravity) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto sup = nominal_orientation(PostureLabel::Supine, SensorLocation::Chest).gravity;
  const auto pro = nominal_orientation(PostureLabel::Prone, SensorLocation::Chest).gravity;
  const auto left = nominal_orientation(PostureLabel::LeftSide, SensorLocation::Chest).gravity;
  const auto right = nominal_orientation(PostureLabel::RightSide, SensorLocation::Chest).gravity;
  CHECK(sup[2] == 0.94);
  CHECK(pro[2] == -0.80);
  CHECK(left[0] == -0.82);
  CHECK(right[0] == -left[0]);
  CHECK(right[1] == left[1]);
  CHECK(right[2] == left[2]);
  CHECK(movement_tier(SensorLocation::Chest) == MovementTier::Low);
  CHECK(movement_tier(SensorLocation::LeftAnkle) == MovementTier::Low);
  CHECK(movement_tier(SensorLocation::RightWrist) == MovementTier::High);
  CHECK(movement_tier(SensorLocation::LeftArm) == MovementTier::High);
}

TEST_CASE("zero-noise limit reproduces the nominal vector") {
  SynthConfig cfg = SynthConfig().noiseless();
  cfg.gravity = 9.8;
  const auto ep = generate_episode(cfg, 0, PostureLabel::Supine, SensorLocation::Chest);
  const auto g = nominal_orientation(PostureLabel::Supine, SensorLocation::Chest).gravity;
  CHECK(ep.size() >= cfg.min_length);
  CHECK(ep.size() <= cfg.max_length);
  for (const auto& s : ep.samples) {
    CHECK(s == ep.samples.front());
    CHECK(s.z == doctest::Approx(0.94 * 9.8).epsilon(1e-12));
    CHECK(s.norm() == doctest::Approx(9.8).epsilon(1e-12));
    CHECK(s.x == doctest::Approx(g[0] * 9.8).epsilon(1e-12));
  }
}

TEST_CASE("rotation helpers") {
  const auto R = axis_angle_rotation({0, 0, 1}, M_PI / 2);
  const auto v = rotate(R, {1, 0, 0});
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(1.0));
  SynthConfig cfg;
  const auto a = subject_rotation(cfg, 3);
  CHECK(a == subject_rotation(cfg, 3));
  CHECK_FALSE(a == subject_rotation(cfg, 4));
  const auto u = rotate(a, {0.6, 0.0, 0.8});
  CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(subject_name(0) == "s01");
  CHECK(subject_name(19) == "s20");
}

TEST_CASE("a subject's rotation is shared by all their episodes") {
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  const auto R = subject_rotation(cfg, 5);
  for (auto p : kAllPostures) {
    for (auto l : {SensorLocation::Chest, SensorLocation::LeftThigh, SensorLocation::RightAnkle}) {
      const auto ep = generate_episode(cfg, 5, p, l);
      const auto want = rotate(R, nominal_orientation(p, l).gravity);
      CHECK(ep.samples[0].x == doctest::Approx(want[0]).epsilon(1e-12));
      CHECK(ep.samples[0].y == doctest::Approx(want[1]).epsilon(1e-12));
      CHECK(ep.samples[0].z == doctest::Approx(want[2]).epsilon(1e-12));
    }
  }
}

TEST_CASE("determinism") {
  SynthConfig cfg;
  const auto a = generate_episode(cfg, 2, PostureLabel::Prone, SensorLocation::LeftWrist);
  const auto b = generate_episode(cfg, 2, PostureLabel::Prone, SensorLocation::LeftWrist);
  CHECK(a.samples == b.samples);
  const auto c = generate_episode(cfg, 2, PostureLabel::Prone, SensorLocation::LeftWrist, 1);
  CHECK_FALSE(a.samples == c.samples);
  cfg.seed = 43;
  CHECK_FALSE(a.samples == generate_episode(cfg, 2, PostureLabel::Prone, SensorLocation::LeftWrist).samples);
}

TEST_CASE("dataset counts and ids") {
  SynthConfig cfg;
  cfg.postures = {PostureLabel::Supine, PostureLabel::Prone, PostureLabel::LeftSide};
  cfg.locations = {SensorLocation::Chest};
  const auto ds = generate_dataset(cfg);
  CHECK(ds.episodes.size() == 60);
  CHECK(ds.label_set == cfg.postures);
  std::map<PostureLabel, int> per;
  std::set<std::string> ids;
  for (const auto& e : ds.episodes) {
    per[e.label]++;
    ids.insert(e.id);
    CHECK_NOTHROW(validate(e));
  }
  CHECK(ids.size() == 60);
  for (auto [l, n] : per) CHECK(n == 20);

  const auto full = generate_dataset(SynthConfig{});
  CHECK(full.episodes.size() == 20 * 4 * 9);
}

TEST_CASE("chest class means follow the sign pattern") {
  for (double jitter : {5.0, 10.0}) {
    SynthConfig cfg;
    cfg.subject_jitter_deg = jitter;
    cfg.locations = {SensorLocation::Chest};
    const auto ds = generate_dataset(cfg);
    std::map<PostureLabel, Vec3> sum;
    std::map<PostureLabel, int> n;
    for (const auto& e : ds.episodes) {
      const auto m = axis_means(e);
      for (int k = 0; k < 3; ++k) sum[e.label][static_cast<std::size_t>(k)] += m[static_cast<std::size_t>(k)];
      n[e.label]++;
    }
    CHECK(sum[PostureLabel::Supine][2] > 0.0);
    CHECK(sum[PostureLabel::Prone][2] < 0.0);
    CHECK(sum[PostureLabel::LeftSide][0] < 0.0);
    CHECK(sum[PostureLabel::Supine][2] / n[PostureLabel::Supine] == doctest::Approx(0.94).epsilon(0.03));
  }
}

TEST_CASE("high tier sites vary more than the chest") {
  SynthConfig cfg;
  int ordered = 0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const auto p = kAllPostures[trial % 4];
    const auto wrist = axis_vars(generate_episode(cfg, trial % 20, p, SensorLocation::RightWrist, trial));
    const auto chest = axis_vars(generate_episode(cfg, trial % 20, p, SensorLocation::Chest, trial));
    ordered += wrist[0] > chest[0] && wrist[1] > chest[1] && wrist[2] > chest[2];
  }
  CHECK(ordered >= 95);
}

TEST_CASE("overrides and config errors") {
  SynthConfig cfg = SynthConfig().noiseless();
  cfg.orientation_overrides[{PostureLabel::Supine, SensorLocation::Chest}] = {0, 0, 2};
  const auto ep = generate_episode(cfg, 0, PostureLabel::Supine, SensorLocation::Chest);
  CHECK(ep.samples[0] == AccelSample{0, 0, 1});
  cfg.max_length = 10;
  CHECK_THROWS_CODE(generate_episode(cfg, 0, PostureLabel::Supine, SensorLocation::Chest), Errc::InvalidArgument);
}

}  // TEST_SUITE
