#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "posture/features.hpp"
#include "posture/rng.hpp"
#include "posture/signal.hpp"
#include "test_util.hpp"

using namespace posture;

namespace {

Window whole(const Episode& ep) { return Window{std::span<const AccelSample>(ep.samples), &ep, 0}; }

Episode from_x(const std::vector<double>& xs) {
  Episode ep;
  ep.id = "x";
  for (double x : xs) ep.samples.push_back({x, 0.0, 1.0});
  return ep;
}

double at(const FeatureVector48& f, Feature feat, Axis a) { return f[static_cast<std::size_t>(feature_index(feat, a) - 1)]; }
double at(const FeatureVector48& f, Feature feat) { return f[static_cast<std::size_t>(feature_index(feat) - 1)]; }

}  // namespace

TEST_SUITE("features") {

TEST_CASE("index layout follows the table") {
  CHECK(feature_index("MED", Axis::X) == 4);
  CHECK(feature_index("MEAN", Axis::X) == 7);
  CHECK(feature_index("MIN", Axis::Z) == 15);
  CHECK(feature_index("MAG") == 40);
  CHECK(feature_index("ENG") == 41);
  CHECK(feature_index("ANG") == 45);
  CHECK(feature_index("MAD", Axis::Z) == 48);
  CHECK_THROWS_CODE(feature_index("ANG", Axis::X), Errc::AxisForbidden);
  CHECK_THROWS_CODE(feature_index("RMS"), Errc::AxisRequired);
  CHECK_THROWS_CODE(feature_index("FOO", Axis::X), Errc::UnknownFeature);
  CHECK(feature_name(4) == "MED_x");
  CHECK(feature_name(40) == "MAG");
  CHECK(feature_name(48) == "MAD_z");
  for (int i = 1; i <= 48; ++i) {
    const std::string name = feature_name(i);
    const auto us = name.find('_');
    const int back = us == std::string::npos
                         ? feature_index(name)
                         : feature_index(name.substr(0, us), static_cast<Axis>(std::string("xyz").find(name[us + 1])));
    CHECK(back == i);
  }
}

TEST_CASE("constant window") {
  const Episode ep = constant_episode({1, 0, 0}, 8);
  const auto f = window_features(whole(ep));
  CHECK(at(f, Feature::MEAN, Axis::X) == 1.0);
  CHECK(at(f, Feature::VAR, Axis::X) == 0.0);
  CHECK(at(f, Feature::AMP, Axis::X) == 0.0);
  CHECK(at(f, Feature::P2P, Axis::X) == 0.0);
  CHECK(at(f, Feature::RNG, Axis::X) == 0.0);
  CHECK(at(f, Feature::MAG) == 1.0);
  CHECK(at(f, Feature::SKN, Axis::X) == 0.0);
  CHECK(at(f, Feature::KRT, Axis::X) == 0.0);
  CHECK(at(f, Feature::ZCR, Axis::X) == 0.0);
  CHECK(at(f, Feature::ENT, Axis::X) == 0.0);
}

TEST_CASE("alternating signal") {
  const Episode ep = from_x({1, -1, 1, -1});
  const auto f = window_features(whole(ep));
  CHECK(at(f, Feature::MEAN, Axis::X) == 0.0);
  CHECK(at(f, Feature::STD, Axis::X) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
  CHECK(at(f, Feature::RMS, Axis::X) == 1.0);
  CHECK(at(f, Feature::P2P, Axis::X) == 2.0);
  CHECK(at(f, Feature::ZCR, Axis::X) == 1.0);
  CHECK(at(f, Feature::MED, Axis::X) == 0.0);
  CHECK(at(f, Feature::ENT, Axis::X) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("3-4-5 magnitude") {
  const Episode ep = constant_episode({3, 4, 0}, 5);
  const auto f = window_features(whole(ep));
  CHECK(at(f, Feature::MAG) == 5.0);
  CHECK(at(f, Feature::ENG) == 125.0);
  CHECK(at(f, Feature::ANG) == 0.0);
}

TEST_CASE("zero counts as positive for crossings") {
  const auto f = window_features(whole(from_x({0, -1, 0, 0, 2})));
  CHECK(at(f, Feature::ZCR, Axis::X) == doctest::Approx(2.0 / 4.0));
}

TEST_CASE("random windows match the direct oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Episode ep;
    ep.id = "r";
    const std::size_t n = 2 + rng.below(150);
    oracle::Axis3 w;
    for (std::size_t i = 0; i < n; ++i) {
      AccelSample s{rng.normal(0, 0.5), rng.normal(0.2, 0.3), rng.normal(0.9, 0.2)};
      if (rng.uniform() < 0.05) s.x = 0.0;
      ep.samples.push_back(s);
      w.x.push_back(s.x);
      w.y.push_back(s.y);
      w.z.push_back(s.z);
    }
    const auto got = window_features(whole(ep));
    const auto want = oracle::features(w);
    for (std::size_t k = 0; k < 48; ++k) {
      INFO("feature ", feature_name(static_cast<int>(k + 1)), " n=", n);
      CHECK(std::isfinite(got[k]));
      const bool exact = k >= 24 && k < 27;  // P2P
      if (exact || (k >= 41 && k < 44)) {
        CHECK(got[k] == want[k]);
      } else {
        CHECK(std::abs(got[k] - want[k]) <= 1e-9 * std::max(1.0, std::abs(want[k])));
      }
    }
  }
}

TEST_CASE("window errors") {
  const Episode one = constant_episode({0, 0, 1}, 1);
  CHECK_THROWS_CODE(window_features(whole(one)), Errc::WindowTooShort);
  Episode bad = constant_episode({0, 0, 1}, 4);
  bad.samples[2].z = INFINITY;
  CHECK_THROWS_CODE(window_features(whole(bad)), Errc::NonFinite);
}

TEST_CASE("meta features average the windows") {
  Rng rng(5);
  Episode ep;
  ep.id = "m";
  for (int i = 0; i < 144; ++i) ep.samples.push_back({rng.normal(), rng.normal(), rng.normal()});

  const auto windows = sliding_windows(ep, 96, 0.5);
  REQUIRE(windows.size() == 2);
  const auto meta = episode_meta_features(ep, 96, 0.5);
  CHECK(meta.window_count == 2);
  CHECK(meta.episode == &ep);
  const auto a = window_features(windows[0]);
  const auto b = window_features(windows[1]);
  for (std::size_t k = 0; k < 48; ++k) CHECK(meta.values[k] == doctest::Approx((a[k] + b[k]) / 2).epsilon(1e-14));

  Episode single = ep;
  single.samples.resize(96);
  const auto one = episode_meta_features(single, 96, 0.5);
  CHECK(one.values == window_features(whole(single)));
}

TEST_CASE("meta features: two windows with means 1 and 3") {
  Episode ep = constant_episode({1, 0, 0}, 4);
  ep.samples.insert(ep.samples.end(), 4, AccelSample{3, 0, 0});
  const auto meta = episode_meta_features(ep, 4, 0.0);
  CHECK(meta.window_count == 2);
  CHECK(at(meta.values, Feature::MEAN, Axis::X) == 2.0);
}

TEST_CASE("meta features: short episode policy") {
  const Episode ep = constant_episode({0, 0, 1}, 50);
  CHECK_THROWS_CODE(episode_meta_features(ep, 96, 0.5), Errc::EpisodeTooShort);
  const auto meta = episode_meta_features(ep, 96, 0.5, WindowPolicy::SingleWindowFallback);
  CHECK(meta.window_count == 1);
  CHECK(at(meta.values, Feature::MEAN, Axis::Z) == 1.0);
}

}  // TEST_SUITE
