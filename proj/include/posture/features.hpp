#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "posture/types.hpp"

namespace posture {

inline constexpr std::size_t kFeatureCount = 48;

/// Window-level time-domain features, stored 0-based; slot k holds feature number k+1.
using FeatureVector48 = std::array<double, kFeatureCount>;

enum class Feature { AMP, MED, MEAN, MAX, MIN, VAR, STD, RMS, P2P, ZCR, ENT, SKN, KRT, MAG, ENG, RNG, ANG, MAD };

enum class Axis { X, Y, Z };

/// Feature number (1..48). Per-axis features require an axis; MAG, ENG and ANG forbid one.
int feature_index(Feature feature, std::optional<Axis> axis = std::nullopt);
int feature_index(std::string_view mnemonic, std::optional<Axis> axis = std::nullopt);

/// Inverse of feature_index, e.g. 4 -> "MED_x", 40 -> "MAG".
std::string feature_name(int index);

bool is_per_axis(Feature feature);
std::optional<Feature> parse_feature(std::string_view mnemonic);

/// Number of histogram bins used by the entropy feature.
inline constexpr std::size_t kEntropyBins = 16;

/// All 48 features of one window. Throws WindowTooShort (< 2 samples) or NonFinite.
FeatureVector48 window_features(const Window& w);

enum class WindowPolicy {
  Strict,         // EpisodeTooShort when the episode is shorter than one window
  SingleWindowFallback,  // short episodes become one whole-episode window
};

struct MetaFeatures {
  FeatureVector48 values{};
  const Episode* episode = nullptr;
  std::size_t window_count = 0;
};

/// Per-feature mean of window_features over the episode's sliding windows.
MetaFeatures episode_meta_features(const Episode& ep, std::size_t window_len, double overlap,
                                   WindowPolicy policy = WindowPolicy::Strict);

}  // namespace posture
