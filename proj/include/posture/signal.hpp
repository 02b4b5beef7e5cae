#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posture/types.hpp"

namespace posture {

/// Median of the per-sample vector magnitudes.
double median_magnitude(const Episode& ep);

/// Rescales every sample by one scalar so the median magnitude becomes 1 g.
/// Throws NonFinite or ZeroSignal.
Episode normalize_episode(const Episode& ep);

/// A tri-axial recording with one label string per sample, as read from a
/// subject x location CSV file.
struct LabeledStream {
  std::vector<AccelSample> samples;
  std::vector<std::string> labels;
  double sample_rate_hz = 30.0;
  std::string subject_id;
  SensorLocation location = SensorLocation::Chest;
  std::string provenance;
};

struct LabelRun {
  std::size_t start = 0;
  std::size_t length = 0;
  std::string label;
};

/// Run-length encoding of the stream's labels; the runs tile the stream.
std::vector<LabelRun> label_runs(const LabeledStream& stream);

/// Maximal runs whose label belongs to `lying_labels` become episodes, in time
/// order. Other runs are dropped. Throws EmptyStream.
std::vector<Episode> segment_into_episodes(const LabeledStream& stream, const LabelSet& lying_labels);

/// round-half-up of window_len * (1 - overlap), never below 1.
std::size_t window_stride(std::size_t window_len, double overlap);

/// Full windows at a fixed stride; the trailing partial window is discarded.
/// Throws EpisodeTooShort when the episode is shorter than one window.
std::vector<Window> sliding_windows(const Episode& ep, std::size_t window_len, double overlap);

/// Inference-side windowing: episodes shorter than window_len yield a single
/// window spanning the whole episode.
std::vector<Window> inference_windows(const Episode& ep, std::size_t window_len, double overlap);

std::size_t min_episode_length(const std::vector<Episode>& episodes);
std::size_t min_episode_length(const Dataset& train);

/// Non-overlapping chunks of exactly chunk_len samples; the remainder is dropped.
std::vector<Episode> split_long_episode(const Episode& ep, std::size_t chunk_len);

/// Keeps, per label, a seeded random subset of min-class-count episodes. Output
/// preserves input order.
Dataset undersample_balance(const Dataset& ds, std::uint64_t seed);

/// Union of both datasets restricted to `common_locations`. Throws
/// AxisConventionMismatch when the declared conventions differ.
Dataset integrate_datasets(const Dataset& a, const Dataset& b,
                           const std::vector<SensorLocation>& common_locations);

/// Episodes of `ds` at one sensor site.
Dataset filter_location(const Dataset& ds, SensorLocation location);

}  // namespace posture
