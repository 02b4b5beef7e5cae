#include "posture/signal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "posture/rng.hpp"

namespace posture {

double median_magnitude(const Episode& ep) {
  if (ep.samples.empty()) throw Error(Errc::EmptyEpisode, "median of empty episode");
  std::vector<double> mags;
  mags.reserve(ep.samples.size());
  for (const auto& s : ep.samples) {
    if (!s.finite()) throw Error(Errc::NonFinite, "episode '" + ep.id + "' has a non-finite sample");
    mags.push_back(s.norm());
  }
  std::sort(mags.begin(), mags.end());
  const std::size_t n = mags.size();
  return n % 2 == 1 ? mags[n / 2] : 0.5 * (mags[n / 2 - 1] + mags[n / 2]);
}

Episode normalize_episode(const Episode& ep) {
  const double med = median_magnitude(ep);
  if (med <= 0.0) throw Error(Errc::ZeroSignal, "episode '" + ep.id + "' has zero median magnitude");
  Episode out = ep;
  if (med == 1.0) return out;
  const double scale = 1.0 / med;
  for (auto& s : out.samples) {
    s.x *= scale;
    s.y *= scale;
    s.z *= scale;
  }
  return out;
}

std::vector<LabelRun> label_runs(const LabeledStream& stream) {
  if (stream.samples.size() != stream.labels.size()) {
    throw Error(Errc::LengthMismatch, "stream has " + std::to_string(stream.samples.size()) +
                                          " samples but " + std::to_string(stream.labels.size()) +
                                          " labels");
  }
  std::vector<LabelRun> runs;
  for (std::size_t i = 0; i < stream.labels.size(); ++i) {
    if (runs.empty() || runs.back().label != stream.labels[i]) {
      runs.push_back({i, 0, stream.labels[i]});
    }
    ++runs.back().length;
  }
  return runs;
}

std::vector<Episode> segment_into_episodes(const LabeledStream& stream, const LabelSet& lying_labels) {
  if (stream.samples.empty()) throw Error(Errc::EmptyStream, "stream has no samples");
  std::vector<Episode> episodes;
  std::size_t counter = 0;
  for (const auto& run : label_runs(stream)) {
    const auto posture = parse_posture(run.label);
    if (!posture || std::find(lying_labels.begin(), lying_labels.end(), *posture) == lying_labels.end()) {
      continue;
    }
    Episode ep;
    ep.samples.assign(stream.samples.begin() + static_cast<std::ptrdiff_t>(run.start),
                      stream.samples.begin() + static_cast<std::ptrdiff_t>(run.start + run.length));
    ep.sample_rate_hz = stream.sample_rate_hz;
    ep.subject_id = stream.subject_id;
    ep.location = stream.location;
    ep.label = *posture;
    ep.provenance = stream.provenance;
    ep.id = stream.subject_id + "/" + std::string(to_string(stream.location)) + "/" +
            std::to_string(counter++);
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

std::size_t window_stride(std::size_t window_len, double overlap) {
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw Error(Errc::InvalidArgument, "overlap must lie in [0, 1)");
  }
  const auto stride = static_cast<std::size_t>(std::floor(static_cast<double>(window_len) * (1.0 - overlap) + 0.5));
  return std::max<std::size_t>(stride, 1);
}

std::vector<Window> sliding_windows(const Episode& ep, std::size_t window_len, double overlap) {
  if (window_len < 2) throw Error(Errc::InvalidArgument, "window length must be at least 2");
  const std::size_t stride = window_stride(window_len, overlap);
  if (ep.samples.size() < window_len) {
    throw Error(Errc::EpisodeTooShort, "episode '" + ep.id + "' has " + std::to_string(ep.samples.size()) +
                                           " samples, window needs " + std::to_string(window_len));
  }
  const std::span<const AccelSample> all(ep.samples);
  std::vector<Window> windows;
  for (std::size_t start = 0; start + window_len <= all.size(); start += stride) {
    windows.push_back({all.subspan(start, window_len), &ep, start});
  }
  return windows;
}

std::vector<Window> inference_windows(const Episode& ep, std::size_t window_len, double overlap) {
  if (ep.samples.empty()) throw Error(Errc::EmptyEpisode, "episode '" + ep.id + "' has no samples");
  if (ep.samples.size() < window_len) {
    return {Window{std::span<const AccelSample>(ep.samples), &ep, 0}};
  }
  return sliding_windows(ep, window_len, overlap);
}

std::size_t min_episode_length(const std::vector<Episode>& episodes) {
  if (episodes.empty()) throw Error(Errc::EmptyDataset, "no episodes");
  std::size_t best = episodes.front().size();
  for (const auto& ep : episodes) best = std::min(best, ep.size());
  return best;
}

std::size_t min_episode_length(const Dataset& train) { return min_episode_length(train.episodes); }

std::vector<Episode> split_long_episode(const Episode& ep, std::size_t chunk_len) {
  if (chunk_len < 1) throw Error(Errc::InvalidArgument, "chunk length must be positive");
  std::vector<Episode> chunks;
  const std::size_t count = ep.samples.size() / chunk_len;
  for (std::size_t k = 0; k < count; ++k) {
    Episode chunk = ep;
    chunk.samples.assign(ep.samples.begin() + static_cast<std::ptrdiff_t>(k * chunk_len),
                         ep.samples.begin() + static_cast<std::ptrdiff_t>((k + 1) * chunk_len));
    chunk.id = ep.id + "#" + std::to_string(k);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

Dataset undersample_balance(const Dataset& ds, std::uint64_t seed) {
  if (ds.episodes.empty()) throw Error(Errc::EmptyDataset, "nothing to balance");
  std::map<PostureLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < ds.episodes.size(); ++i) by_label[ds.episodes[i].label].push_back(i);
  std::size_t target = ds.episodes.size();
  for (const auto& [label, idx] : by_label) target = std::min(target, idx.size());

  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (auto& [label, idx] : by_label) {
    rng.shuffle(idx);
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(target));
  }
  std::sort(keep.begin(), keep.end());

  Dataset out;
  out.label_set = ds.label_set;
  out.provenance = ds.provenance;
  out.axis_convention = ds.axis_convention;
  for (std::size_t i : keep) out.episodes.push_back(ds.episodes[i]);
  return out;
}

Dataset integrate_datasets(const Dataset& a, const Dataset& b,
                           const std::vector<SensorLocation>& common_locations) {
  if (!a.episodes.empty() && !b.episodes.empty() && a.axis_convention != b.axis_convention) {
    throw Error(Errc::AxisConventionMismatch, "'" + a.axis_convention + "' vs '" + b.axis_convention + "'");
  }
  const auto keep = [&](const Episode& ep) {
    return std::find(common_locations.begin(), common_locations.end(), ep.location) != common_locations.end();
  };
  Dataset out;
  out.axis_convention = a.axis_convention;
  out.provenance = a.provenance + "+" + b.provenance;
  out.label_set = a.label_set;
  for (PostureLabel l : b.label_set) {
    if (std::find(out.label_set.begin(), out.label_set.end(), l) == out.label_set.end()) {
      out.label_set.push_back(l);
    }
  }
  for (const Dataset* src : {&a, &b}) {
    for (const auto& ep : src->episodes) {
      if (!keep(ep)) continue;
      Episode copy = ep;
      if (copy.provenance.empty()) copy.provenance = src->provenance;
      out.episodes.push_back(std::move(copy));
    }
  }
  return out;
}

Dataset filter_location(const Dataset& ds, SensorLocation location) {
  Dataset out;
  out.label_set = ds.label_set;
  out.provenance = ds.provenance;
  out.axis_convention = ds.axis_convention;
  for (const auto& ep : ds.episodes) {
    if (ep.location == location) out.episodes.push_back(ep);
  }
  return out;
}

}  // namespace posture
