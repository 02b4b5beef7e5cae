#include "posture/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "posture/signal.hpp"

namespace posture {

namespace {

struct FeatureSlot {
  Feature feature;
  std::string_view mnemonic;
  int first;  // 1-based index of the x slot (or the only slot)
};

constexpr FeatureSlot kSlots[] = {
    {Feature::AMP, "AMP", 1},   {Feature::MED, "MED", 4},   {Feature::MEAN, "MEAN", 7},
    {Feature::MAX, "MAX", 10},  {Feature::MIN, "MIN", 13},  {Feature::VAR, "VAR", 16},
    {Feature::STD, "STD", 19},  {Feature::RMS, "RMS", 22},  {Feature::P2P, "P2P", 25},
    {Feature::ZCR, "ZCR", 28},  {Feature::ENT, "ENT", 31},  {Feature::SKN, "SKN", 34},
    {Feature::KRT, "KRT", 37},  {Feature::MAG, "MAG", 40},  {Feature::ENG, "ENG", 41},
    {Feature::RNG, "RNG", 42},  {Feature::ANG, "ANG", 45},  {Feature::MAD, "MAD", 46},
};

const FeatureSlot& slot(Feature f) {
  for (const auto& s : kSlots) {
    if (s.feature == f) return s;
  }
  throw Error(Errc::UnknownFeature, "unknown feature enumerator");
}

std::size_t idx(Feature f, Axis a) { return static_cast<std::size_t>(slot(f).first - 1 + static_cast<int>(a)); }
std::size_t idx(Feature f) { return static_cast<std::size_t>(slot(f).first - 1); }

struct AxisStats {
  double mean, median, max, min, var, std, rms, range, zcr, entropy, skew, kurt, mad;
};

double histogram_entropy(const std::vector<double>& v, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  std::array<std::size_t, kEntropyBins> counts{};
  const double width = hi - lo;
  for (double s : v) {
    auto bin = static_cast<std::size_t>((s - lo) / width * static_cast<double>(kEntropyBins));
    counts[std::min(bin, kEntropyBins - 1)]++;
  }
  const double n = static_cast<double>(v.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

AxisStats axis_stats(std::vector<double> v) {
  const std::size_t n = v.size();
  const double nd = static_cast<double>(n);
  AxisStats st{};

  double sum = 0.0, sumsq = 0.0;
  for (double s : v) {
    sum += s;
    sumsq += s * s;
  }
  st.mean = sum / nd;
  st.rms = std::sqrt(sumsq / nd);

  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  st.min = *mn;
  st.max = *mx;
  st.range = st.max - st.min;

  std::size_t changes = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if ((v[i - 1] >= 0.0) != (v[i] >= 0.0)) ++changes;
  }
  st.zcr = static_cast<double>(changes) / (nd - 1.0);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0;
  for (double s : v) {
    const double d = s - st.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
    abs_dev += std::abs(d);
  }
  st.var = m2 / (nd - 1.0);
  st.std = std::sqrt(st.var);
  st.mad = abs_dev / nd;
  // A constant window can leave rounding residue in the variance.
  const double scale = std::max({1.0, std::abs(st.max), std::abs(st.min)});
  if (st.range == 0.0 || st.std <= 1e-12 * scale) {
    st.skew = 0.0;
    st.kurt = 0.0;
  } else {
    const double s3 = st.std * st.std * st.std;
    st.skew = (m3 / nd) / s3;
    st.kurt = (m4 / nd) / (s3 * st.std);
  }

  st.entropy = histogram_entropy(v, st.min, st.max);

  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) {
    st.median = *mid;
  } else {
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    st.median = 0.5 * (lower + upper);
  }
  return st;
}

}  // namespace

bool is_per_axis(Feature feature) {
  return feature != Feature::MAG && feature != Feature::ENG && feature != Feature::ANG;
}

std::optional<Feature> parse_feature(std::string_view mnemonic) {
  for (const auto& s : kSlots) {
    if (s.mnemonic == mnemonic) return s.feature;
  }
  return std::nullopt;
}

int feature_index(Feature feature, std::optional<Axis> axis) {
  const auto& s = slot(feature);
  if (is_per_axis(feature)) {
    if (!axis) throw Error(Errc::AxisRequired, std::string(s.mnemonic) + " is computed per axis");
    return s.first + static_cast<int>(*axis);
  }
  if (axis) throw Error(Errc::AxisForbidden, std::string(s.mnemonic) + " is a scalar feature");
  return s.first;
}

int feature_index(std::string_view mnemonic, std::optional<Axis> axis) {
  const auto f = parse_feature(mnemonic);
  if (!f) throw Error(Errc::UnknownFeature, "'" + std::string(mnemonic) + "'");
  return feature_index(*f, axis);
}

std::string feature_name(int index) {
  if (index < 1 || index > static_cast<int>(kFeatureCount)) {
    throw Error(Errc::UnknownFeature, "feature number " + std::to_string(index));
  }
  const FeatureSlot* best = nullptr;
  for (const auto& s : kSlots) {
    if (s.first <= index) best = &s;
  }
  std::string name(best->mnemonic);
  if (is_per_axis(best->feature)) {
    name += '_';
    name += "xyz"[index - best->first];
  }
  return name;
}

FeatureVector48 window_features(const Window& w) {
  const std::size_t n = w.size();
  if (n < 2) throw Error(Errc::WindowTooShort, "window has " + std::to_string(n) + " samples");

  std::array<std::vector<double>, 3> axes;
  for (auto& a : axes) a.reserve(n);
  double mag_sum = 0.0, energy = 0.0;
  double angle = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const AccelSample& s = w[i];
    if (!s.finite()) throw Error(Errc::NonFinite, "window contains a non-finite sample");
    axes[0].push_back(s.x);
    axes[1].push_back(s.y);
    axes[2].push_back(s.z);
    const double sq = s.x * s.x + s.y * s.y + s.z * s.z;
    mag_sum += std::sqrt(sq);
    energy += sq;
    angle = std::max(angle, std::atan2(s.z, std::sqrt(s.x * s.x + s.y * s.y)));
  }

  FeatureVector48 f{};
  for (int a = 0; a < 3; ++a) {
    const Axis axis = static_cast<Axis>(a);
    const AxisStats st = axis_stats(std::move(axes[static_cast<std::size_t>(a)]));
    f[idx(Feature::AMP, axis)] = st.max - st.mean;
    f[idx(Feature::MED, axis)] = st.median;
    f[idx(Feature::MEAN, axis)] = st.mean;
    f[idx(Feature::MAX, axis)] = st.max;
    f[idx(Feature::MIN, axis)] = st.min;
    f[idx(Feature::VAR, axis)] = st.var;
    f[idx(Feature::STD, axis)] = st.std;
    f[idx(Feature::RMS, axis)] = st.rms;
    f[idx(Feature::P2P, axis)] = st.range;
    f[idx(Feature::ZCR, axis)] = st.zcr;
    f[idx(Feature::ENT, axis)] = st.entropy;
    f[idx(Feature::SKN, axis)] = st.skew;
    f[idx(Feature::KRT, axis)] = st.kurt;
    f[idx(Feature::RNG, axis)] = st.range;
    f[idx(Feature::MAD, axis)] = st.mad;
  }
  f[idx(Feature::MAG)] = mag_sum / static_cast<double>(n);
  f[idx(Feature::ENG)] = energy;
  f[idx(Feature::ANG)] = angle;
  return f;
}

MetaFeatures episode_meta_features(const Episode& ep, std::size_t window_len, double overlap,
                                   WindowPolicy policy) {
  const auto windows = policy == WindowPolicy::Strict ? sliding_windows(ep, window_len, overlap)
                                                      : inference_windows(ep, window_len, overlap);
  MetaFeatures meta;
  meta.episode = &ep;
  meta.window_count = windows.size();
  for (const auto& w : windows) {
    const auto f = window_features(w);
    for (std::size_t k = 0; k < kFeatureCount; ++k) meta.values[k] += f[k];
  }
  for (auto& v : meta.values) v /= static_cast<double>(windows.size());
  return meta;
}

}  // namespace posture
