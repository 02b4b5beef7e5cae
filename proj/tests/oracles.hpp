#pragma once

// Reference implementations used as test oracles. They are written from the
// feature and metric definitions directly and share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

struct Axis3 {
  std::vector<double> x, y, z;
};

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s;
}

inline double mean(const std::vector<double>& v) { return sum(v) / static_cast<double>(v.size()); }

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double sample_var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double central_moment(const std::vector<double>& v, int k) {
  const double m = mean(v);
  double s = 0.0;
  for (double a : v) s += std::pow(a - m, k);
  return s / static_cast<double>(v.size());
}

inline double zero_crossing_rate(const std::vector<double>& v) {
  int changes = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const bool a = !(v[i - 1] < 0.0), b = !(v[i] < 0.0);
    changes += a != b;
  }
  return changes / static_cast<double>(v.size() - 1);
}

inline double entropy16(const std::vector<double>& v) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  if (hi == lo) return 0.0;
  std::map<int, int> bins;
  for (double a : v) {
    int b = static_cast<int>(std::floor((a - lo) / (hi - lo) * 16.0));
    bins[std::min(b, 15)]++;
  }
  double h = 0.0;
  for (auto [b, c] : bins) {
    const double p = c / static_cast<double>(v.size());
    h -= p * std::log(p);
  }
  return h;
}

// Features of one axis in table order: AMP MED MEAN MAX MIN VAR STD RMS P2P ZCR ENT SKN KRT ... RNG MAD.
struct AxisFeatures {
  double amp, med, mean, max, min, var, std, rms, p2p, zcr, ent, skn, krt, rng, mad;
};

inline AxisFeatures axis_features(const std::vector<double>& v) {
  AxisFeatures f{};
  f.mean = mean(v);
  f.max = *std::max_element(v.begin(), v.end());
  f.min = *std::min_element(v.begin(), v.end());
  f.amp = f.max - f.mean;
  f.med = median(v);
  f.var = sample_var(v);
  f.std = std::sqrt(f.var);
  double sq = 0.0;
  for (double a : v) sq += a * a;
  f.rms = std::sqrt(sq / static_cast<double>(v.size()));
  f.p2p = f.max - f.min;
  f.rng = f.p2p;
  f.zcr = zero_crossing_rate(v);
  f.ent = entropy16(v);
  if (f.p2p == 0.0 || f.std <= 1e-12 * std::max({1.0, std::abs(f.max), std::abs(f.min)})) {
    f.skn = 0.0;
    f.krt = 0.0;
  } else {
    f.skn = central_moment(v, 3) / std::pow(f.std, 3);
    f.krt = central_moment(v, 4) / std::pow(f.std, 4);
  }
  double ad = 0.0;
  for (double a : v) ad += std::abs(a - f.mean);
  f.mad = ad / static_cast<double>(v.size());
  return f;
}

// 48 features, 0-based storage, in the documented index layout.
inline std::array<double, 48> features(const Axis3& w) {
  std::array<double, 48> out{};
  const AxisFeatures a[3] = {axis_features(w.x), axis_features(w.y), axis_features(w.z)};
  for (int k = 0; k < 3; ++k) {
    out[0 + k] = a[k].amp;
    out[3 + k] = a[k].med;
    out[6 + k] = a[k].mean;
    out[9 + k] = a[k].max;
    out[12 + k] = a[k].min;
    out[15 + k] = a[k].var;
    out[18 + k] = a[k].std;
    out[21 + k] = a[k].rms;
    out[24 + k] = a[k].p2p;
    out[27 + k] = a[k].zcr;
    out[30 + k] = a[k].ent;
    out[33 + k] = a[k].skn;
    out[36 + k] = a[k].krt;
    out[41 + k] = a[k].rng;
    out[45 + k] = a[k].mad;
  }
  const std::size_t n = w.x.size();
  double mag = 0.0, eng = 0.0, ang = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double s2 = w.x[i] * w.x[i] + w.y[i] * w.y[i] + w.z[i] * w.z[i];
    mag += std::sqrt(s2);
    eng += s2;
    ang = std::max(ang, std::atan(w.z[i] / std::hypot(w.x[i], w.y[i])));
  }
  out[39] = mag / static_cast<double>(n);
  out[40] = eng;
  out[44] = ang;
  return out;
}

// One-vs-rest metrics from a confusion matrix (rows actual, columns
// predicted). TP/FP/FN/TN are counted cell by cell for every class.
struct Metrics {
  double accuracy, balanced_accuracy, precision, recall, f1;
};

inline Metrics metrics(const std::vector<std::vector<std::size_t>>& cm) {
  const std::size_t k = cm.size();
  const auto ratio = [](double n, double d) { return d > 0 ? n / d : 0.0; };
  double acc = 0, tpr = 0, tnr = 0, p = 0, r = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t q = 0; q < k; ++q) {
        const double n = static_cast<double>(cm[a][q]);
        if (a == c && q == c) tp += n;
        else if (a == c) fn += n;
        else if (q == c) fp += n;
        else tn += n;
      }
    }
    acc += ratio(tp + tn, tp + tn + fp + fn);
    tpr += ratio(tp, tp + fn);
    tnr += ratio(tn, tn + fp);
    p += ratio(tp, tp + fp);
    r += ratio(tp, tp + fn);
  }
  const double l = static_cast<double>(k);
  Metrics m{};
  m.accuracy = acc / l;
  m.balanced_accuracy = (tpr + tnr) / (2.0 * l);
  m.precision = p / l;
  m.recall = r / l;
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

// Kruskal-Wallis H with average ranks and the tie correction, computed by
// brute-force pairwise rank counting.
inline double kruskal_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const double n = static_cast<double>(all.size());
  auto rank_of = [&](double v) {
    double less = 0, equal = 0;
    for (double a : all) {
      less += a < v;
      equal += a == v;
    }
    return less + (equal + 1.0) / 2.0;
  };
  double h = 0.0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (double v : g) r += rank_of(v);
    h += r * r / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  std::map<double, double> ties;
  for (double a : all) ties[a] += 1.0;
  double t = 0.0;
  for (auto [v, c] : ties) t += c * c * c - c;
  const double corr = 1.0 - t / (n * n * n - n);
  return corr > 0 ? h / corr : 0.0;
}

// Exact permutation p-value: the fraction of all group relabelings (same
// group sizes) whose H is at least the observed H.
inline double kruskal_exact_p(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  std::vector<int> owner;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double v : groups[g]) {
      all.push_back(v);
      owner.push_back(static_cast<int>(g));
    }
  }
  const double h0 = kruskal_h(groups);
  std::sort(owner.begin(), owner.end());
  double hits = 0, total = 0;
  do {
    std::vector<std::vector<double>> perm(groups.size());
    for (std::size_t i = 0; i < all.size(); ++i) perm[static_cast<std::size_t>(owner[i])].push_back(all[i]);
    const double h = kruskal_h(perm);
    hits += h >= h0 - 1e-9;
    total += 1;
  } while (std::next_permutation(owner.begin(), owner.end()));
  return hits / total;
}

}  // namespace oracle
