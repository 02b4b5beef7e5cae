#include "posture/eval.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "posture/rng.hpp"

namespace posture {

SplitPlan kfold_split(const std::vector<Episode>& episodes, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidArgument, "k-fold needs k >= 2");
  if (episodes.size() < k) {
    throw Error(Errc::TooFewEpisodes, std::to_string(episodes.size()) + " episodes for " + std::to_string(k) + " folds");
  }
  std::map<PostureLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < episodes.size(); ++i) by_label[episodes[i].label].push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> test(k);
  std::size_t next = 0;  // dealing continues across labels to keep fold sizes even
  for (auto& [label, idx] : by_label) {
    rng.shuffle(idx);
    for (std::size_t i : idx) {
      test[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  SplitPlan plan;
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(test[f].begin(), test[f].end());
    FoldSplit fold;
    fold.name = std::to_string(f);
    fold.test = test[f];
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      if (!std::binary_search(test[f].begin(), test[f].end(), i)) fold.train.push_back(i);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

SplitPlan loso_split(const std::vector<Episode>& episodes, const std::vector<std::string>& expected_subjects) {
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < episodes.size(); ++i) by_subject[episodes[i].subject_id].push_back(i);
  SplitPlan plan;
  for (const auto& s : expected_subjects) {
    if (!by_subject.contains(s)) plan.warnings.push_back("subject '" + s + "' has no episodes; skipped");
  }
  if (by_subject.size() < 2) throw Error(Errc::SingleSubject, "leave-one-subject-out needs two or more subjects");
  for (const auto& [subject, idx] : by_subject) {
    FoldSplit fold;
    fold.name = subject;
    fold.test = idx;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      if (episodes[i].subject_id != subject) fold.train.push_back(i);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

ConfusionMatrix::ConfusionMatrix(LabelSet labels)
    : label_set(std::move(labels)), counts(label_set.size(), std::vector<std::size_t>(label_set.size(), 0)) {}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.label_set != label_set) throw Error(Errc::DimensionMismatch, "confusion matrices over different labels");
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (std::size_t p = 0; p < counts.size(); ++p) counts[a][p] += other.counts[a][p];
  }
  return *this;
}

ConfusionMatrix confusion_matrix(const std::vector<PostureLabel>& actual, const std::vector<PostureLabel>& predicted,
                                 const LabelSet& label_set) {
  if (actual.size() != predicted.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(actual.size()) + " actual vs " +
                                          std::to_string(predicted.size()) + " predicted labels");
  }
  ConfusionMatrix cm(label_set);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    cm.counts[label_index(label_set, actual[i])][label_index(label_set, predicted[i])]++;
  }
  return cm;
}

MetricSet compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(Errc::EmptyMatrix, "confusion matrix has no entries");
  const std::size_t l = cm.label_set.size();
  const auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  double acc = 0, tpr = 0, tnr = 0, prec = 0, rec = 0;
  for (std::size_t i = 0; i < l; ++i) {
    double row = 0, col = 0;
    for (std::size_t j = 0; j < l; ++j) {
      row += static_cast<double>(cm.counts[i][j]);
      col += static_cast<double>(cm.counts[j][i]);
    }
    const double tp = static_cast<double>(cm.counts[i][i]);
    const double fn = row - tp, fp = col - tp;
    const double tn = static_cast<double>(total) - tp - fn - fp;
    acc += ratio(tp + tn, tp + tn + fp + fn);
    tpr += ratio(tp, tp + fn);
    tnr += ratio(tn, tn + fp);
    prec += ratio(tp, tp + fp);
    rec += ratio(tp, tp + fn);
  }
  const double ld = static_cast<double>(l);
  MetricSet m;
  m.accuracy = acc / ld;
  m.balanced_accuracy = (tpr + tnr) / (2.0 * ld);
  m.precision = prec / ld;
  m.recall = rec / ld;
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "mean of no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double cov(const std::vector<double>& values) {
  const double mu = mean(values);
  if (mu == 0.0) throw Error(Errc::ZeroMean, "coefficient of variation undefined for zero mean");
  return sample_std(values) / mu;
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

namespace {

/// H statistic (tie corrected) for values assigned to groups of the given sizes
/// in order; `ranks` are the mid-ranks of the pooled values.
double h_from_ranks(const std::vector<double>& ranks, const std::vector<std::size_t>& sizes, double tie_factor) {
  const double n = static_cast<double>(ranks.size());
  double sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t s : sizes) {
    double r = 0.0;
    for (std::size_t k = 0; k < s; ++k) r += ranks[pos++];
    sum += r * r / static_cast<double>(s);
  }
  const double h = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
  return h / tie_factor;
}

}  // namespace

KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(Errc::DegenerateInput, "Kruskal-Wallis needs at least two groups");
  std::vector<std::pair<double, std::size_t>> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.empty()) throw Error(Errc::DegenerateInput, "empty group");
    sizes.push_back(g.size());
    for (double v : g) pooled.push_back({v, pooled.size()});
  }
  const std::size_t N = pooled.size();
  if (N < 3) throw Error(Errc::DegenerateInput, "Kruskal-Wallis needs at least three observations");

  std::vector<std::pair<double, std::size_t>> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> ranks(N);
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < N;) {
    std::size_t j = i;
    while (j + 1 < N && sorted[j + 1].first == sorted[i].first) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[sorted[k].second] = mid;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  const double nd = static_cast<double>(N);
  const double tie_factor = 1.0 - tie_sum / (nd * nd * nd - nd);

  KruskalResult res;
  res.df = groups.size() - 1;
  if (tie_factor <= 0.0) {
    res.degenerate = true;
    res.h = 0.0;
    res.p_value = 1.0;
    if (N <= kExactKruskalMaxN) res.p_exact = 1.0;
    return res;
  }
  res.h = h_from_ranks(ranks, sizes, tie_factor);
  res.p_value = chi_square_sf(res.h, static_cast<double>(res.df));

  if (N <= kExactKruskalMaxN) {
    // Enumerate every distinct assignment of the pooled ranks to groups of the observed sizes.
    std::vector<int> owner(N, -1);
    std::vector<double> arranged(N);
    std::size_t extreme = 0, total = 0;
    const double threshold = res.h - 1e-9 * std::max(1.0, std::abs(res.h));
    std::vector<std::size_t> remaining = sizes;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == N) {
        std::size_t pos = 0;
        for (std::size_t g = 0; g < sizes.size(); ++g) {
          for (std::size_t k = 0; k < N; ++k) {
            if (owner[k] == static_cast<int>(g)) arranged[pos++] = ranks[k];
          }
        }
        ++total;
        if (h_from_ranks(arranged, sizes, tie_factor) >= threshold) ++extreme;
        return;
      }
      for (std::size_t g = 0; g < sizes.size(); ++g) {
        if (remaining[g] == 0) continue;
        --remaining[g];
        owner[i] = static_cast<int>(g);
        assign(i + 1);
        ++remaining[g];
      }
    };
    assign(0);
    res.p_exact = static_cast<double>(extreme) / static_cast<double>(total);
  }
  return res;
}

}  // namespace posture
