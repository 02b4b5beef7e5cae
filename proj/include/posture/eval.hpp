#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posture/types.hpp"

namespace posture {

struct FoldSplit {
  std::string name;  // fold number or held-out subject id
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct SplitPlan {
  std::vector<FoldSplit> folds;
  std::vector<std::string> warnings;
};

/// Label-stratified k folds at episode granularity. Throws TooFewEpisodes when k > N.
SplitPlan kfold_split(const std::vector<Episode>& episodes, std::size_t k, std::uint64_t seed);

/// One fold per subject (sorted by id). Subjects listed in `expected_subjects`
/// with no episodes are skipped with a warning. Throws SingleSubject.
SplitPlan loso_split(const std::vector<Episode>& episodes, const std::vector<std::string>& expected_subjects = {});

/// Rows are actual labels, columns predicted ones.
struct ConfusionMatrix {
  LabelSet label_set;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(LabelSet labels = {});
  std::size_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch or UnknownLabel.
ConfusionMatrix confusion_matrix(const std::vector<PostureLabel>& actual, const std::vector<PostureLabel>& predicted,
                                 const LabelSet& label_set);

struct MetricSet {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Macro-averaged one-vs-rest metrics over every class in the label set. Terms
/// with a zero denominator contribute 0 and the class still counts. Throws EmptyMatrix.
MetricSet compute_metrics(const ConfusionMatrix& cm);

/// Sample standard deviation over mean; a single value gives 0. Throws ZeroMean.
double cov(const std::vector<double>& values);

double mean(const std::vector<double>& values);
/// Sample (N-1) standard deviation; 0 for fewer than two values.
double sample_std(const std::vector<double>& values);

struct KruskalResult {
  double h = 0.0;
  double p_value = 1.0;  // chi-square approximation, df = groups - 1
  std::size_t df = 0;
  std::optional<double> p_exact;  // permutation p, only for small N
  bool degenerate = false;        // every observation identical
};

inline constexpr std::size_t kExactKruskalMaxN = 10;

/// Tie-corrected Kruskal-Wallis H. The exact permutation p is filled in when
/// N <= kExactKruskalMaxN. Throws DegenerateInput for empty groups or N < 3.
KruskalResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double df);

}  // namespace posture
