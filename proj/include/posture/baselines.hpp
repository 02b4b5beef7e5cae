#pragma once

#include <array>
#include <vector>

#include "posture/types.hpp"

namespace posture {

/// Per-axis mean over a whole episode, in g.
struct MeanFeature3 {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double mean_z = 0.0;

  std::array<double, 3> as_array() const { return {mean_x, mean_y, mean_z}; }
};

/// Throws EmptyEpisode.
MeanFeature3 mean_features(const Episode& ep);

struct LdaParams {
  bool ridge = true;  // adds 1e-6 * trace(cov) / 3 to the diagonal
};

struct LdaModel {
  LabelSet label_set;  // classes seen during fitting, in label_set order
  std::vector<std::array<double, 3>> class_means;
  std::array<double, 9> covariance{};  // pooled, row-major, ridge included
  std::vector<double> priors;

  // Precomputed linear discriminants: score_k(x) = coef_k . x + intercept_k
  std::vector<std::array<double, 3>> coef;
  std::vector<double> intercept;
};

/// Pooled-covariance LDA ((N-K) denominator). Throws UnknownClassCount when fewer
/// than two classes are present, SingularCovariance when the covariance cannot be inverted.
LdaModel lda_fit(const std::vector<MeanFeature3>& X, const std::vector<PostureLabel>& y, const LabelSet& label_set,
                 const LdaParams& params = {});
std::vector<double> lda_scores(const LdaModel& model, const MeanFeature3& x);
PostureLabel lda_predict(const LdaModel& model, const MeanFeature3& x);

struct SvmParams {
  double C = 1.0;
  double tolerance = 1e-6;
  std::size_t max_epochs = 10000;  // an epoch is n pair updates
};

/// One-vs-rest linear SVMs with an unregularized bias.
struct LinearSvmModel {
  LabelSet label_set;
  std::vector<std::array<double, 3>> weights;
  std::vector<double> biases;
  SvmParams params;
  bool converged = true;  // false when any binary problem hit the iteration cap
};

/// Dual solver over pairs of coordinates with maximal-violating-pair selection.
/// Deterministic. Throws UnknownClassCount for fewer than two classes.
LinearSvmModel svm_fit(const std::vector<MeanFeature3>& X, const std::vector<PostureLabel>& y,
                       const LabelSet& label_set, const SvmParams& params = {});
std::vector<double> svm_decision_values(const LinearSvmModel& model, const MeanFeature3& x);
PostureLabel svm_predict(const LinearSvmModel& model, const MeanFeature3& x);

}  // namespace posture
