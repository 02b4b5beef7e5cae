#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posture/adalstm.hpp"
#include "posture/baselines.hpp"
#include "posture/ensemble.hpp"
#include "posture/eval.hpp"
#include "posture/types.hpp"

namespace posture {

enum class ModelKind { EnsembleTrees, AdaLstm, LstmFixed, Lda, Svm };

std::string_view to_string(ModelKind kind);
/// Accepts "et", "adalstm", "lstm", "lda", "svm".
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::EnsembleTrees;
  EnsembleParams ensemble;
  AdaLstmConfig lstm;  // for LstmFixed the schedule is forced to Fixed
  LdaParams lda;
  SvmParams svm;
  double window_overlap = 0.5;
};

struct SplitSpec {
  enum class Kind { KFold, Loso } kind = Kind::Loso;
  std::size_t k = 10;
};

/// Which episodes fed each fold-level statistic.
struct StatisticRecord {
  std::size_t fold = 0;
  std::string statistic;  // "window_len" or "normalization:<episode id>"
  std::vector<std::string> inputs;
};

struct FoldResult {
  std::string fold;
  std::vector<std::string> test_ids;
  ConfusionMatrix confusion;
  MetricSet metrics;
  std::size_t window_len = 0;  // 0 when the model does not window
};

struct EvalReport {
  std::string model;
  std::string split;
  LabelSet label_set;
  std::vector<FoldResult> folds;
  MetricSet mean;
  MetricSet std;
  std::optional<double> cov_f1;  // empty when the mean F1 is zero
  ConfusionMatrix aggregate;
  std::vector<StatisticRecord> audit;
  std::vector<std::string> warnings;
};

struct ExperimentOptions {
  unsigned threads = 1;
};

/// Per fold: normalize, take the window size from the training fold, fit,
/// predict the held-out episodes. Deterministic for a given seed.
EvalReport run_experiment(const Dataset& dataset, const ModelSpec& model, const SplitSpec& split, std::uint64_t seed,
                          const ExperimentOptions& options = {});

/// Audit entries that read episodes outside their fold's training set (or, for
/// per-episode normalization, anything but the episode itself).
std::vector<std::string> leakage_violations(const EvalReport& report, const Dataset& dataset, const SplitSpec& split,
                                            std::uint64_t seed);

/// The fold plan run_experiment uses for this dataset, split and seed.
SplitPlan make_split(const Dataset& dataset, const SplitSpec& split, std::uint64_t seed);

}  // namespace posture
