#include "posture/experiment.hpp"

#include <algorithm>
#include <set>

#include "posture/features.hpp"
#include "posture/parallel.hpp"
#include "posture/rng.hpp"
#include "posture/signal.hpp"

namespace posture {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::EnsembleTrees: return "et";
    case ModelKind::AdaLstm: return "adalstm";
    case ModelKind::LstmFixed: return "lstm";
    case ModelKind::Lda: return "lda";
    case ModelKind::Svm: return "svm";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::EnsembleTrees, ModelKind::AdaLstm, ModelKind::LstmFixed, ModelKind::Lda,
                      ModelKind::Svm}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

SplitPlan make_split(const Dataset& dataset, const SplitSpec& split, std::uint64_t seed) {
  return split.kind == SplitSpec::Kind::Loso ? loso_split(dataset.episodes)
                                             : kfold_split(dataset.episodes, split.k, derive_seed(seed, 0xF01D));
}

namespace {

struct FoldOutput {
  FoldResult result;
  std::vector<StatisticRecord> audit;
  std::vector<std::string> warnings;
};

std::vector<PostureLabel> predict_fold(const ModelSpec& spec, const LabelSet& labels, const std::vector<Episode>& train,
                                       const std::vector<Episode>& test, std::size_t window_len, std::uint64_t seed,
                                       std::vector<std::string>& warnings) {
  std::vector<PostureLabel> y;
  for (const auto& ep : train) y.push_back(ep.label);
  std::vector<PostureLabel> predicted;

  switch (spec.kind) {
    case ModelKind::EnsembleTrees: {
      std::vector<FeatureVector48> X;
      for (const auto& ep : train) X.push_back(episode_meta_features(ep, window_len, spec.window_overlap).values);
      EnsembleParams params = spec.ensemble;
      params.threads = 1;
      const auto model = fit_bagged_ensemble(X, y, labels, seed, params);
      for (const auto& ep : test) {
        const auto f = episode_meta_features(ep, window_len, spec.window_overlap, WindowPolicy::SingleWindowFallback);
        predicted.push_back(predict_majority(model, f.values));
      }
      break;
    }
    case ModelKind::AdaLstm:
    case ModelKind::LstmFixed: {
      AdaLstmConfig cfg = spec.lstm;
      if (spec.kind == ModelKind::LstmFixed) cfg.schedule = LrSchedule::Fixed;
      const auto fitted = posture::train(init_model(labels, cfg, derive_seed(seed, 1)), train, derive_seed(seed, 2));
      warnings.insert(warnings.end(), fitted.warnings.begin(), fitted.warnings.end());
      for (const auto& ep : test) predicted.push_back(predict(fitted.model, ep));
      break;
    }
    case ModelKind::Lda:
    case ModelKind::Svm: {
      std::vector<MeanFeature3> X;
      for (const auto& ep : train) X.push_back(mean_features(ep));
      if (spec.kind == ModelKind::Lda) {
        const auto model = lda_fit(X, y, labels, spec.lda);
        for (const auto& ep : test) predicted.push_back(lda_predict(model, mean_features(ep)));
      } else {
        const auto model = svm_fit(X, y, labels, spec.svm);
        if (!model.converged) warnings.push_back("SVM hit the iteration cap; best iterate used");
        for (const auto& ep : test) predicted.push_back(svm_predict(model, mean_features(ep)));
      }
      break;
    }
  }
  return predicted;
}

FoldOutput run_fold(const Dataset& ds, const FoldSplit& fold, std::size_t fold_no, const ModelSpec& spec,
                    std::uint64_t seed) {
  FoldOutput out;
  out.result.fold = fold.name;
  const auto prepare = [&](const std::vector<std::size_t>& idx) {
    std::vector<Episode> eps;
    eps.reserve(idx.size());
    for (std::size_t i : idx) {
      const Episode& ep = ds.episodes[i];
      out.audit.push_back({fold_no, "normalization:" + ep.id, {ep.id}});
      eps.push_back(normalize_episode(ep));
    }
    return eps;
  };
  const auto train = prepare(fold.train);
  const auto test = prepare(fold.test);

  std::size_t window_len = 0;
  if (spec.kind == ModelKind::EnsembleTrees) {
    window_len = min_episode_length(train);
    StatisticRecord rec{fold_no, "window_len", {}};
    for (const auto& ep : train) rec.inputs.push_back(ep.id);
    out.audit.push_back(std::move(rec));
  }
  out.result.window_len = window_len;

  const auto predicted =
      predict_fold(spec, ds.label_set, train, test, window_len, derive_seed(seed, 100 + fold_no), out.warnings);
  std::vector<PostureLabel> actual;
  for (const auto& ep : test) {
    actual.push_back(ep.label);
    out.result.test_ids.push_back(ep.id);
  }
  out.result.confusion = confusion_matrix(actual, predicted, ds.label_set);
  out.result.metrics = compute_metrics(out.result.confusion);
  return out;
}

}  // namespace

EvalReport run_experiment(const Dataset& dataset, const ModelSpec& model, const SplitSpec& split, std::uint64_t seed,
                          const ExperimentOptions& options) {
  if (dataset.episodes.empty()) throw Error(Errc::EmptyDataset, "no episodes to evaluate");
  const SplitPlan plan = make_split(dataset, split, seed);
  std::vector<FoldOutput> outputs(plan.folds.size());
  parallel_for(plan.folds.size(), options.threads,
               [&](std::size_t f) { outputs[f] = run_fold(dataset, plan.folds[f], f, model, seed); });

  EvalReport report;
  report.model = std::string(to_string(model.kind));
  report.split = split.kind == SplitSpec::Kind::Loso ? "loso" : "kfold" + std::to_string(split.k);
  report.label_set = dataset.label_set;
  report.aggregate = ConfusionMatrix(dataset.label_set);
  report.warnings = plan.warnings;
  std::vector<double> acc, bal, prec, rec, f1;
  for (auto& out : outputs) {
    report.aggregate += out.result.confusion;
    const MetricSet& m = out.result.metrics;
    acc.push_back(m.accuracy);
    bal.push_back(m.balanced_accuracy);
    prec.push_back(m.precision);
    rec.push_back(m.recall);
    f1.push_back(m.f1);
    report.audit.insert(report.audit.end(), out.audit.begin(), out.audit.end());
    report.warnings.insert(report.warnings.end(), out.warnings.begin(), out.warnings.end());
    report.folds.push_back(std::move(out.result));
  }
  report.mean = {mean(acc), mean(bal), mean(prec), mean(rec), mean(f1)};
  report.std = {sample_std(acc), sample_std(bal), sample_std(prec), sample_std(rec), sample_std(f1)};
  if (report.mean.f1 != 0.0) report.cov_f1 = cov(f1);
  return report;
}

std::vector<std::string> leakage_violations(const EvalReport& report, const Dataset& dataset, const SplitSpec& split,
                                            std::uint64_t seed) {
  const SplitPlan plan = make_split(dataset, split, seed);
  std::vector<std::set<std::string>> train_ids(plan.folds.size());
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (std::size_t i : plan.folds[f].train) train_ids[f].insert(dataset.episodes[i].id);
  }
  std::vector<std::string> violations;
  const std::string norm_prefix = "normalization:";
  for (const auto& rec : report.audit) {
    if (rec.fold >= plan.folds.size()) {
      violations.push_back("record for unknown fold " + std::to_string(rec.fold));
      continue;
    }
    if (rec.statistic.starts_with(norm_prefix)) {
      const std::string own = rec.statistic.substr(norm_prefix.size());
      if (rec.inputs.size() != 1 || rec.inputs.front() != own) {
        violations.push_back("fold " + std::to_string(rec.fold) + ": normalization of " + own +
                             " read other episodes");
      }
      continue;
    }
    for (const auto& id : rec.inputs) {
      if (!train_ids[rec.fold].contains(id)) {
        violations.push_back("fold " + std::to_string(rec.fold) + ": " + rec.statistic + " read held-out episode " + id);
      }
    }
  }
  return violations;
}

}  // namespace posture
