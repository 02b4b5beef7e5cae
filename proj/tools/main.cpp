// posture: synthetic data, features, training, evaluation and model comparison.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "posture/features.hpp"
#include "posture/io.hpp"
#include "posture/report.hpp"
#include "posture/serialize.hpp"
#include "posture/signal.hpp"

using namespace posture;
using namespace posture::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

void write_json(const fs::path& path, json doc, const json& prov) {
  doc["provenance"] = prov;
  write_text_file(path, doc.dump(2) + "\n");
}

void write_provenance(const fs::path& dir, const json& prov) { write_json(dir / "provenance.json", json::object(), prov); }

std::vector<Episode> normalized(const Dataset& ds) {
  std::vector<Episode> eps;
  eps.reserve(ds.episodes.size());
  for (const auto& e : ds.episodes) eps.push_back(normalize_episode(e));
  return eps;
}

struct FeatureTable {
  std::vector<FeatureVector48> X;
  std::vector<PostureLabel> y;
  std::vector<const Episode*> refs;
  std::size_t window_len = 0;
};

FeatureTable feature_table(const std::vector<Episode>& eps, double overlap) {
  FeatureTable t;
  t.window_len = min_episode_length(eps);
  for (const auto& e : eps) {
    t.X.push_back(episode_meta_features(e, t.window_len, overlap).values);
    t.y.push_back(e.label);
    t.refs.push_back(&e);
  }
  return t;
}

std::string importance_csv(const FeatureVector48& importance) {
  std::vector<int> idx(kFeatureCount);
  std::iota(idx.begin(), idx.end(), 1);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return importance[static_cast<std::size_t>(a - 1)] > importance[static_cast<std::size_t>(b - 1)];
  });
  std::string csv = "rank,feature,name,importance\n";
  for (std::size_t r = 0; r < idx.size(); ++r) {
    csv += std::to_string(r + 1) + "," + std::to_string(idx[r]) + "," + feature_name(idx[r]) + "," +
           format_double(importance[static_cast<std::size_t>(idx[r] - 1)]) + "\n";
  }
  return csv;
}

BaggedEnsemble fit_ensemble(const Dataset& ds, const ExperimentConfig& cfg) {
  const auto eps = normalized(ds);
  const auto t = feature_table(eps, cfg.model.window_overlap);
  EnsembleParams params = cfg.model.ensemble;
  params.threads = cfg.threads;
  return fit_bagged_ensemble(t.X, t.y, ds.label_set, cfg.seed, params);
}

std::vector<SensorLocation> locations_of(const Dataset& ds) {
  std::vector<SensorLocation> locs;
  for (auto l : kAllLocations) {
    if (std::any_of(ds.episodes.begin(), ds.episodes.end(), [&](const Episode& e) { return e.location == l; })) {
      locs.push_back(l);
    }
  }
  return locs;
}

void cmd_synth(const ExperimentConfig& cfg) {
  if (cfg.manifest) throw UsageError("synth generates data; drop --manifest");
  const Dataset ds = generate_dataset(cfg.synth);
  write_dataset(ds, cfg.out);
  write_provenance(cfg.out, provenance("synth", cfg));
  std::printf("wrote %zu episodes to %s\n", ds.episodes.size(), cfg.out.c_str());
}

void cmd_features(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const auto eps = normalized(ds);
  const auto t = feature_table(eps, cfg.model.window_overlap);
  std::ostringstream csv;
  write_feature_csv(csv, t.X, t.refs);
  write_text_file(fs::path(cfg.out) / "features.csv", csv.str());
  write_provenance(cfg.out, provenance("features", cfg));
  std::printf("wrote %zu feature rows (window %zu)\n", t.X.size(), t.window_len);
}

void cmd_train(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const json prov = provenance("train", cfg);
  const fs::path out = cfg.out;
  switch (cfg.model.kind) {
    case ModelKind::EnsembleTrees: {
      const auto model = fit_ensemble(ds, cfg);
      write_json(out / "model.json", to_json(model), prov);
      write_text_file(out / "importance.csv", importance_csv(model.importance));
      break;
    }
    case ModelKind::AdaLstm:
    case ModelKind::LstmFixed: {
      AdaLstmConfig lc = cfg.model.lstm;
      if (cfg.model.kind == ModelKind::LstmFixed) lc.schedule = LrSchedule::Fixed;
      const auto result = train(init_model(ds.label_set, lc, cfg.seed), normalized(ds), derive_seed(cfg.seed, 1));
      write_json(out / "model.json", to_json(result.model), prov);
      std::string trace = "epoch,lr,mean_loss\n";
      for (const auto& e : result.trace) {
        trace += std::to_string(e.epoch) + "," + format_double(e.lr) + "," + format_double(e.mean_loss) + "\n";
      }
      write_text_file(out / "loss_trace.csv", trace);
      for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      break;
    }
    case ModelKind::Lda:
    case ModelKind::Svm: {
      std::vector<MeanFeature3> X;
      std::vector<PostureLabel> y;
      for (const auto& e : normalized(ds)) {
        X.push_back(mean_features(e));
        y.push_back(e.label);
      }
      if (cfg.model.kind == ModelKind::Lda) {
        write_json(out / "model.json", to_json(lda_fit(X, y, ds.label_set, cfg.model.lda)), prov);
      } else {
        const auto model = svm_fit(X, y, ds.label_set, cfg.model.svm);
        if (!model.converged) std::fprintf(stderr, "warning: SVM hit the iteration cap\n");
        write_json(out / "model.json", to_json(model), prov);
      }
      break;
    }
  }
  write_provenance(out, prov);
  std::printf("trained %s on %zu episodes\n", std::string(to_string(cfg.model.kind)).c_str(), ds.episodes.size());
}

EvalReport evaluate(const Dataset& ds, const ModelSpec& spec, const ExperimentConfig& cfg) {
  auto report = run_experiment(ds, spec, cfg.split, cfg.seed, ExperimentOptions{cfg.threads});
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return report;
}

void cmd_eval(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const json prov = provenance("eval", cfg);
  const fs::path out = cfg.out;
  std::string summary = kSummaryHeader;
  for (auto loc : locations_of(ds)) {
    const std::string name(to_string(loc));
    const auto report = evaluate(filter_location(ds, loc), cfg.model, cfg);
    write_json(out / ("report_" + name + ".json"), to_json(report), prov);
    write_text_file(out / ("folds_" + name + ".csv"), folds_csv(report));
    write_text_file(out / ("confusion_" + name + ".csv"), confusion_csv(report.aggregate));
    summary += summary_row(name, report);
    std::printf("%s: mean F1 %.4f over %zu folds\n", name.c_str(), report.mean.f1, report.folds.size());
  }
  write_text_file(out / "summary.csv", summary);
  write_provenance(out, prov);
}

json guarded_kruskal(const std::vector<std::vector<double>>& groups) {
  try {
    return to_json(kruskal_wallis(groups));
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateInput) throw;
    return {{"skipped", e.what()}};
  }
}

void cmd_compare(const ExperimentConfig& cfg) {
  if (cfg.compare_models.size() < 2) throw UsageError("compare needs at least two models (--models et,adalstm)");
  const Dataset ds = load_dataset(cfg);
  const json prov = provenance("compare", cfg);
  const fs::path out = cfg.out;
  std::string table = kSummaryHeader;
  std::vector<std::vector<double>> cov_by_model(cfg.compare_models.size());
  json per_location = json::array();
  for (auto loc : locations_of(ds)) {
    const std::string name(to_string(loc));
    const Dataset part = filter_location(ds, loc);
    std::vector<std::vector<double>> fold_f1;
    for (std::size_t m = 0; m < cfg.compare_models.size(); ++m) {
      const auto report = evaluate(part, cfg.compare_models[m], cfg);
      table += summary_row(name, report);
      if (report.cov_f1) cov_by_model[m].push_back(*report.cov_f1);
      std::vector<double> f1;
      for (const auto& f : report.folds) f1.push_back(f.metrics.f1);
      fold_f1.push_back(std::move(f1));
      std::printf("%s/%s: mean F1 %.4f\n", name.c_str(), report.model.c_str(), report.mean.f1);
    }
    per_location.push_back({{"location", name}, {"fold_f1", guarded_kruskal(fold_f1)}});
  }
  json models = json::array();
  for (const auto& m : cfg.compare_models) models.push_back(to_string(m.kind));
  json doc{{"models", models}, {"per_location", per_location}, {"cov_across_locations", guarded_kruskal(cov_by_model)}};
  write_text_file(out / "comparison.csv", table);
  write_json(out / "kruskal.json", doc, prov);
  write_provenance(out, prov);
}

void cmd_importance(const ExperimentConfig& cfg, const std::string& model_path) {
  BaggedEnsemble model;
  if (!model_path.empty()) {
    json doc;
    try {
      doc = json::parse(read_text_file(model_path));
    } catch (const json::exception& e) {
      throw Error(Errc::Parse, model_path + ": " + e.what());
    }
    model = ensemble_from_json(doc);
  } else {
    if (cfg.model.kind != ModelKind::EnsembleTrees) throw UsageError("importance is defined for the et model only");
    model = fit_ensemble(load_dataset(cfg), cfg);
  }
  write_text_file(fs::path(cfg.out) / "importance.csv", importance_csv(model.importance));
  write_provenance(cfg.out, provenance("importance", cfg));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lying-posture classification from a single accelerometer"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, model_path, models, locations, postures;
  Overrides ov;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out, manifest, model, split;
  std::size_t subjects = 0;
  auto* o_seed = app.add_option("--seed", seed, "Seed for every randomized step");
  auto* o_threads = app.add_option("--threads", threads, "Worker threads for folds and trees")->check(CLI::PositiveNumber);
  auto* o_out = app.add_option("--out", out, "Output directory");
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  for (auto* o : {o_seed, o_threads, o_out}) o->configurable(false);

  const auto data_flags = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", manifest, "Dataset manifest (default: generate synthetic data)");
    cmd->add_option("--locations", locations, "Comma-separated sensor locations");
    cmd->add_option("--postures", postures, "Comma-separated postures");
    cmd->add_option("--subjects", subjects, "Synthetic subject count")->check(CLI::PositiveNumber);
  };
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--locations", locations, "Comma-separated sensor locations");
  synth->add_option("--postures", postures, "Comma-separated postures");
  synth->add_option("--subjects", subjects, "Subject count")->check(CLI::PositiveNumber);
  auto* features = app.add_subcommand("features", "Export per-episode meta-features");
  data_flags(features);
  auto* trn = app.add_subcommand("train", "Train one model on the whole dataset");
  data_flags(trn);
  trn->add_option("--model", model, "et, adalstm, lstm, lda or svm");
  auto* eval = app.add_subcommand("eval", "Cross-validate one model per location");
  data_flags(eval);
  eval->add_option("--model", model, "et, adalstm, lstm, lda or svm");
  eval->add_option("--split", split, "loso or kfold<k>");
  auto* compare = app.add_subcommand("compare", "Cross-validate several models and test their differences");
  data_flags(compare);
  compare->add_option("--models", models, "Comma-separated model names");
  compare->add_option("--split", split, "loso or kfold<k>");
  auto* importance = app.add_subcommand("importance", "Rank features by ensemble importance");
  data_flags(importance);
  importance->add_option("--from", model_path, "Trained ensemble model.json (default: train one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (o_seed->count()) ov.seed = seed;
    if (o_threads->count()) ov.threads = threads;
    if (o_out->count()) ov.out = out;
    if (!manifest.empty()) ov.manifest = manifest;
    if (!model.empty()) ov.model = model;
    if (!split.empty()) ov.split = split;
    if (subjects) ov.subjects = subjects;
    ov.models = split_list(models);
    ov.locations = split_list(locations);
    ov.postures = split_list(postures);
    const auto cfg = resolve_config(config_path.empty() ? std::nullopt : std::optional(config_path), ov);

    if (synth->parsed()) cmd_synth(cfg);
    if (features->parsed()) cmd_features(cfg);
    if (trn->parsed()) cmd_train(cfg);
    if (eval->parsed()) cmd_eval(cfg);
    if (compare->parsed()) cmd_compare(cfg);
    if (importance->parsed()) cmd_importance(cfg, model_path);
    return 0;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.numerical() ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
