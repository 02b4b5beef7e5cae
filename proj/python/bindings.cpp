// Python module: documents cross the boundary as JSON strings, samples as (x, y, z) tuples.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "config.hpp"
#include "posture/features.hpp"
#include "posture/io.hpp"
#include "posture/report.hpp"
#include "posture/serialize.hpp"
#include "posture/signal.hpp"

namespace py = pybind11;
using namespace posture;
using nlohmann::json;

namespace {

using Triple = std::array<double, 3>;

Episode to_episode(const std::vector<Triple>& samples) {
  Episode ep;
  ep.id = "py";
  for (const auto& s : samples) ep.samples.push_back({s[0], s[1], s[2]});
  return ep;
}

std::vector<double> as_vector(const FeatureVector48& f) { return {f.begin(), f.end()}; }

cli::ExperimentConfig config_from(const std::string& text) { return cli::resolve_config(json::parse(text)); }

std::vector<Episode> normalized(const Dataset& ds) {
  std::vector<Episode> eps;
  for (const auto& e : ds.episodes) eps.push_back(normalize_episode(e));
  return eps;
}

std::string episodes_json(const Dataset& ds) {
  json out = json::array();
  for (const auto& e : ds.episodes) {
    json samples = json::array();
    for (const auto& s : e.samples) samples.push_back({s.x, s.y, s.z});
    out.push_back({{"id", e.id},
                   {"subject_id", e.subject_id},
                   {"location", to_string(e.location)},
                   {"label", to_string(e.label)},
                   {"samples", samples}});
  }
  return out.dump();
}

LabelSet labels_from(const std::vector<std::string>& names) {
  return label_set_from_json(json(names));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lying-posture classification core";
  py::register_exception<Error>(m, "PostureError", PyExc_RuntimeError);
  py::register_exception<cli::UsageError>(m, "ConfigError", PyExc_ValueError);
  m.attr("version") = POSTURE_VERSION;

  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (int i = 1; i <= kFeatureCount; ++i) names.push_back(feature_name(i));
    return names;
  });
  m.def(
      "window_features",
      [](const std::vector<Triple>& samples) {
        const Episode ep = to_episode(samples);
        return as_vector(window_features(Window{ep.samples, &ep, 0}));
      },
      py::arg("samples"));
  m.def(
      "meta_features",
      [](const std::vector<Triple>& samples, std::size_t window_len, double overlap) {
        return as_vector(episode_meta_features(to_episode(samples), window_len, overlap).values);
      },
      py::arg("samples"), py::arg("window_len"), py::arg("overlap") = 0.5);

  m.def(
      "compute_metrics",
      [](const std::vector<std::vector<std::size_t>>& counts, const std::vector<std::string>& labels) {
        ConfusionMatrix cm(labels_from(labels));
        if (counts.size() != cm.counts.size()) throw Error(Errc::DimensionMismatch, "one row per label expected");
        for (std::size_t i = 0; i < counts.size(); ++i) {
          if (counts[i].size() != cm.counts.size()) throw Error(Errc::DimensionMismatch, "square matrix expected");
          cm.counts[i] = counts[i];
        }
        return to_json(compute_metrics(cm)).dump();
      },
      py::arg("counts"), py::arg("labels"));
  m.def(
      "kruskal_wallis", [](const std::vector<std::vector<double>>& groups) { return to_json(kruskal_wallis(groups)).dump(); },
      py::arg("groups"));
  m.def("cov", [](const std::vector<double>& values) { return cov(values); }, py::arg("values"));

  m.def(
      "generate_dataset", [](const std::string& config) { return episodes_json(cli::load_dataset(config_from(config))); },
      py::arg("config"));
  m.def(
      "write_dataset",
      [](const std::string& config, const std::string& out_dir) {
        posture::write_dataset(generate_dataset(config_from(config).synth), out_dir);
        return (std::filesystem::path(out_dir) / "manifest.json").string();
      },
      py::arg("config"), py::arg("out_dir"));

  m.def(
      "evaluate",
      [](const std::string& config) {
        const auto cfg = config_from(config);
        const Dataset ds = cli::load_dataset(cfg);
        json out = json::object();
        for (auto loc : kAllLocations) {
          const Dataset part = filter_location(ds, loc);
          if (part.episodes.empty()) continue;
          const auto report = run_experiment(part, cfg.model, cfg.split, cfg.seed, ExperimentOptions{cfg.threads});
          out[std::string(to_string(loc))] = to_json(report);
        }
        return out.dump();
      },
      py::arg("config"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "fit_ensemble",
      [](const std::vector<std::vector<double>>& X, const std::vector<std::string>& y,
         const std::vector<std::string>& labels, std::uint64_t seed, std::size_t n_trees) {
        std::vector<FeatureVector48> rows;
        for (const auto& r : X) {
          if (r.size() != static_cast<std::size_t>(kFeatureCount)) throw Error(Errc::DimensionMismatch, "rows need 48 features");
          FeatureVector48 f{};
          std::copy(r.begin(), r.end(), f.begin());
          rows.push_back(f);
        }
        std::vector<PostureLabel> ys;
        for (const auto& name : y) {
          const auto p = parse_posture(name);
          if (!p) throw Error(Errc::UnknownLabel, "unknown posture '" + name + "'");
          ys.push_back(*p);
        }
        EnsembleParams params;
        params.n_trees = n_trees;
        return to_json(fit_bagged_ensemble(rows, ys, labels_from(labels), seed, params)).dump();
      },
      py::arg("X"), py::arg("y"), py::arg("labels"), py::arg("seed") = 42, py::arg("n_trees") = 100);
  m.def(
      "predict_ensemble",
      [](const std::string& model, const std::vector<std::vector<double>>& X) {
        const auto et = ensemble_from_json(json::parse(model));
        std::vector<std::string> out;
        for (const auto& r : X) {
          if (r.size() != static_cast<std::size_t>(kFeatureCount)) throw Error(Errc::DimensionMismatch, "rows need 48 features");
          FeatureVector48 f{};
          std::copy(r.begin(), r.end(), f.begin());
          out.emplace_back(to_string(predict_majority(et, f)));
        }
        return out;
      },
      py::arg("model"), py::arg("X"));

  m.def(
      "train_adalstm",
      [](const std::string& config) {
        const auto cfg = config_from(config);
        const Dataset ds = cli::load_dataset(cfg);
        AdaLstmConfig lc = cfg.model.lstm;
        if (cfg.model.kind == ModelKind::LstmFixed) lc.schedule = LrSchedule::Fixed;
        const auto result = train(init_model(ds.label_set, lc, cfg.seed), normalized(ds), derive_seed(cfg.seed, 1));
        json trace = json::array();
        for (const auto& e : result.trace) trace.push_back({{"epoch", e.epoch}, {"lr", e.lr}, {"mean_loss", e.mean_loss}});
        return json{{"model", to_json(result.model)}, {"trace", trace}, {"warnings", result.warnings}}.dump();
      },
      py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "predict_adalstm",
      [](const std::string& model, const std::vector<Triple>& samples) {
        return std::string(to_string(predict(adalstm_from_json(json::parse(model)), normalize_episode(to_episode(samples)))));
      },
      py::arg("model"), py::arg("samples"));
}
