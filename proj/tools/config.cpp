#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "posture/io.hpp"
#include "posture/serialize.hpp"
#include "posture/signal.hpp"

namespace posture::cli {

using nlohmann::json;

namespace {

PostureLabel posture_or_throw(const std::string& name) {
  const auto p = parse_posture(name);
  if (!p) throw UsageError("unknown posture '" + name + "'");
  return *p;
}

SensorLocation location_or_throw(const std::string& name) {
  const auto l = parse_location(name);
  if (!l) throw UsageError("unknown location '" + name + "'");
  return *l;
}

json synth_to_json(const SynthConfig& c) {
  json overrides = json::array();
  for (const auto& [key, g] : c.orientation_overrides) {
    overrides.push_back({{"posture", to_string(key.first)}, {"location", to_string(key.second)}, {"gravity", g}});
  }
  json locations = json::array();
  for (auto l : c.locations) locations.push_back(to_string(l));
  return {{"subjects", c.subjects},
          {"episodes_per_posture", c.episodes_per_posture},
          {"postures", label_set_to_json(c.postures)},
          {"locations", locations},
          {"min_length", c.min_length},
          {"max_length", c.max_length},
          {"sample_rate_hz", c.sample_rate_hz},
          {"gravity", c.gravity},
          {"subject_jitter_deg", c.subject_jitter_deg},
          {"noise_std", c.noise_std},
          {"high_tier_noise_scale", c.high_tier_noise_scale},
          {"limb_jitter_deg", c.limb_jitter_deg},
          {"burst_rate_hz", c.burst_rate_hz},
          {"burst_amplitude_deg", c.burst_amplitude_deg},
          {"burst_min_s", c.burst_min_s},
          {"burst_max_s", c.burst_max_s},
          {"orientation_overrides", overrides}};
}

json model_to_json(const ModelSpec& m) {
  return {{"kind", to_string(m.kind)},
          {"n_trees", m.ensemble.n_trees},
          {"subset_size", m.ensemble.subset_size},
          {"bootstrap", m.ensemble.bootstrap},
          {"max_depth", m.ensemble.tree.max_depth},
          {"min_leaf", m.ensemble.tree.min_leaf},
          {"window_overlap", m.window_overlap},
          {"lstm", to_json(m.lstm)},
          {"lda", {{"ridge", m.lda.ridge}}},
          {"svm", {{"C", m.svm.C}, {"tolerance", m.svm.tolerance}, {"max_epochs", m.svm.max_epochs}}}};
}

std::string split_name(const SplitSpec& s) {
  return s.kind == SplitSpec::Kind::Loso ? "loso" : "kfold" + std::to_string(s.k);
}

}  // namespace

SynthConfig synth_from_json(const json& j, SynthConfig c) {
  if (!j.is_object()) throw UsageError("synth configuration must be an object");
  c.subjects = j.value("subjects", c.subjects);
  c.episodes_per_posture = j.value("episodes_per_posture", c.episodes_per_posture);
  if (j.contains("postures")) {
    c.postures.clear();
    for (const auto& p : j.at("postures")) c.postures.push_back(posture_or_throw(p.get<std::string>()));
  }
  if (j.contains("locations")) {
    c.locations.clear();
    for (const auto& l : j.at("locations")) c.locations.push_back(location_or_throw(l.get<std::string>()));
  }
  c.min_length = j.value("min_length", c.min_length);
  c.max_length = j.value("max_length", c.max_length);
  c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
  c.gravity = j.value("gravity", c.gravity);
  c.subject_jitter_deg = j.value("subject_jitter_deg", c.subject_jitter_deg);
  c.noise_std = j.value("noise_std", c.noise_std);
  c.high_tier_noise_scale = j.value("high_tier_noise_scale", c.high_tier_noise_scale);
  c.limb_jitter_deg = j.value("limb_jitter_deg", c.limb_jitter_deg);
  c.burst_rate_hz = j.value("burst_rate_hz", c.burst_rate_hz);
  c.burst_amplitude_deg = j.value("burst_amplitude_deg", c.burst_amplitude_deg);
  c.burst_min_s = j.value("burst_min_s", c.burst_min_s);
  c.burst_max_s = j.value("burst_max_s", c.burst_max_s);
  if (j.contains("orientation_overrides")) {
    for (const auto& o : j.at("orientation_overrides")) {
      const auto g = o.at("gravity").get<std::vector<double>>();
      if (g.size() != 3) throw UsageError("orientation override needs three components");
      c.orientation_overrides[{posture_or_throw(o.at("posture").get<std::string>()),
                               location_or_throw(o.at("location").get<std::string>())}] = {g[0], g[1], g[2]};
    }
  }
  for (double v : {c.sample_rate_hz, c.gravity}) {
    if (!(v > 0.0)) throw UsageError("sample rate and gravity must be positive");
  }
  for (double v : {c.subject_jitter_deg, c.noise_std, c.high_tier_noise_scale, c.limb_jitter_deg, c.burst_rate_hz,
                   c.burst_amplitude_deg, c.burst_min_s}) {
    if (!(v >= 0.0)) throw UsageError("synth rates and deviations must be non-negative");
  }
  if (c.burst_max_s < c.burst_min_s) throw UsageError("burst_max_s is below burst_min_s");
  if (c.min_length < 1 || c.max_length < c.min_length) throw UsageError("episode length range must be positive");
  if (c.subjects < 1 || c.postures.empty() || c.locations.empty()) {
    throw UsageError("synth needs at least one subject, posture and location");
  }
  return c;
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  if (j.is_string()) {
    const auto k = parse_model_kind(j.get<std::string>());
    if (!k) throw UsageError("unknown model '" + j.get<std::string>() + "'");
    m.kind = *k;
    return m;
  }
  if (!j.is_object()) throw UsageError("model must be a name or an object");
  const std::string kind = j.value("kind", "et");
  const auto k = parse_model_kind(kind);
  if (!k) throw UsageError("unknown model '" + kind + "'");
  m.kind = *k;
  m.ensemble.n_trees = j.value("n_trees", m.ensemble.n_trees);
  m.ensemble.subset_size = j.value("subset_size", m.ensemble.subset_size);
  m.ensemble.bootstrap = j.value("bootstrap", m.ensemble.bootstrap);
  m.ensemble.tree.max_depth = j.value("max_depth", m.ensemble.tree.max_depth);
  m.ensemble.tree.min_leaf = j.value("min_leaf", m.ensemble.tree.min_leaf);
  m.window_overlap = j.value("window_overlap", m.window_overlap);
  if (j.contains("lstm")) m.lstm = adalstm_config_from_json(j.at("lstm"), m.lstm);
  if (j.contains("lda")) m.lda.ridge = j.at("lda").value("ridge", m.lda.ridge);
  if (j.contains("svm")) {
    const auto& s = j.at("svm");
    m.svm.C = s.value("C", m.svm.C);
    m.svm.tolerance = s.value("tolerance", m.svm.tolerance);
    m.svm.max_epochs = s.value("max_epochs", m.svm.max_epochs);
  }
  if (m.ensemble.n_trees < 1 || m.ensemble.subset_size < 1 || m.ensemble.subset_size > kFeatureCount) {
    throw UsageError("n_trees must be positive and subset_size within 1..48");
  }
  if (!(m.window_overlap >= 0.0 && m.window_overlap < 1.0)) throw UsageError("window_overlap must lie in [0, 1)");
  return m;
}

SplitSpec parse_split(const std::string& text) {
  SplitSpec s;
  if (text == "loso") return s;
  if (text.rfind("kfold", 0) == 0) {
    s.kind = SplitSpec::Kind::KFold;
    const std::string k = text.substr(5);
    if (k.empty()) return s;
    if (k.find_first_not_of("0123456789") != std::string::npos) throw UsageError("bad split '" + text + "'");
    s.k = std::stoul(k);
    if (s.k < 2) throw UsageError("k-fold needs k >= 2");
    return s;
  }
  throw UsageError("split must be 'loso' or 'kfold<k>', got '" + text + "'");
}

ExperimentConfig resolve_config(const std::optional<std::string>& config_path, const Overrides& ov) {
  json file = json::object();
  if (config_path) {
    std::ifstream in(*config_path, std::ios::binary);
    if (!in) throw UsageError("cannot read config " + *config_path);
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config " + *config_path + ": " + e.what());
    }
  }
  return resolve_config(file, ov);
}

ExperimentConfig resolve_config(const json& file, const Overrides& ov) {
  if (!file.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.seed = ov.seed.value_or(file.value("seed", std::uint64_t{42}));
    cfg.threads = ov.threads.value_or(file.value("threads", 1u));
    cfg.out = ov.out.value_or(file.value("out", std::string("out")));

    const json dataset = file.value("dataset", json::object());
    if (ov.manifest) {
      cfg.manifest = *ov.manifest;
    } else if (dataset.contains("manifest")) {
      cfg.manifest = dataset.at("manifest").get<std::string>();
    }
    cfg.synth = synth_from_json(dataset.value("synth", json::object()));
    if (ov.subjects) cfg.synth.subjects = *ov.subjects;
    cfg.synth.seed = cfg.seed;

    cfg.model = model_from_json(file.value("model", json::object()));
    if (ov.model) {
      const auto k = parse_model_kind(*ov.model);
      if (!k) throw UsageError("unknown model '" + *ov.model + "'");
      cfg.model.kind = *k;
    }
    if (!ov.models.empty()) {
      for (const auto& name : ov.models) {
        ModelSpec m = cfg.model;
        const auto k = parse_model_kind(name);
        if (!k) throw UsageError("unknown model '" + name + "'");
        m.kind = *k;
        cfg.compare_models.push_back(m);
      }
    } else if (file.contains("models")) {
      for (const auto& m : file.at("models")) cfg.compare_models.push_back(model_from_json(m));
    }

    cfg.split = parse_split(ov.split.value_or(file.value("split", std::string("loso"))));

    std::vector<std::string> locs = ov.locations;
    if (locs.empty() && file.contains("locations")) locs = file.at("locations").get<std::vector<std::string>>();
    for (const auto& l : locs) cfg.locations.push_back(location_or_throw(l));
    std::vector<std::string> posts = ov.postures;
    if (posts.empty() && file.contains("postures")) posts = file.at("postures").get<std::vector<std::string>>();
    for (const auto& p : posts) cfg.postures.push_back(posture_or_throw(p));
    // Postures and locations given on the command line also shape generated data.
    if (!cfg.postures.empty()) cfg.synth.postures = cfg.postures;
    if (!cfg.locations.empty()) cfg.synth.locations = cfg.locations;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (cfg.threads < 1) throw UsageError("threads must be at least 1");

  json eff;
  eff["seed"] = cfg.seed;
  if (cfg.manifest) {
    eff["dataset"] = {{"manifest", *cfg.manifest}};
  } else {
    eff["dataset"] = {{"synth", synth_to_json(cfg.synth)}};
  }
  eff["model"] = model_to_json(cfg.model);
  if (!cfg.compare_models.empty()) {
    eff["models"] = json::array();
    for (const auto& m : cfg.compare_models) eff["models"].push_back(model_to_json(m));
  }
  eff["split"] = split_name(cfg.split);
  eff["locations"] = json::array();
  for (auto l : cfg.locations) eff["locations"].push_back(to_string(l));
  eff["postures"] = label_set_to_json(cfg.postures);
  cfg.effective = eff;
  return cfg;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json provenance(const std::string& command, const ExperimentConfig& cfg) {
  return {{"command", command},
          {"config_hash", config_hash(cfg.effective)},
          {"seed", cfg.seed},
          {"version", POSTURE_VERSION},
          {"config", cfg.effective}};
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset ds = cfg.manifest ? read_dataset(*cfg.manifest) : generate_dataset(cfg.synth);
  if (!cfg.postures.empty()) {
    for (auto p : cfg.postures) {
      if (std::find(ds.label_set.begin(), ds.label_set.end(), p) == ds.label_set.end()) {
        throw Error(Errc::UnknownLabel, "posture '" + std::string(to_string(p)) + "' is not in the dataset");
      }
    }
    std::vector<Episode> kept;
    for (auto& ep : ds.episodes) {
      if (std::find(cfg.postures.begin(), cfg.postures.end(), ep.label) != cfg.postures.end()) {
        kept.push_back(std::move(ep));
      }
    }
    ds.episodes = std::move(kept);
    ds.label_set = cfg.postures;
  }
  if (!cfg.locations.empty()) {
    std::vector<Episode> kept;
    for (auto& ep : ds.episodes) {
      if (std::find(cfg.locations.begin(), cfg.locations.end(), ep.location) != cfg.locations.end()) {
        kept.push_back(std::move(ep));
      }
    }
    ds.episodes = std::move(kept);
  }
  if (ds.episodes.empty()) throw Error(Errc::EmptyDataset, "no episodes match the configured locations and postures");
  return ds;
}

}  // namespace posture::cli
