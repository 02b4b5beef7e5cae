#include "posture/serialize.hpp"

namespace posture {

using nlohmann::json;

namespace {

void check_header(const json& j, std::string_view kind) {
  if (!j.is_object() || j.value("kind", "") != kind) {
    throw Error(Errc::Parse, "expected a '" + std::string(kind) + "' document");
  }
  if (j.value("schema_version", 0) != kModelSchemaVersion) {
    throw Error(Errc::Parse, "unsupported schema_version for '" + std::string(kind) + "'");
  }
}

json header(std::string_view kind) { return {{"kind", kind}, {"schema_version", kModelSchemaVersion}}; }

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

}  // namespace

json label_set_to_json(const LabelSet& labels) {
  json a = json::array();
  for (PostureLabel l : labels) a.push_back(to_string(l));
  return a;
}

LabelSet label_set_from_json(const json& j) {
  LabelSet out;
  for (const auto& v : j) {
    const auto l = parse_posture(v.get<std::string>());
    if (!l) throw Error(Errc::Parse, "unknown posture '" + v.get<std::string>() + "'");
    out.push_back(*l);
  }
  return out;
}

json to_json(const BaggedEnsemble& m) {
  json j = header("bagged_ensemble");
  j["label_set"] = label_set_to_json(m.label_set);
  j["seed"] = m.seed;
  j["params"] = {{"n_trees", m.params.n_trees},
                 {"subset_size", m.params.subset_size},
                 {"bootstrap", m.params.bootstrap},
                 {"max_depth", m.params.tree.max_depth},
                 {"min_leaf", m.params.tree.min_leaf}};
  j["importance"] = m.importance;
  json trees = json::array();
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    json nodes = json::array();
    for (const auto& n : m.trees[t].nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"counts", n.class_counts}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"decrease", n.impurity_decrease}});
      }
    }
    trees.push_back({{"feature_subset", m.feature_subsets[t]}, {"nodes", nodes}});
  }
  j["trees"] = trees;
  return j;
}

BaggedEnsemble ensemble_from_json(const json& j) {
  check_header(j, "bagged_ensemble");
  return guarded([&] {
    BaggedEnsemble m;
    m.label_set = label_set_from_json(j.at("label_set"));
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<std::size_t>();
    m.params.subset_size = p.at("subset_size").get<std::size_t>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.tree.max_depth = p.at("max_depth").get<int>();
    m.params.tree.min_leaf = p.at("min_leaf").get<std::size_t>();
    m.importance = j.at("importance").get<FeatureVector48>();
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        if (n.contains("counts")) {
          node.class_counts = n.at("counts").get<std::vector<std::size_t>>();
        } else {
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          node.impurity_decrease = n.at("decrease").get<double>();
        }
        nodes.push_back(std::move(node));
      }
      m.trees.emplace_back(std::move(nodes), m.label_set.size());
      m.feature_subsets.push_back(t.at("feature_subset").get<std::vector<int>>());
    }
    return m;
  });
}

json to_json(const AdaLstmConfig& c) {
  return {{"max_epochs", c.max_epochs},
          {"initial_lr", c.initial_lr},
          {"beta1", c.beta1},
          {"sq_grad_decay", c.sq_grad_decay},
          {"epsilon", c.epsilon},
          {"batch_size", c.batch_size},
          {"lr_schedule", c.schedule == LrSchedule::Fixed ? "fixed" : "step_decay"},
          {"decay_factor", c.decay_factor},
          {"decay_every", c.decay_every},
          {"clip_norm", c.clip_norm},
          {"init_range", c.init_range},
          {"loss_mode", c.loss_mode == LossMode::RawSum ? "raw_sum" : "length_normalized"}};
}

AdaLstmConfig adalstm_config_from_json(const json& j, AdaLstmConfig c) {
  return guarded([&] {
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.initial_lr = j.value("initial_lr", c.initial_lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.sq_grad_decay = j.value("sq_grad_decay", c.sq_grad_decay);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("lr_schedule")) {
      const auto s = j.at("lr_schedule").get<std::string>();
      if (s != "fixed" && s != "step_decay") throw Error(Errc::Parse, "unknown lr_schedule '" + s + "'");
      c.schedule = s == "fixed" ? LrSchedule::Fixed : LrSchedule::StepDecay;
    }
    c.decay_factor = j.value("decay_factor", c.decay_factor);
    c.decay_every = j.value("decay_every", c.decay_every);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.init_range = j.value("init_range", c.init_range);
    if (j.contains("loss_mode")) {
      c.loss_mode = j.at("loss_mode").get<std::string>() == "raw_sum" ? LossMode::RawSum : LossMode::LengthNormalized;
    }
    return c;
  });
}

json to_json(const AdaLstmModel& m) {
  const ParamLayout L = m.layout();
  const auto block = [&](std::size_t at, std::size_t end) {
    return std::vector<double>(m.params.begin() + static_cast<std::ptrdiff_t>(at),
                               m.params.begin() + static_cast<std::ptrdiff_t>(end));
  };
  json j = header("adalstm");
  j["label_set"] = label_set_to_json(m.label_set);
  j["config"] = to_json(m.config);
  j["shape"] = {{"input", m.shape.input},
                {"hidden", m.shape.hidden},
                {"dense1", m.shape.dense1},
                {"dense2", m.shape.dense2},
                {"classes", m.shape.classes}};
  j["parameters"] = {{"forward_w_input", block(L.fwd_wx, L.fwd_wh)},
                     {"forward_w_recurrent", block(L.fwd_wh, L.fwd_b)},
                     {"forward_bias", block(L.fwd_b, L.bwd_wx)},
                     {"backward_w_input", block(L.bwd_wx, L.bwd_wh)},
                     {"backward_w_recurrent", block(L.bwd_wh, L.bwd_b)},
                     {"backward_bias", block(L.bwd_b, L.d1_w)},
                     {"dense1_w", block(L.d1_w, L.d1_b)},
                     {"dense1_b", block(L.d1_b, L.d2_w)},
                     {"dense2_w", block(L.d2_w, L.d2_b)},
                     {"dense2_b", block(L.d2_b, L.d3_w)},
                     {"dense3_w", block(L.d3_w, L.d3_b)},
                     {"dense3_b", block(L.d3_b, L.total)}};
  return j;
}

AdaLstmModel adalstm_from_json(const json& j) {
  check_header(j, "adalstm");
  return guarded([&] {
    AdaLstmModel m;
    m.label_set = label_set_from_json(j.at("label_set"));
    m.config = adalstm_config_from_json(j.at("config"));
    const auto& s = j.at("shape");
    m.shape = {s.at("input").get<std::size_t>(), s.at("hidden").get<std::size_t>(), s.at("dense1").get<std::size_t>(),
               s.at("dense2").get<std::size_t>(), s.at("classes").get<std::size_t>()};
    const auto& p = j.at("parameters");
    for (const char* name : {"forward_w_input", "forward_w_recurrent", "forward_bias", "backward_w_input",
                             "backward_w_recurrent", "backward_bias", "dense1_w", "dense1_b", "dense2_w", "dense2_b",
                             "dense3_w", "dense3_b"}) {
      const auto block = p.at(name).get<std::vector<double>>();
      m.params.insert(m.params.end(), block.begin(), block.end());
    }
    if (m.params.size() != m.layout().total || m.shape.classes != m.label_set.size()) {
      throw Error(Errc::ShapeMismatch, "parameter blocks do not match the declared shape");
    }
    return m;
  });
}

json to_json(const LdaModel& m) {
  json j = header("lda");
  j["label_set"] = label_set_to_json(m.label_set);
  j["class_means"] = m.class_means;
  j["covariance"] = m.covariance;
  j["priors"] = m.priors;
  j["coef"] = m.coef;
  j["intercept"] = m.intercept;
  return j;
}

LdaModel lda_from_json(const json& j) {
  check_header(j, "lda");
  return guarded([&] {
    LdaModel m;
    m.label_set = label_set_from_json(j.at("label_set"));
    m.class_means = j.at("class_means").get<std::vector<std::array<double, 3>>>();
    m.covariance = j.at("covariance").get<std::array<double, 9>>();
    m.priors = j.at("priors").get<std::vector<double>>();
    m.coef = j.at("coef").get<std::vector<std::array<double, 3>>>();
    m.intercept = j.at("intercept").get<std::vector<double>>();
    return m;
  });
}

json to_json(const LinearSvmModel& m) {
  json j = header("linear_svm");
  j["label_set"] = label_set_to_json(m.label_set);
  j["params"] = {{"C", m.params.C}, {"tolerance", m.params.tolerance}, {"max_epochs", m.params.max_epochs}};
  j["weights"] = m.weights;
  j["biases"] = m.biases;
  j["converged"] = m.converged;
  return j;
}

LinearSvmModel svm_from_json(const json& j) {
  check_header(j, "linear_svm");
  return guarded([&] {
    LinearSvmModel m;
    m.label_set = label_set_from_json(j.at("label_set"));
    m.params.C = j.at("params").at("C").get<double>();
    m.params.tolerance = j.at("params").at("tolerance").get<double>();
    m.params.max_epochs = j.at("params").at("max_epochs").get<std::size_t>();
    m.weights = j.at("weights").get<std::vector<std::array<double, 3>>>();
    m.biases = j.at("biases").get<std::vector<double>>();
    m.converged = j.at("converged").get<bool>();
    return m;
  });
}

}  // namespace posture
