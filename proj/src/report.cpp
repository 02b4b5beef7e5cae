#include "posture/report.hpp"

#include <sstream>

#include "posture/io.hpp"
#include "posture/serialize.hpp"

namespace posture {

using nlohmann::json;

json to_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy},
          {"balanced_accuracy", m.balanced_accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

json to_json(const ConfusionMatrix& cm) {
  return {{"label_set", label_set_to_json(cm.label_set)}, {"counts", cm.counts}};
}

json to_json(const KruskalResult& k) {
  json j{{"h", k.h}, {"p_value", k.p_value}, {"df", k.df}, {"degenerate", k.degenerate}};
  j["p_exact"] = k.p_exact ? json(*k.p_exact) : json(nullptr);
  return j;
}

json to_json(const EvalReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"test_ids", f.test_ids},
                     {"window_len", f.window_len},
                     {"confusion", f.confusion.counts},
                     {"metrics", to_json(f.metrics)}});
  }
  json j{{"model", r.model},
         {"split", r.split},
         {"label_set", label_set_to_json(r.label_set)},
         {"folds", folds},
         {"mean", to_json(r.mean)},
         {"std", to_json(r.std)},
         {"aggregate_confusion", to_json(r.aggregate)},
         {"warnings", r.warnings}};
  j["cov_f1"] = r.cov_f1 ? json(*r.cov_f1) : json(nullptr);
  return j;
}

std::string folds_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "fold,accuracy,balanced_accuracy,precision,recall,f1\n";
  for (const auto& f : r.folds) {
    const auto& m = f.metrics;
    out << f.fold << ',' << format_double(m.accuracy) << ',' << format_double(m.balanced_accuracy) << ','
        << format_double(m.precision) << ',' << format_double(m.recall) << ',' << format_double(m.f1) << '\n';
  }
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "actual\\predicted";
  for (PostureLabel l : cm.label_set) out << ',' << to_string(l);
  out << '\n';
  for (std::size_t a = 0; a < cm.label_set.size(); ++a) {
    out << to_string(cm.label_set[a]);
    for (std::size_t c : cm.counts[a]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::string summary_row(const std::string& location, const EvalReport& r) {
  return location + "," + r.model + "," + format_double(r.mean.f1) + "," + format_double(r.std.f1) + "," +
         (r.cov_f1 ? format_double(*r.cov_f1) : std::string("nan")) + "\n";
}

}  // namespace posture
