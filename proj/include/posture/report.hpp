#pragma once

#include <string>

#include "json.hpp"
#include "posture/eval.hpp"
#include "posture/experiment.hpp"

namespace posture {

nlohmann::json to_json(const MetricSet& m);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const KruskalResult& k);

/// `fold,accuracy,balanced_accuracy,precision,recall,f1`
std::string folds_csv(const EvalReport& report);

/// Grid with a header row of predicted labels and one row per actual label.
std::string confusion_csv(const ConfusionMatrix& cm);

/// Header for summary_row.
inline constexpr const char* kSummaryHeader = "location,model,mean_f1,std_f1,cov\n";
std::string summary_row(const std::string& location, const EvalReport& report);

}  // namespace posture
