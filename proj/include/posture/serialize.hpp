#pragma once

#include "json.hpp"
#include "posture/adalstm.hpp"
#include "posture/baselines.hpp"
#include "posture/ensemble.hpp"

namespace posture {

/// Version stamped into every persisted model document.
inline constexpr int kModelSchemaVersion = 1;

nlohmann::json label_set_to_json(const LabelSet& labels);
LabelSet label_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BaggedEnsemble& m);
nlohmann::json to_json(const AdaLstmModel& m);
nlohmann::json to_json(const AdaLstmConfig& c);
nlohmann::json to_json(const LdaModel& m);
nlohmann::json to_json(const LinearSvmModel& m);

// Readers check `kind` and `schema_version` and throw Parse on mismatch.
BaggedEnsemble ensemble_from_json(const nlohmann::json& j);
AdaLstmModel adalstm_from_json(const nlohmann::json& j);
AdaLstmConfig adalstm_config_from_json(const nlohmann::json& j, AdaLstmConfig base = {});
LdaModel lda_from_json(const nlohmann::json& j);
LinearSvmModel svm_from_json(const nlohmann::json& j);

}  // namespace posture
