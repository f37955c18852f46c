#pragma once

// JSON encoding shared by the svm and pipeline model files.

#include "chis/features.hpp"
#include "chis/svm.hpp"
#include "json.hpp"

namespace chis::detail {

nlohmann::json model_to_json(const svm::MulticlassModel& model);
/// Throws CorruptModel / VersionMismatch.
svm::MulticlassModel model_from_json(const nlohmann::json& doc);

nlohmann::json vocabulary_to_json(const features::VocabularyModel& vocab);
features::VocabularyModel vocabulary_from_json(const nlohmann::json& doc);

}  // namespace chis::detail
