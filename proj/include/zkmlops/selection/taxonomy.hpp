#pragma once

#include <array>
#include <string_view>

namespace zkmlops::selection {

enum class LifecyclePhase {
  DataAndPreprocessing,
  TrainingAndOfflineMetrics,
  Inference,
  OnlineMetrics,
};

enum class ModelCategory {
  DecisionTrees,
  SupportVectorMachines,
  LinearModels,
  Clustering,
  GeneralNeuralNetworks,
  ConvolutionalNeuralNetworks,
  LargeLanguageModels,
  VisionModels,
  RecommenderSystems,
};

inline constexpr std::array kAllPhases{
    LifecyclePhase::DataAndPreprocessing,
    LifecyclePhase::TrainingAndOfflineMetrics,
    LifecyclePhase::Inference,
    LifecyclePhase::OnlineMetrics,
};

inline constexpr std::array kAllCategories{
    ModelCategory::DecisionTrees,          ModelCategory::SupportVectorMachines,
    ModelCategory::LinearModels,           ModelCategory::Clustering,
    ModelCategory::GeneralNeuralNetworks,  ModelCategory::ConvolutionalNeuralNetworks,
    ModelCategory::LargeLanguageModels,    ModelCategory::VisionModels,
    ModelCategory::RecommenderSystems,
};

// Names are the enumerator spellings, e.g. "Inference".
std::string_view to_string(LifecyclePhase p) noexcept;
std::string_view to_string(ModelCategory c) noexcept;
// Throw SchemaError on unknown names.
LifecyclePhase parse_phase(std::string_view name);
ModelCategory parse_category(std::string_view name);

// Display titles for rendered documents.
std::string_view title(LifecyclePhase p) noexcept;
std::string_view title(ModelCategory c) noexcept;

}  // namespace zkmlops::selection
