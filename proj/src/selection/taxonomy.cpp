#include "zkmlops/selection/taxonomy.hpp"

#include <string>

#include "zkmlops/common/error.hpp"

namespace zkmlops::selection {

std::string_view to_string(LifecyclePhase p) noexcept {
  switch (p) {
    case LifecyclePhase::DataAndPreprocessing: return "DataAndPreprocessing";
    case LifecyclePhase::TrainingAndOfflineMetrics: return "TrainingAndOfflineMetrics";
    case LifecyclePhase::Inference: return "Inference";
    case LifecyclePhase::OnlineMetrics: return "OnlineMetrics";
  }
  return "?";
}

std::string_view to_string(ModelCategory c) noexcept {
  switch (c) {
    case ModelCategory::DecisionTrees: return "DecisionTrees";
    case ModelCategory::SupportVectorMachines: return "SupportVectorMachines";
    case ModelCategory::LinearModels: return "LinearModels";
    case ModelCategory::Clustering: return "Clustering";
    case ModelCategory::GeneralNeuralNetworks: return "GeneralNeuralNetworks";
    case ModelCategory::ConvolutionalNeuralNetworks: return "ConvolutionalNeuralNetworks";
    case ModelCategory::LargeLanguageModels: return "LargeLanguageModels";
    case ModelCategory::VisionModels: return "VisionModels";
    case ModelCategory::RecommenderSystems: return "RecommenderSystems";
  }
  return "?";
}

LifecyclePhase parse_phase(std::string_view name) {
  for (auto p : kAllPhases)
    if (to_string(p) == name) return p;
  throw Error(Errc::SchemaError, "unknown lifecycle phase '" + std::string(name) + "'");
}

ModelCategory parse_category(std::string_view name) {
  for (auto c : kAllCategories)
    if (to_string(c) == name) return c;
  throw Error(Errc::SchemaError, "unknown model category '" + std::string(name) + "'");
}

std::string_view title(LifecyclePhase p) noexcept {
  switch (p) {
    case LifecyclePhase::DataAndPreprocessing: return "Data and Preprocessing Verification";
    case LifecyclePhase::TrainingAndOfflineMetrics: return "Training and Offline Metrics Verification";
    case LifecyclePhase::Inference: return "Inference Verification";
    case LifecyclePhase::OnlineMetrics: return "Online Metrics Verification";
  }
  return "?";
}

std::string_view title(ModelCategory c) noexcept {
  switch (c) {
    case ModelCategory::DecisionTrees: return "Decision Trees";
    case ModelCategory::SupportVectorMachines: return "Support Vector Machines";
    case ModelCategory::LinearModels: return "Linear Models";
    case ModelCategory::Clustering: return "Clustering";
    case ModelCategory::GeneralNeuralNetworks: return "General Neural Networks";
    case ModelCategory::ConvolutionalNeuralNetworks: return "Convolutional Neural Networks";
    case ModelCategory::LargeLanguageModels: return "Large Language Models";
    case ModelCategory::VisionModels: return "Vision Models";
    case ModelCategory::RecommenderSystems: return "Recommender Systems";
  }
  return "?";
}

}  // namespace zkmlops::selection
