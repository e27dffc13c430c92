#include "zkmlops/api/service.hpp"

namespace zkmlops::api {

Service::Service(ServiceOptions options)
    : Service(options, std::make_unique<gateway::BackendGateway>(options.scripts)) {}

Service::Service(ServiceOptions options, std::unique_ptr<gateway::StepInterpreter> interpreter)
    : options_(std::move(options)),
      store_(options_.data_dir / "artifacts"),
      workflows_(options_.data_dir / "workflows"),
      interpreter_(std::move(interpreter)),
      orchestrator_(options_.data_dir / "audits", store_, workflows_, *interpreter_),
      kb_(selection::KnowledgeBase::load(options_.knowledge_base)),
      specs_(options_.data_dir / "adr") {
  if (options_.configs_dir) workflows_.load_directory(*options_.configs_dir);
}

}  // namespace zkmlops::api
