#include "json.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/zk/reference_backend.hpp"

namespace zkmlops::gateway {

namespace {

const Bytes& need(const ArtifactMap& inputs, std::string_view kind) {
  auto it = inputs.find(kind);
  if (it == inputs.end()) throw Error(Errc::MissingPrecondition, "input '" + std::string(kind) + "' not supplied");
  return it->second;
}

std::string text(const ArtifactMap& inputs, std::string_view kind) { return zkmlops::to_string(need(inputs, kind)); }

}  // namespace

StepOutcome ReferenceExecutor::run(const WorkflowConfig&, const StepSpec& step, const ArtifactMap& inputs) {
  StepOutcome out;
  if (step.step_name == "setup") {
    auto model = zk::QuantizedFnn::from_json(text(inputs, "model"));
    auto params = zk::SetupParameters::from_json(text(inputs, "setup-parameters"));
    auto keys = zk::setup(model, params);
    out.produced["proving-key"] = std::move(keys.proving_key);
    out.produced["setup-verification-key"] = std::move(keys.verification_key);
  } else if (step.step_name == "key-exchange") {
    // Publish the verification key and nothing else.
    const Bytes& vk = need(inputs, "setup-verification-key");
    zk::VerificationKey::deserialize(vk);
    out.produced["verification-key"] = vk;
  } else if (step.step_name == "prove") {
    auto model = zk::QuantizedFnn::from_json(text(inputs, "model"));
    auto x = zk::read_vector_json(text(inputs, "model-input"), "input");
    auto proof = zk::prove_inference(model, need(inputs, "proving-key"), x);
    out.produced["proof"] = std::move(proof.proof);
    out.produced["model-output"] = to_bytes(zk::write_vector_json(proof.output, "output"));
  } else if (step.step_name == "verify") {
    zk::Verdict v;
    try {
      auto x = zk::read_vector_json(text(inputs, "model-input"), "input");
      auto y = zk::read_vector_json(text(inputs, "model-output"), "output");
      v = zk::verify_inference(need(inputs, "verification-key"), x, y, need(inputs, "proof"));
    } catch (const Error& e) {
      // An unreadable claim is a failed verification, not a broken step.
      if (e.code() != Errc::InvalidArgument) throw;
      v = {false, e.what()};
    }
    nlohmann::json report{{"version", 1}, {"accepted", v.accepted}, {"detail", v.detail}};
    out.produced["verification-report"] = to_bytes(report.dump());
    out.verdict = BackendVerdict{v.accepted, v.detail};
  } else {
    throw Error(Errc::UnknownStep, "unknown step '" + step.step_name + "'");
  }
  return out;
}

}  // namespace zkmlops::gateway
