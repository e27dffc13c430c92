#include "zkmlops/zk/reference_backend.hpp"

#include "json.hpp"
#include "zkmlops/zk/mimc.hpp"

namespace zkmlops::zk {

using nlohmann::json;

namespace {
constexpr std::uint8_t kKeyVersion = 1;
constexpr std::uint8_t kProvingKeyTag = 'P';
constexpr std::uint8_t kVerificationKeyTag = 'V';

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedProof, what); }
}  // namespace

std::string SetupParameters::to_json() const {
  return json{{"version", 1}, {"repetitions", repetitions}, {"bind_weights", bind_weights}}.dump();
}

SetupParameters SetupParameters::from_json(std::string_view text) {
  SetupParameters p;
  try {
    auto j = json::parse(text);
    for (const auto& [key, value] : j.items())
      if (key != "version" && key != "repetitions" && key != "bind_weights")
        throw Error(Errc::InvalidArgument, "unknown setup parameter '" + key + "'");
    if (j.value("version", 1) != 1) throw Error(Errc::InvalidArgument, "setup parameters version must be 1");
    p.repetitions = j.value("repetitions", p.repetitions);
    p.bind_weights = j.value("bind_weights", p.bind_weights);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed setup parameters: ") + e.what());
  }
  if (p.repetitions == 0) throw Error(Errc::InvalidArgument, "repetitions must be positive");
  return p;
}

ProtocolParameters ProtocolParameters::current(std::uint32_t repetitions) {
  ProtocolParameters p;
  p.repetitions = repetitions;
  p.mimc_rounds = mimc::kRounds;
  p.mimc_exponent = mimc::kExponent;
  const auto& c = mimc::round_constants();
  p.mimc_constants.assign(c.begin(), c.end());
  return p;
}

void ProtocolParameters::write(ByteWriter& w) const {
  w.u64(modulus);
  w.u32(repetitions);
  w.u32(relu_bits);
  w.u32(mimc_rounds);
  w.u64(mimc_exponent);
  w.u32(static_cast<std::uint32_t>(mimc_constants.size()));
  for (Fp c : mimc_constants) w.u64(c.value());
}

ProtocolParameters ProtocolParameters::read(ByteReader& r) {
  ProtocolParameters p;
  p.modulus = r.u64();
  p.repetitions = r.u32();
  p.relu_bits = r.u32();
  p.mimc_rounds = r.u32();
  p.mimc_exponent = r.u64();
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 8) malformed("parameter block exceeds payload");
  p.mimc_constants.resize(n);
  for (auto& c : p.mimc_constants) c = Fp(r.u64());
  if (!(p == current(p.repetitions))) malformed("key was produced with unsupported protocol parameters");
  if (p.repetitions == 0) malformed("key requests zero repetitions");
  return p;
}

Bytes ProvingKey::serialize() const {
  ByteWriter w;
  w.u8(kKeyVersion);
  w.u8(kProvingKeyTag);
  params.write(w);
  w.section(compiled.serialize());
  return std::move(w).take();
}

ProvingKey ProvingKey::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != kKeyVersion || r.u8() != kProvingKeyTag) malformed("not a version-1 proving key");
  ProvingKey pk;
  pk.params = ProtocolParameters::read(r);
  pk.compiled = CompiledFnn::deserialize(r.section());
  r.expect_done();
  return pk;
}

Bytes VerificationKey::serialize() const {
  ByteWriter w;
  w.u8(kKeyVersion);
  w.u8(kVerificationKeyTag);
  params.write(w);
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.u32(d);
  w.u8(bind_weights ? 1 : 0);
  w.raw(circuit_digest);
  w.u32(num_public_inputs);
  w.u32(num_outputs);
  w.u8(weight_commitment ? 1 : 0);
  if (weight_commitment) w.u64(weight_commitment->value());
  return std::move(w).take();
}

VerificationKey VerificationKey::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != kKeyVersion || r.u8() != kVerificationKeyTag) malformed("not a version-1 verification key");
  VerificationKey vk;
  vk.params = ProtocolParameters::read(r);
  std::uint32_t n = r.u32();
  if (n < 2 || n > r.remaining() / 4) malformed("bad dimension count");
  vk.dims.resize(n);
  for (auto& d : vk.dims) {
    d = r.u32();
    if (d == 0 || d > 4096) malformed("bad layer dimension");
  }
  vk.bind_weights = r.u8() == 1;
  vk.circuit_digest = r.fixed<32>();
  vk.num_public_inputs = r.u32();
  vk.num_outputs = r.u32();
  if (r.u8() == 1) {
    std::uint64_t v = r.u64();
    if (v >= Fp::kModulus) malformed("non-canonical weight commitment");
    vk.weight_commitment = Fp(v);
  }
  r.expect_done();
  if (vk.bind_weights != vk.weight_commitment.has_value()) malformed("binding flag and commitment disagree");
  return vk;
}

KeyPair setup(const QuantizedFnn& model, const SetupParameters& params) {
  if (params.repetitions == 0) throw Error(Errc::InvalidArgument, "repetitions must be positive");
  ProvingKey pk{ProtocolParameters::current(params.repetitions), compile_fnn(model, params.bind_weights)};
  VerificationKey vk;
  vk.params = pk.params;
  vk.dims = model.dims;
  vk.bind_weights = params.bind_weights;
  vk.circuit_digest = pk.compiled.circuit.digest();
  vk.num_public_inputs = pk.compiled.circuit.num_public_inputs;
  vk.num_outputs = static_cast<std::uint32_t>(pk.compiled.circuit.outputs.size());
  if (params.bind_weights) vk.weight_commitment = weight_commitment(model);
  return {pk.serialize(), vk.serialize()};
}

InferenceProof prove_inference(const QuantizedFnn& model, ByteSpan proving_key, std::span<const std::int64_t> input,
                               const Digest& randomness) {
  ProvingKey pk = ProvingKey::deserialize(proving_key);
  FnnAssignment a = assign_fnn(model, pk.compiled, input);
  Statement st;
  st.circuit_digest = pk.compiled.circuit.digest();
  st.inputs.assign(a.public_inputs.begin(), a.public_inputs.begin() + pk.compiled.input_count());
  st.outputs = a.outputs;
  st.weight_commitment = a.weight_commitment;

  InferenceProof out;
  out.proof = prove(st, Witness{std::move(a.witness)}, pk.compiled.circuit, pk.params.repetitions, randomness)
                  .serialize();
  for (Fp y : a.outputs) out.output.push_back(y.to_signed());
  out.statement = std::move(st);
  return out;
}

InferenceProof prove_inference(const QuantizedFnn& model, ByteSpan proving_key,
                               std::span<const std::int64_t> input) {
  return prove_inference(model, proving_key, input, random_digest());
}

Statement make_statement(const VerificationKey& vk, std::span<const std::int64_t> input,
                         std::span<const std::int64_t> output) {
  Statement st;
  st.circuit_digest = vk.circuit_digest;
  for (auto v : input) st.inputs.push_back(Fp::from_signed(v));
  for (auto v : output) st.outputs.push_back(Fp::from_signed(v));
  st.weight_commitment = vk.weight_commitment;
  return st;
}

Verdict verify_inference(ByteSpan verification_key, std::span<const std::int64_t> input,
                         std::span<const std::int64_t> output, ByteSpan proof) {
  try {
    VerificationKey vk = VerificationKey::deserialize(verification_key);
    CompiledFnn structure = compile_fnn_structure(vk.dims, vk.bind_weights);
    if (structure.circuit.digest() != vk.circuit_digest)
      return {false, "verification key digest does not match the declared model shape"};
    if (input.size() != vk.dims.front() || output.size() != vk.num_outputs)
      return {false, "input or output arity does not match the verification key"};
    Statement st = make_statement(vk, input, output);
    return verify(st, Proof::deserialize(proof), structure.circuit);
  } catch (const Error& e) {
    if (e.code() != Errc::MalformedProof && e.code() != Errc::ArityMismatch && e.code() != Errc::InvalidModel)
      throw;
    return {false, std::string("malformed: ") + e.what()};
  }
}

}  // namespace zkmlops::zk
