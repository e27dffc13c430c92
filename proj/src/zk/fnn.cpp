#include "zkmlops/zk/fnn.hpp"

#include <charconv>
#include <cstdlib>

#include "json.hpp"
#include "zkmlops/zk/mimc.hpp"

namespace zkmlops::zk {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidModel, what); }

bool in_quant_range(std::int64_t v) { return v >= kQuantMin && v <= kQuantMax; }

}  // namespace

void QuantizedFnn::validate() const {
  if (dims.size() < 2) invalid("a model needs at least two layer dimensions");
  for (auto d : dims)
    if (d == 0) invalid("layer dimensions must be positive");
  if (weights.size() != layer_count() || biases.size() != layer_count())
    invalid("expected " + std::to_string(layer_count()) + " weight and bias arrays");
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (weights[l].size() != std::size_t{dims[l]} * dims[l + 1])
      invalid("weight matrix " + std::to_string(l) + " has wrong size");
    if (biases[l].size() != dims[l + 1]) invalid("bias vector " + std::to_string(l) + " has wrong size");
    for (auto w : weights[l])
      if (!in_quant_range(w)) invalid("weight outside the 8-bit range");
    for (auto b : biases[l])
      if (!in_quant_range(b)) invalid("bias outside the 8-bit range");
  }
}

std::vector<std::int32_t> QuantizedFnn::flat_parameters() const {
  std::vector<std::int32_t> flat;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

std::string QuantizedFnn::to_json() const {
  json j;
  j["version"] = 1;
  j["dims"] = dims;
  j["weights"] = weights;
  j["biases"] = biases;
  return j.dump();
}

QuantizedFnn QuantizedFnn::from_json(std::string_view text) {
  QuantizedFnn m;
  try {
    auto j = json::parse(text);
    if (j.value("version", 0) != 1) invalid("model file version must be 1");
    m.dims = j.at("dims").get<std::vector<std::uint32_t>>();
    m.weights = j.at("weights").get<std::vector<std::vector<std::int32_t>>>();
    m.biases = j.at("biases").get<std::vector<std::vector<std::int32_t>>>();
  } catch (const json::exception& e) {
    invalid(std::string("malformed model file: ") + e.what());
  }
  m.validate();
  return m;
}

QuantizedFnn QuantizedFnn::random(std::span<const std::uint32_t> dims, std::mt19937_64& rng) {
  QuantizedFnn m;
  m.dims.assign(dims.begin(), dims.end());
  std::uniform_int_distribution<std::int32_t> dist(kQuantMin, kQuantMax);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<std::int32_t> w(std::size_t{dims[l]} * dims[l + 1]);
    for (auto& v : w) v = dist(rng);
    std::vector<std::int32_t> b(dims[l + 1]);
    for (auto& v : b) v = dist(rng);
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  m.validate();
  return m;
}

std::vector<std::uint32_t> parse_dims(std::string_view spec) {
  std::vector<std::uint32_t> dims;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    auto end = spec.find('-', pos);
    if (end == std::string_view::npos) end = spec.size();
    auto token = spec.substr(pos, end - pos);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || v == 0)
      throw Error(Errc::InvalidArgument, "bad model spec '" + std::string(spec) + "'");
    dims.push_back(v);
    pos = end + 1;
  }
  if (dims.size() < 2) throw Error(Errc::InvalidArgument, "model spec needs at least two dims");
  return dims;
}

std::string format_dims(std::span<const std::uint32_t> dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(dims[i]);
  }
  return s;
}

std::vector<std::int64_t> read_vector_json(std::string_view text, std::string_view field) {
  try {
    auto j = json::parse(text);
    if (j.value("version", 0) != 1) throw Error(Errc::InvalidArgument, "vector file version must be 1");
    return j.at(std::string(field)).get<std::vector<std::int64_t>>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, "malformed " + std::string(field) + " file: " + e.what());
  }
}

std::string write_vector_json(std::span<const std::int64_t> values, std::string_view field) {
  json j;
  j["version"] = 1;
  j[std::string(field)] = std::vector<std::int64_t>(values.begin(), values.end());
  return j.dump();
}

Bytes CompiledFnn::serialize() const {
  ByteWriter w;
  w.u8(1);
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.u32(d);
  w.u8(bind_weights ? 1 : 0);
  w.section(circuit.serialize());
  w.u32(layout.weights_offset);
  w.u32(layout.weights_count);
  w.u32(layout.bits_offset);
  w.u32(layout.bits_count);
  w.u32(layout.hash_offset);
  w.u32(layout.hash_count);
  w.u32(static_cast<std::uint32_t>(layout.hints.size()));
  for (const auto& h : layout.hints) {
    w.u32(h.witness_index);
    w.u32(h.source_wire);
    w.u32(h.bit);
    w.u64(h.offset.value());
  }
  return std::move(w).take();
}

CompiledFnn CompiledFnn::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != 1) throw Error(Errc::MalformedProof, "unsupported compiled-model version");
  CompiledFnn c;
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 4) throw Error(Errc::MalformedProof, "dims exceed payload");
  c.dims.resize(n);
  for (auto& d : c.dims) d = r.u32();
  c.bind_weights = r.u8() != 0;
  c.circuit = Circuit::deserialize(r.section());
  c.layout.weights_offset = r.u32();
  c.layout.weights_count = r.u32();
  c.layout.bits_offset = r.u32();
  c.layout.bits_count = r.u32();
  c.layout.hash_offset = r.u32();
  c.layout.hash_count = r.u32();
  std::uint32_t hints = r.u32();
  if (hints > r.remaining() / 20) throw Error(Errc::MalformedProof, "hints exceed payload");
  c.layout.hints.resize(hints);
  for (auto& h : c.layout.hints) {
    h.witness_index = r.u32();
    h.source_wire = r.u32();
    h.bit = r.u32();
    h.offset = Fp(r.u64());
  }
  r.expect_done();
  return c;
}

CompiledFnn compile_fnn_structure(std::span<const std::uint32_t> dims, bool bind_weights) {
  if (dims.size() < 2) throw Error(Errc::InvalidModel, "a model needs at least two layer dimensions");
  const std::uint32_t n_in = dims.front();
  CircuitBuilder b(n_in + (bind_weights ? 1 : 0));

  // Parameter witnesses first so they form a contiguous prefix of w.
  std::vector<std::vector<std::uint32_t>> w_wires, b_wires;
  std::vector<std::uint32_t> all_params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<std::uint32_t> w(std::size_t{dims[l]} * dims[l + 1]);
    for (auto& wire : w) wire = b.witness();
    std::vector<std::uint32_t> bias(dims[l + 1]);
    for (auto& wire : bias) wire = b.witness();
    all_params.insert(all_params.end(), w.begin(), w.end());
    all_params.insert(all_params.end(), bias.begin(), bias.end());
    w_wires.push_back(std::move(w));
    b_wires.push_back(std::move(bias));
  }
  const std::uint32_t n_params = b.num_witness();

  std::vector<std::uint32_t> act(n_in);
  for (std::uint32_t i = 0; i < n_in; ++i) act[i] = b.input(i);

  const std::uint32_t bits_offset = b.num_witness();
  const std::size_t layers = dims.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::uint32_t rows = dims[l + 1], cols = dims[l];
    std::vector<std::uint32_t> next(rows);
    for (std::uint32_t j = 0; j < rows; ++j) {
      std::uint32_t acc = b_wires[l][j];
      for (std::uint32_t k = 0; k < cols; ++k)
        acc = b.add(acc, b.mul(w_wires[l][std::size_t{j} * cols + k], act[k]));
      next[j] = l + 1 < layers ? b.relu(acc, kReluBits) : acc;
    }
    act = std::move(next);
  }
  const std::uint32_t bits_count = b.num_witness() - bits_offset;
  for (auto o : act) b.output(o);

  if (bind_weights) {
    std::uint32_t digest = mimc_hash_gadget(b, all_params);
    b.assert_equal(digest, b.input(n_in));
  }

  CompiledFnn out;
  out.layout.weights_offset = 0;
  out.layout.weights_count = n_params;
  out.layout.bits_offset = bits_offset;
  out.layout.bits_count = bits_count;
  out.layout.hash_offset = b.num_witness();
  out.layout.hash_count = 0;
  out.layout.hints = b.hints();
  out.dims.assign(dims.begin(), dims.end());
  out.bind_weights = bind_weights;
  out.circuit = std::move(b).build();
  return out;
}

CompiledFnn compile_fnn(const QuantizedFnn& model, bool bind_weights) {
  model.validate();
  // Worst case over all 8-bit inputs (|x| <= 128), tracking per-neuron bounds.
  const std::int64_t relu_limit = std::int64_t{1} << (kReluBits - 1);
  std::vector<std::int64_t> bound(model.dims.front(), -kQuantMin);
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const std::uint32_t rows = model.dims[l + 1], cols = model.dims[l];
    std::vector<std::int64_t> next(rows);
    for (std::uint32_t j = 0; j < rows; ++j) {
      __int128 s = std::abs(model.biases[l][j]);
      for (std::uint32_t k = 0; k < cols; ++k)
        s += static_cast<__int128>(std::abs(model.weights[l][std::size_t{j} * cols + k])) * bound[k];
      const bool hidden = l + 1 < model.layer_count();
      const __int128 limit = hidden ? relu_limit : static_cast<__int128>(Fp::kModulus / 2);
      if (s >= limit)
        throw Error(Errc::RangeOverflow, "layer " + std::to_string(l) + " neuron " + std::to_string(j) +
                                             " may exceed the ReLU gadget range");
      next[j] = static_cast<std::int64_t>(s);
    }
    bound = std::move(next);
  }
  return compile_fnn_structure(model.dims, bind_weights);
}

Fp weight_commitment(const QuantizedFnn& model) {
  std::vector<Fp> params;
  for (auto v : model.flat_parameters()) params.push_back(Fp::from_signed(v));
  return mimc_hash(params);
}

FnnAssignment assign_fnn(const QuantizedFnn& model, const CompiledFnn& compiled,
                         std::span<const std::int64_t> input) {
  model.validate();
  if (model.dims != compiled.dims) throw Error(Errc::ArityMismatch, "model does not match compiled circuit");
  if (input.size() != compiled.input_count())
    throw Error(Errc::ArityMismatch, "expected " + std::to_string(compiled.input_count()) + " inputs");
  FnnAssignment a;
  for (auto v : input) {
    if (!in_quant_range(v)) throw Error(Errc::InvalidArgument, "input outside the 8-bit range");
    a.public_inputs.push_back(Fp::from_signed(v));
  }
  if (compiled.bind_weights) {
    a.weight_commitment = weight_commitment(model);
    a.public_inputs.push_back(*a.weight_commitment);
  }
  std::vector<Fp> known(compiled.circuit.num_witness);
  auto flat = model.flat_parameters();
  for (std::size_t i = 0; i < flat.size(); ++i)
    known[compiled.layout.weights_offset + i] = Fp::from_signed(flat[i]);
  a.witness = solve_witness(compiled.circuit, compiled.layout.hints, a.public_inputs, std::move(known));
  a.outputs = eval_circuit(compiled.circuit, a.public_inputs, a.witness);
  return a;
}

}  // namespace zkmlops::zk
