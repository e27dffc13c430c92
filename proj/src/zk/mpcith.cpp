#include "zkmlops/zk/mpcith.hpp"

#include <openssl/evp.h>

#include <random>

#include "zkmlops/zk/transcript.hpp"

namespace zkmlops::zk {

namespace {

constexpr std::string_view kDomain = "zkmlops.mpcith.v1";

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedProof, what); }

// Party random tape: AES-128-CTR keystream under the party seed, read as
// 61-bit words with rejection of the single out-of-range value.
class Tape {
 public:
  explicit Tape(const Seed& seed) : ctx_(EVP_CIPHER_CTX_new()) {
    static constexpr std::uint8_t kIv[16] = {};
    if (ctx_ == nullptr || EVP_EncryptInit_ex(ctx_, EVP_aes_128_ctr(), nullptr, seed.data(), kIv) != 1)
      throw Error(Errc::Io, "AES-CTR init failed");
  }
  ~Tape() { EVP_CIPHER_CTX_free(ctx_); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Fp next() {
    for (;;) {
      if (pos_ == words_.size()) refill();
      std::uint64_t v = words_[pos_++] & Fp::kModulus;
      if (v != Fp::kModulus) return Fp(v);
    }
  }

 private:
  void refill() {
    static const std::array<std::uint8_t, sizeof(std::uint64_t) * 512> kZeros{};
    std::array<std::uint8_t, kZeros.size()> out{};
    int len = 0;
    EVP_EncryptUpdate(ctx_, out.data(), &len, kZeros.data(), static_cast<int>(kZeros.size()));
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t v = 0;
      for (int b = 7; b >= 0; --b) v = (v << 8) | out[i * 8 + static_cast<std::size_t>(b)];
      words_[i] = v;
    }
    pos_ = 0;
  }

  EVP_CIPHER_CTX* ctx_;
  std::array<std::uint64_t, 512> words_{};
  std::size_t pos_ = words_.size();
};

std::uint8_t next_party(std::uint8_t p) { return static_cast<std::uint8_t>((p + 1) % 3); }

// Shared, public-only facts about a circuit used by both sides.
struct CircuitInfo {
  std::vector<bool> mask;
  std::vector<Fp> public_values;             // valid where mask[i]
  std::vector<std::uint32_t> secret_asserts;  // AssertZero wires on secret values
  std::uint32_t multiplications = 0;
  std::uint32_t output_length = 0;

  CircuitInfo(const Circuit& c, std::span<const Fp> public_inputs) : mask(public_wire_mask(c)) {
    if (public_inputs.size() != c.num_public_inputs)
      throw Error(Errc::ArityMismatch, "public input arity mismatch");
    public_values.resize(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      const Gate& g = c.gates[i];
      if (g.op == GateOp::Mul && !mask[g.a] && !mask[g.b]) ++multiplications;
      if (g.op == GateOp::AssertZero && !mask[i]) secret_asserts.push_back(static_cast<std::uint32_t>(i));
      if (!mask[i]) continue;
      switch (g.op) {
        case GateOp::Add: public_values[i] = public_values[g.a] + public_values[g.b]; break;
        case GateOp::Mul: public_values[i] = public_values[g.a] * public_values[g.b]; break;
        case GateOp::ScalarMul: public_values[i] = g.c * public_values[g.a]; break;
        case GateOp::Const: public_values[i] = g.c; break;
        case GateOp::Input: public_values[i] = public_inputs[g.a]; break;
        case GateOp::AssertZero: public_values[i] = public_values[g.a]; break;
        case GateOp::Witness: break;
      }
    }
    output_length = static_cast<std::uint32_t>(c.outputs.size() + secret_asserts.size());
  }

  std::vector<Fp> collect_outputs(const Circuit& c, const std::vector<Fp>& wires) const {
    std::vector<Fp> out;
    out.reserve(output_length);
    for (auto o : c.outputs) out.push_back(wires[o]);
    for (auto a : secret_asserts) out.push_back(wires[a]);
    return out;
  }
};

// One party's evaluation state. Public wires follow the convention that
// party 0 holds the value and the others hold zero.
struct PartyRun {
  std::uint8_t index = 0;
  std::vector<Fp> input_share;
  std::vector<Fp> wires;
  std::vector<Fp> messages;
};

Fp public_share(const CircuitInfo& info, std::uint32_t wire, std::uint8_t party) {
  return party == 0 ? info.public_values[wire] : Fp();
}

// Evaluates every non-multiplication gate for `run`; for secret
// multiplications calls mul(run, gate_index, a, b) to obtain the share.
template <typename MulFn>
void evaluate_party(const Circuit& c, const CircuitInfo& info, PartyRun& run, MulFn&& mul) {
  run.wires.assign(c.gates.size(), Fp());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    Fp& out = run.wires[i];
    switch (g.op) {
      case GateOp::Input:
      case GateOp::Const: out = public_share(info, static_cast<std::uint32_t>(i), run.index); break;
      case GateOp::Witness: out = run.input_share[g.a]; break;
      case GateOp::Add: out = run.wires[g.a] + run.wires[g.b]; break;
      case GateOp::ScalarMul: out = g.c * run.wires[g.a]; break;
      case GateOp::AssertZero: out = run.wires[g.a]; break;
      case GateOp::Mul:
        if (info.mask[g.a]) {
          out = info.public_values[g.a] * run.wires[g.b];
        } else if (info.mask[g.b]) {
          out = run.wires[g.a] * info.public_values[g.b];
        } else {
          out = mul(static_cast<std::uint32_t>(i), g.a, g.b);
          run.messages.push_back(out);
        }
        break;
    }
  }
}

std::vector<Fp> seeded_input_share(Tape& tape, std::uint32_t n) {
  std::vector<Fp> s(n);
  for (auto& v : s) v = tape.next();
  return s;
}

Transcript build_transcript(const Statement& statement, const Proof& proof) {
  Transcript tr(kDomain);
  tr.absorb("statement", statement.serialize());
  ByteWriter params;
  params.u32(static_cast<std::uint32_t>(proof.repetitions.size()));
  params.u32(proof.multiplications);
  params.u32(proof.witness_length);
  params.u32(proof.output_length);
  tr.absorb("parameters", params.bytes());
  for (const auto& rep : proof.repetitions) {
    for (const auto& c : rep.commitments) tr.absorb("commitment", c);
    for (const auto& s : rep.output_shares) tr.absorb("output-share", s);
  }
  return tr;
}

}  // namespace

std::vector<Fp> Statement::public_inputs() const {
  std::vector<Fp> v = inputs;
  if (weight_commitment) v.push_back(*weight_commitment);
  return v;
}

Bytes Statement::serialize() const {
  ByteWriter w;
  w.u8(kProofVersion);
  w.raw(circuit_digest);
  w.u32(static_cast<std::uint32_t>(inputs.size()));
  for (Fp v : inputs) w.u64(v.value());
  w.u32(static_cast<std::uint32_t>(outputs.size()));
  for (Fp v : outputs) w.u64(v.value());
  w.u8(weight_commitment ? 1 : 0);
  if (weight_commitment) w.u64(weight_commitment->value());
  return std::move(w).take();
}

Statement Statement::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != kProofVersion) malformed("unsupported statement version");
  Statement s;
  s.circuit_digest = r.fixed<32>();
  auto read_vec = [&r](std::vector<Fp>& v) {
    std::uint32_t n = r.u32();
    if (n > r.remaining() / 8) malformed("vector exceeds payload");
    v.resize(n);
    for (auto& e : v) {
      std::uint64_t x = r.u64();
      if (x >= Fp::kModulus) malformed("non-canonical field element");
      e = Fp(x);
    }
  };
  read_vec(s.inputs);
  read_vec(s.outputs);
  std::uint8_t has_cw = r.u8();
  if (has_cw > 1) malformed("bad commitment flag");
  if (has_cw) {
    std::uint64_t x = r.u64();
    if (x >= Fp::kModulus) malformed("non-canonical field element");
    s.weight_commitment = Fp(x);
  }
  r.expect_done();
  return s;
}

Bytes Proof::serialize() const {
  ByteWriter w;
  w.u8(version);
  w.u32(static_cast<std::uint32_t>(repetitions.size()));
  w.u32(multiplications);
  w.u32(witness_length);
  w.u32(output_length);
  w.raw(transcript_digest);
  for (const auto& rep : repetitions) {
    for (const auto& c : rep.commitments) w.raw(c);
    for (const auto& s : rep.seeds) w.raw(s);
    for (const auto& s : rep.salts) w.raw(s);
    for (Fp v : rep.input_share) w.u64(v.value());
    for (Fp v : rep.messages) w.u64(v.value());
    for (const auto& shares : rep.output_shares)
      for (Fp v : shares) w.u64(v.value());
  }
  return std::move(w).take();
}

Proof Proof::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  Proof p;
  p.version = r.u8();
  if (p.version != kProofVersion) malformed("unsupported proof version");
  std::uint32_t t = r.u32();
  p.multiplications = r.u32();
  p.witness_length = r.u32();
  p.output_length = r.u32();
  p.transcript_digest = r.fixed<32>();
  if (t == 0) malformed("proof has no repetitions");
  const unsigned __int128 per_rep = 3 * 32 + 2 * 16 + 2 * 16 +
                                    8 * (static_cast<unsigned __int128>(p.witness_length) + p.multiplications +
                                         3 * static_cast<unsigned __int128>(p.output_length));
  if (per_rep * t != r.remaining()) malformed("proof length does not match its header");
  auto read_fp = [&r]() {
    std::uint64_t x = r.u64();
    if (x >= Fp::kModulus) malformed("non-canonical field element");
    return Fp(x);
  };
  p.repetitions.resize(t);
  for (auto& rep : p.repetitions) {
    for (auto& c : rep.commitments) c = r.fixed<32>();
    for (auto& s : rep.seeds) s = r.fixed<16>();
    for (auto& s : rep.salts) s = r.fixed<16>();
    rep.input_share.resize(p.witness_length);
    for (auto& v : rep.input_share) v = read_fp();
    rep.messages.resize(p.multiplications);
    for (auto& v : rep.messages) v = read_fp();
    for (auto& shares : rep.output_shares) {
      shares.resize(p.output_length);
      for (auto& v : shares) v = read_fp();
    }
  }
  r.expect_done();
  return p;
}

Digest commit_view(std::uint8_t party, const Seed& seed, const Salt& salt, std::span<const Fp> input_share,
                   std::span<const Fp> messages) {
  Sha256 h;
  h.update("zkmlops.mpcith.view.v1");
  std::uint8_t p = party;
  h.update(ByteSpan(&p, 1)).update(salt).update(seed);
  h.update_u64(input_share.size());
  for (Fp v : input_share) h.update_u64(v.value());
  h.update_u64(messages.size());
  for (Fp v : messages) h.update_u64(v.value());
  return h.digest();
}

std::vector<std::uint8_t> derive_challenges(const Statement& statement, const Proof& proof) {
  return build_transcript(statement, proof).challenge_trits(proof.repetitions.size());
}

Digest random_digest() {
  std::random_device rd;
  Digest d{};
  for (std::size_t i = 0; i < d.size(); i += 4) {
    std::uint32_t v = rd();
    for (std::size_t b = 0; b < 4; ++b) d[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
  }
  return d;
}

namespace detail {

namespace {
template <std::size_t N>
std::array<std::uint8_t, N> derive(std::string_view label, const Digest& randomness, std::uint32_t repetition,
                                   std::uint8_t party) {
  Sha256 h;
  h.update(label).update(randomness).update_u32(repetition).update_u32(party);
  auto d = h.digest();
  std::array<std::uint8_t, N> out{};
  std::copy_n(d.begin(), N, out.begin());
  return out;
}
}  // namespace

Seed party_seed(const Digest& randomness, std::uint32_t repetition, std::uint8_t party) {
  return derive<16>("zkmlops.mpcith.seed", randomness, repetition, party);
}

Salt party_salt(const Digest& randomness, std::uint32_t repetition, std::uint8_t party) {
  return derive<16>("zkmlops.mpcith.salt", randomness, repetition, party);
}

Proof prove_unchecked(const Statement& statement, const Witness& witness, const Circuit& circuit,
                      std::uint32_t repetitions, const Digest& randomness, const std::optional<Tamper>& tamper,
                      std::vector<Fp>* claimed_outputs) {
  if (repetitions == 0) throw Error(Errc::InvalidArgument, "at least one repetition is required");
  if (witness.values.size() != circuit.num_witness) throw Error(Errc::ArityMismatch, "witness length mismatch");
  const CircuitInfo info(circuit, statement.public_inputs());

  Proof proof;
  proof.multiplications = info.multiplications;
  proof.witness_length = circuit.num_witness;
  proof.output_length = info.output_length;
  proof.repetitions.resize(repetitions);

  struct RepState {
    std::array<Seed, 3> seeds;
    std::array<Salt, 3> salts;
    std::array<PartyRun, 3> runs;
  };
  std::vector<RepState> states(repetitions);
  std::vector<Fp> claimed;

  for (std::uint32_t r = 0; r < repetitions; ++r) {
    RepState& st = states[r];
    std::array<std::unique_ptr<Tape>, 3> tapes;
    for (std::uint8_t p = 0; p < 3; ++p) {
      st.seeds[p] = party_seed(randomness, r, p);
      st.salts[p] = party_salt(randomness, r, p);
      tapes[p] = std::make_unique<Tape>(st.seeds[p]);
      st.runs[p].index = p;
    }
    st.runs[0].input_share = seeded_input_share(*tapes[0], circuit.num_witness);
    st.runs[1].input_share = seeded_input_share(*tapes[1], circuit.num_witness);
    st.runs[2].input_share.resize(circuit.num_witness);
    for (std::size_t i = 0; i < circuit.num_witness; ++i)
      st.runs[2].input_share[i] = witness.values[i] - st.runs[0].input_share[i] - st.runs[1].input_share[i];

    // Lock-step evaluation of the three parties.
    for (auto& run : st.runs) {
      run.wires.assign(circuit.gates.size(), Fp());
      run.messages.clear();
      run.messages.reserve(info.multiplications);
    }
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
      const Gate& g = circuit.gates[i];
      const auto wire = static_cast<std::uint32_t>(i);
      if (g.op == GateOp::Mul && !info.mask[g.a] && !info.mask[g.b]) {
        std::array<Fp, 3> rnd;
        for (std::uint8_t p = 0; p < 3; ++p) rnd[p] = tapes[p]->next();
        for (std::uint8_t p = 0; p < 3; ++p) {
          const auto& me = st.runs[p].wires;
          const auto& nx = st.runs[next_party(p)].wires;
          Fp z = me[g.a] * me[g.b] + nx[g.a] * me[g.b] + me[g.a] * nx[g.b] + rnd[p] - rnd[next_party(p)];
          if (tamper && tamper->gate == wire && tamper->party == p) z += tamper->delta;
          st.runs[p].wires[i] = z;
          st.runs[p].messages.push_back(z);
        }
        continue;
      }
      for (auto& run : st.runs) {
        Fp& out = run.wires[i];
        switch (g.op) {
          case GateOp::Input:
          case GateOp::Const: out = public_share(info, wire, run.index); break;
          case GateOp::Witness: out = run.input_share[g.a]; break;
          case GateOp::Add: out = run.wires[g.a] + run.wires[g.b]; break;
          case GateOp::ScalarMul: out = g.c * run.wires[g.a]; break;
          case GateOp::AssertZero: out = run.wires[g.a]; break;
          case GateOp::Mul:
            out = info.mask[g.a] ? info.public_values[g.a] * run.wires[g.b]
                                 : run.wires[g.a] * info.public_values[g.b];
            break;
        }
      }
    }

    RepetitionProof& rp = proof.repetitions[r];
    for (std::uint8_t p = 0; p < 3; ++p) {
      rp.output_shares[p] = info.collect_outputs(circuit, st.runs[p].wires);
      std::span<const Fp> share = p == 2 ? std::span<const Fp>(st.runs[2].input_share) : std::span<const Fp>();
      rp.commitments[p] = commit_view(p, st.seeds[p], st.salts[p], share, st.runs[p].messages);
    }
    for (auto& run : st.runs) std::vector<Fp>().swap(run.wires);
    std::vector<Fp> sums(circuit.outputs.size());
    for (std::size_t k = 0; k < sums.size(); ++k)
      sums[k] = rp.output_shares[0][k] + rp.output_shares[1][k] + rp.output_shares[2][k];
    if (r == 0) claimed = std::move(sums);
  }

  Statement claimed_statement = statement;
  claimed_statement.outputs = claimed;
  if (claimed_outputs != nullptr) *claimed_outputs = claimed;

  Transcript tr = build_transcript(claimed_statement, proof);
  proof.transcript_digest = tr.state();
  auto challenges = tr.challenge_trits(repetitions);

  for (std::uint32_t r = 0; r < repetitions; ++r) {
    RepState& st = states[r];
    RepetitionProof& rp = proof.repetitions[r];
    const std::uint8_t e = challenges[r];
    const std::uint8_t f = next_party(e);
    rp.seeds = {st.seeds[e], st.seeds[f]};
    rp.salts = {st.salts[e], st.salts[f]};
    const std::uint8_t explicit_party = (e == 2 || f == 2) ? 2 : f;
    rp.input_share = st.runs[explicit_party].input_share;
    rp.messages = st.runs[f].messages;
  }
  return proof;
}

}  // namespace detail

Proof prove(const Statement& statement, const Witness& witness, const Circuit& circuit, std::uint32_t repetitions,
            const Digest& randomness) {
  if (statement.circuit_digest != circuit.digest())
    throw Error(Errc::WitnessMismatch, "statement refers to a different circuit");
  std::vector<Fp> outputs;
  try {
    outputs = eval_circuit(circuit, statement.public_inputs(), witness.values);
  } catch (const Error& e) {
    throw Error(Errc::WitnessMismatch, std::string("witness does not satisfy the circuit: ") + e.what());
  }
  if (outputs != statement.outputs) throw Error(Errc::WitnessMismatch, "C(x, w) differs from the claimed y");
  return detail::prove_unchecked(statement, witness, circuit, repetitions, randomness, std::nullopt, nullptr);
}

Proof prove(const Statement& statement, const Witness& witness, const Circuit& circuit,
            std::uint32_t repetitions) {
  return prove(statement, witness, circuit, repetitions, random_digest());
}

Verdict verify(const Statement& statement, const Proof& proof, const Circuit& circuit) {
  auto reject = [](std::string why) { return Verdict{false, std::move(why)}; };
  if (statement.circuit_digest != circuit.digest()) return reject("statement refers to a different circuit");
  if (statement.public_inputs().size() != circuit.num_public_inputs)
    return reject("public input arity mismatch");
  if (statement.outputs.size() != circuit.outputs.size()) return reject("output arity mismatch");
  const CircuitInfo info(circuit, statement.public_inputs());
  if (proof.version != kProofVersion) return reject("unsupported proof version");
  if (proof.repetitions.empty()) return reject("proof has no repetitions");
  if (proof.multiplications != info.multiplications || proof.witness_length != circuit.num_witness ||
      proof.output_length != info.output_length)
    return reject("proof shape does not match the circuit");
  for (const auto& rep : proof.repetitions) {
    if (rep.input_share.size() != proof.witness_length || rep.messages.size() != proof.multiplications)
      return reject("repetition shape does not match the header");
    for (const auto& s : rep.output_shares)
      if (s.size() != proof.output_length) return reject("output share length mismatch");
  }

  // Public outputs and public assertions are checked in the clear.
  for (std::size_t k = 0; k < circuit.outputs.size(); ++k) {
    auto w = circuit.outputs[k];
    if (info.mask[w] && info.public_values[w] != statement.outputs[k]) return reject("public output mismatch");
  }
  for (std::size_t i = 0; i < circuit.gates.size(); ++i)
    if (circuit.gates[i].op == GateOp::AssertZero && info.mask[i] && !info.public_values[i].is_zero())
      return reject("public assertion fails");

  Transcript tr = build_transcript(statement, proof);
  if (tr.state() != proof.transcript_digest) return reject("transcript digest mismatch");
  const auto challenges = tr.challenge_trits(proof.repetitions.size());

  for (std::size_t r = 0; r < proof.repetitions.size(); ++r) {
    const RepetitionProof& rep = proof.repetitions[r];
    const std::uint8_t e = challenges[r];
    const std::uint8_t f = next_party(e);
    const std::string where = "repetition " + std::to_string(r);

    // Sum of all three output shares must open to (y, 0...0).
    for (std::size_t k = 0; k < proof.output_length; ++k) {
      Fp sum = rep.output_shares[0][k] + rep.output_shares[1][k] + rep.output_shares[2][k];
      Fp expected = k < statement.outputs.size() ? statement.outputs[k] : Fp();
      if (sum != expected) return reject(where + ": output shares do not open to the statement");
    }

    Tape tape_e(rep.seeds[0]);
    Tape tape_f(rep.seeds[1]);
    PartyRun run_e, run_f;
    run_e.index = e;
    run_f.index = f;
    auto load_share = [&](PartyRun& run, Tape& tape) -> bool {
      if (run.index == 2) {
        run.input_share = rep.input_share;
        return true;
      }
      run.input_share = seeded_input_share(tape, circuit.num_witness);
      // When party 2 is not opened the explicit share slot carries party 1's.
      if (e == 0 && run.index == 1) return run.input_share == rep.input_share;
      return true;
    };
    if (!load_share(run_e, tape_e) || !load_share(run_f, tape_f))
      return reject(where + ": explicit input share is inconsistent");

    // Party f first: its multiplication outputs are the recorded messages,
    // while its tape still supplies R_f for party e's cross terms.
    std::vector<Fp> rnd_f;
    rnd_f.reserve(proof.multiplications);
    std::size_t k = 0;
    evaluate_party(circuit, info, run_f, [&](std::uint32_t, std::uint32_t, std::uint32_t) {
      rnd_f.push_back(tape_f.next());
      return rep.messages[k++];
    });
    run_f.messages.clear();
    std::size_t m = 0;
    evaluate_party(circuit, info, run_e, [&](std::uint32_t, std::uint32_t a, std::uint32_t b) {
      const auto& me = run_e.wires;
      const auto& nx = run_f.wires;
      Fp z = me[a] * me[b] + nx[a] * me[b] + me[a] * nx[b] + tape_e.next() - rnd_f[m];
      ++m;
      return z;
    });

    auto share_of = [&](const PartyRun& run) {
      return run.index == 2 ? std::span<const Fp>(run.input_share) : std::span<const Fp>();
    };
    if (commit_view(e, rep.seeds[0], rep.salts[0], share_of(run_e), run_e.messages) != rep.commitments[e])
      return reject(where + ": view commitment of party " + std::to_string(e) + " does not open");
    if (commit_view(f, rep.seeds[1], rep.salts[1], share_of(run_f), rep.messages) != rep.commitments[f])
      return reject(where + ": view commitment of party " + std::to_string(f) + " does not open");
    if (info.collect_outputs(circuit, run_e.wires) != rep.output_shares[e] ||
        info.collect_outputs(circuit, run_f.wires) != rep.output_shares[f])
      return reject(where + ": opened output shares are inconsistent with the views");
  }
  return Verdict{true, "all " + std::to_string(proof.repetitions.size()) + " repetitions verified"};
}

Verdict verify(const Statement& statement, ByteSpan proof, const Circuit& circuit) {
  return verify(statement, Proof::deserialize(proof), circuit);
}

}  // namespace zkmlops::zk
