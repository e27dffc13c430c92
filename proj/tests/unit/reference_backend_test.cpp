#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "zkmlops/zk/reference_backend.hpp"

using namespace zkmlops;
using namespace zkmlops::zk;
using fixtures::seed_digest;

namespace {
QuantizedFnn model(std::uint64_t seed, std::vector<std::uint32_t> dims = {6, 5, 2}) {
  std::mt19937_64 rng(seed);
  return QuantizedFnn::random(dims, rng);
}
}  // namespace

TEST_CASE("setup is deterministic") {
  auto m = model(1);
  auto a = setup(m, {8, true});
  auto b = setup(m, {8, true});
  CHECK(a.verification_key == b.verification_key);
  CHECK(a.proving_key == b.proving_key);
}

TEST_CASE("unbound verification key is independent of the weights") {
  auto a = setup(model(1), {8, false});
  auto b = setup(model(2), {8, false});
  CHECK(a.verification_key == b.verification_key);
  CHECK_FALSE(VerificationKey::deserialize(a.verification_key).weight_commitment.has_value());
}

TEST_CASE("bound verification key carries a weight commitment that differs across models") {
  auto va = VerificationKey::deserialize(setup(model(1), {8, true}).verification_key);
  auto vb = VerificationKey::deserialize(setup(model(2), {8, true}).verification_key);
  REQUIRE(va.weight_commitment.has_value());
  REQUIRE(vb.weight_commitment.has_value());
  CHECK(*va.weight_commitment != *vb.weight_commitment);
  CHECK(va.circuit_digest == vb.circuit_digest);
}

TEST_CASE("four-step round trip with tampering") {
  auto m = model(3);
  auto keys = setup(m, {8, true});
  std::vector<std::int64_t> x{1, -2, 3, -4, 5, -6};
  auto proof = prove_inference(m, keys.proving_key, x, seed_digest(1));
  CHECK(proof.output.size() == 2);
  CHECK(verify_inference(keys.verification_key, x, proof.output, proof.proof).accepted);
  auto y = proof.output;
  y[0] += 1;
  CHECK_FALSE(verify_inference(keys.verification_key, x, y, proof.proof).accepted);
  auto x2 = x;
  x2[5] = 7;
  CHECK_FALSE(verify_inference(keys.verification_key, x2, proof.output, proof.proof).accepted);
  // A different model under the same dims does not match the bound key.
  auto other = prove_inference(model(4), setup(model(4), {8, true}).proving_key, x, seed_digest(1));
  CHECK_FALSE(verify_inference(keys.verification_key, x, other.output, other.proof).accepted);
  // Malformed inputs are rejections, not crashes.
  Bytes junk{1, 2, 3};
  CHECK_FALSE(verify_inference(junk, x, proof.output, proof.proof).accepted);
  CHECK_FALSE(verify_inference(keys.verification_key, x, proof.output, junk).accepted);
  CHECK_FALSE(verify_inference(keys.verification_key, std::vector<std::int64_t>{1}, proof.output, proof.proof).accepted);
}

TEST_CASE("verification key with a forged circuit digest is rejected") {
  auto m = model(5);
  auto keys = setup(m, {4, false});
  std::vector<std::int64_t> x{0, 1, 2, 3, 4, 5};
  auto proof = prove_inference(m, keys.proving_key, x, seed_digest(2));
  auto vk = VerificationKey::deserialize(keys.verification_key);
  vk.circuit_digest[0] ^= 1;
  CHECK_FALSE(verify_inference(vk.serialize(), x, proof.output, proof.proof).accepted);
}

TEST_CASE("setup parameters JSON") {
  auto p = SetupParameters::from_json(R"({"repetitions": 8})");
  CHECK(p.repetitions == 8);
  CHECK(p.bind_weights);
  CHECK(SetupParameters::from_json(p.to_json()).repetitions == 8);
  CHECK_THROWS_AS(SetupParameters::from_json(R"({"reps": 8})"), Error);
  CHECK_THROWS_AS(SetupParameters::from_json(R"({"repetitions": 0})"), Error);
}
