#include "zkmlops/zk/mimc.hpp"

namespace zkmlops::zk {

Fp fp_from_digest(const Digest& d) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | d[static_cast<std::size_t>(i)];
  return Fp(v);
}

namespace mimc {

const Digest& constants_seed() {
  static const Digest seed = sha256("zkmlops.mimc.x17.r64.v1");
  return seed;
}

const std::array<Fp, kRounds>& round_constants() {
  static const auto constants = [] {
    std::array<Fp, kRounds> c{};
    for (std::uint32_t i = 0; i < kRounds; ++i) {
      Sha256 h;
      h.update(constants_seed()).update("round").update_u32(i);
      c[i] = fp_from_digest(h.digest());
    }
    return c;
  }();
  return constants;
}

Fp initial_value() {
  static const Fp iv = [] {
    Sha256 h;
    h.update(constants_seed()).update("iv");
    return fp_from_digest(h.digest());
  }();
  return iv;
}

Fp encrypt(Fp x, Fp key) {
  for (const Fp& c : round_constants()) {
    Fp t = x + key + c;
    Fp t2 = t * t;
    Fp t4 = t2 * t2;
    Fp t8 = t4 * t4;
    Fp t16 = t8 * t8;
    x = t16 * t;
  }
  return x + key;
}

}  // namespace mimc

Fp mimc_hash(std::span<const Fp> elements) {
  Fp h = mimc::initial_value();
  auto absorb = [&h](Fp m) { h = mimc::encrypt(m, h) + h + m; };
  for (Fp m : elements) absorb(m);
  absorb(Fp(elements.size()));
  return h;
}

namespace {

std::uint32_t encrypt_gadget(CircuitBuilder& b, std::uint32_t x, std::uint32_t key) {
  for (const Fp& c : mimc::round_constants()) {
    std::uint32_t t = b.add_constant(b.add(x, key), c);
    std::uint32_t t2 = b.mul(t, t);
    std::uint32_t t4 = b.mul(t2, t2);
    std::uint32_t t8 = b.mul(t4, t4);
    std::uint32_t t16 = b.mul(t8, t8);
    x = b.mul(t16, t);
  }
  return b.add(x, key);
}

}  // namespace

std::uint32_t mimc_hash_gadget(CircuitBuilder& b, std::span<const std::uint32_t> wires) {
  std::uint32_t h = b.constant(mimc::initial_value());
  auto absorb = [&](std::uint32_t m) { h = b.add(b.add(encrypt_gadget(b, m, h), h), m); };
  for (auto w : wires) absorb(w);
  absorb(b.constant(Fp(wires.size())));
  return h;
}

}  // namespace zkmlops::zk
