#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "zkmlops/common/sha256.hpp"
#include "zkmlops/zk/circuit.hpp"
#include "zkmlops/zk/field.hpp"

// MiMC over F_p with x -> x^17 rounds, chained in Miyaguchi-Preneel mode.
// Pedagogical parameters (64 rounds); not for production use.
namespace zkmlops::zk::mimc {

inline constexpr std::uint32_t kRounds = 64;
inline constexpr std::uint64_t kExponent = 17;

// SHA-256 of the fixed seed label; every constant below derives from it.
const Digest& constants_seed();
const std::array<Fp, kRounds>& round_constants();
Fp initial_value();

// E_k(x): kRounds of x <- (x + k + c_i)^17, then + k.
Fp encrypt(Fp x, Fp key);

}  // namespace zkmlops::zk::mimc

namespace zkmlops::zk {

// h_0 = IV; h_{i+1} = E_{h_i}(m_i) + h_i + m_i; the element count is absorbed
// last so that prefixes and zero-padding give distinct digests.
Fp mimc_hash(std::span<const Fp> elements);

// The same computation as circuit gates (5 multiplications per round).
// Returns the wire carrying the digest.
std::uint32_t mimc_hash_gadget(CircuitBuilder& builder, std::span<const std::uint32_t> wires);

// Maps a digest to a field element (first 8 bytes, little-endian, reduced).
Fp fp_from_digest(const Digest& d);

}  // namespace zkmlops::zk
