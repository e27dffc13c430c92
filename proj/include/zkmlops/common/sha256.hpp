#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include "zkmlops/common/bytes.hpp"

namespace zkmlops {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 over OpenSSL's EVP interface. Copyable, so a running
// transcript can be forked to squeeze challenges without disturbing it.
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  ~Sha256();

  Sha256& update(ByteSpan data);
  Sha256& update(std::string_view text) { return update(as_bytes(text)); }
  Sha256& update_u32(std::uint32_t v);
  Sha256& update_u64(std::uint64_t v);

  // Finalizes a copy; this object stays usable.
  Digest digest() const;

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

Digest sha256(ByteSpan data);
inline Digest sha256(std::string_view text) { return sha256(as_bytes(text)); }

}  // namespace zkmlops
