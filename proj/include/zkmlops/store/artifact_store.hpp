#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/common/clock.hpp"

namespace zkmlops::store {

struct Artifact {
  std::string id;  // hex SHA-256 of the content
  std::string kind;
  std::uint64_t size_bytes = 0;
  std::string media_hint;
  Timestamp created_at = 0;

  std::string to_json() const;
  static Artifact from_json(std::string_view text);

  friend bool operator==(const Artifact&, const Artifact&) = default;
};

// Content-addressed blobs under <root>/ab/cdef... with a JSON sidecar
// (<blob>.json) per blob. Blobs are written to a temp file and renamed, so
// readers never observe partial content.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  // Idempotent on identical bytes: the first put's metadata is kept.
  // Throws EmptyContent.
  Artifact put(ByteSpan bytes, std::string_view kind, std::string_view media_hint = "application/octet-stream");
  // Re-hashes the blob; throws UnknownArtifact or IntegrityError.
  Bytes get(std::string_view id) const;
  Artifact stat(std::string_view id) const;
  bool contains(std::string_view id) const;
  // Sorted by id.
  std::vector<Artifact> list(std::optional<std::string_view> kind = std::nullopt) const;

  std::filesystem::path blob_path(std::string_view id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex put_mu_;
};

bool is_artifact_id(std::string_view id);

}  // namespace zkmlops::store
