#include "zkmlops/store/artifact_store.hpp"

#include <algorithm>

#include "json.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/common/sha256.hpp"

namespace zkmlops::store {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Artifact::to_json() const {
  json j{{"id", id},
         {"kind", kind},
         {"size_bytes", size_bytes},
         {"media_hint", media_hint},
         {"created_at", format_timestamp(created_at)}};
  return j.dump();
}

Artifact Artifact::from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    Artifact a;
    a.id = j.at("id").get<std::string>();
    a.kind = j.at("kind").get<std::string>();
    a.size_bytes = j.at("size_bytes").get<std::uint64_t>();
    a.media_hint = j.at("media_hint").get<std::string>();
    a.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    return a;
  } catch (const json::exception& e) {
    throw Error(Errc::IntegrityError, std::string("bad artifact sidecar: ") + e.what());
  }
}

bool is_artifact_id(std::string_view id) {
  return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path ArtifactStore::blob_path(std::string_view id) const {
  return root_ / std::string(id.substr(0, 2)) / std::string(id.substr(2));
}

namespace {
fs::path sidecar_of(const fs::path& blob) {
  fs::path p = blob;
  p += ".json";
  return p;
}
}  // namespace

Artifact ArtifactStore::put(ByteSpan bytes, std::string_view kind, std::string_view media_hint) {
  if (bytes.empty()) throw Error(Errc::EmptyContent, "artifact content is empty");
  if (kind.empty()) throw Error(Errc::InvalidArgument, "artifact kind is empty");
  std::string id = to_hex(sha256(bytes));
  fs::path blob = blob_path(id);

  std::lock_guard lock(put_mu_);
  if (fs::exists(sidecar_of(blob)) && fs::exists(blob)) {
    Artifact existing = stat(id);
    // Heal a blob that was damaged on disk; identical bytes hash to the id.
    if (fs::file_size(blob) != bytes.size() || to_hex(sha256(read_file(blob))) != id) write_file_atomic(blob, bytes);
    return existing;
  }
  fs::create_directories(blob.parent_path());
  write_file_atomic(blob, bytes);
  Artifact a{id, std::string(kind), bytes.size(), std::string(media_hint), wall_clock_micros()};
  write_file_atomic(sidecar_of(blob), as_bytes(a.to_json()));
  return a;
}

bool ArtifactStore::contains(std::string_view id) const {
  return is_artifact_id(id) && fs::exists(sidecar_of(blob_path(id))) && fs::exists(blob_path(id));
}

Artifact ArtifactStore::stat(std::string_view id) const {
  if (!contains(id)) throw Error(Errc::UnknownArtifact, "unknown artifact " + std::string(id));
  return Artifact::from_json(to_string(read_file(sidecar_of(blob_path(id)))));
}

Bytes ArtifactStore::get(std::string_view id) const {
  if (!contains(id)) throw Error(Errc::UnknownArtifact, "unknown artifact " + std::string(id));
  Bytes data = read_file(blob_path(id));
  if (to_hex(sha256(data)) != id) throw Error(Errc::IntegrityError, "artifact " + std::string(id) + " fails its digest");
  return data;
}

std::vector<Artifact> ArtifactStore::list(std::optional<std::string_view> kind) const {
  std::vector<Artifact> out;
  for (const auto& shard : fs::directory_iterator(root_)) {
    if (!shard.is_directory() || shard.path().filename().string().size() != 2) continue;
    for (const auto& entry : fs::directory_iterator(shard.path())) {
      if (entry.path().extension() != ".json") continue;
      std::string id = shard.path().filename().string() + entry.path().stem().string();
      if (!is_artifact_id(id)) continue;
      Artifact a = stat(id);
      if (!kind || a.kind == *kind) out.push_back(std::move(a));
    }
  }
  std::sort(out.begin(), out.end(), [](const Artifact& a, const Artifact& b) { return a.id < b.id; });
  return out;
}

}  // namespace zkmlops::store
