#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mocg::service {

std::string sha256_hex(std::string_view bytes);

// Writes through a temporary file, fsyncs it, renames it over `path` and
// fsyncs the directory, so a crash leaves either the old or the new file.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

enum class Kind { Job, Graph, History };

// One JSON document per entity under a data directory:
//   datasets/<id>.csv   content-addressed uploads
//   jobs/job-N.json, graphs/g-N.json, history/h-N.json
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Returns "ds-" + the first 12 hex digits of the content hash. Storing the
  // same bytes twice is a no-op.
  std::string put_dataset(std::string_view csv);
  std::optional<std::string> dataset_csv(const std::string& id) const;

  // Reserves the next "<prefix>-N" id for the kind.
  std::string next_id(Kind kind);

  void put(Kind kind, const std::string& id, const nlohmann::json& doc);
  std::optional<nlohmann::json> get(Kind kind, const std::string& id) const;
  // All documents of a kind ordered by their numeric suffix.
  std::vector<nlohmann::json> list(Kind kind) const;

 private:
  std::filesystem::path dir(Kind kind) const;
  std::filesystem::path datasets_dir() const { return root_ / "datasets"; }

  std::filesystem::path root_;
  std::mutex mu_;
  std::map<Kind, std::uint64_t> counters_;
};

const char* id_prefix(Kind kind);
// Whether `id` is safe to use as a file stem (no separators or dots).
bool valid_id(std::string_view id);

}  // namespace mocg::service
