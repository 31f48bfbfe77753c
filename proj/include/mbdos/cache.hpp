#pragma once

// Content-addressed on-disk cache for universal data (sector flows,
// transfer matrices, coefficient tables) with per-level checkpoints.
//
// DIR/manifest.json maps a key (kind + hash of canonical params) to
// {kind, params, file, checksum, version, size, last_used, pinned}.
// Files whose checksum or version does not match are moved to
// DIR/quarantine and recomputed, never migrated.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbdos/genfunc.hpp"

namespace mbdos::cache {

/// The manifest itself is unreadable.
class CacheCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { SectorFlow, TMatrix, CoeffTable };
std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

struct ManifestEntry {
  std::string key;
  Kind kind = Kind::CoeffTable;
  nlohmann::json params;
  std::string file;  // relative to the cache dir
  std::uint32_t checksum = 0;
  std::uint32_t version = 0;
  std::uint64_t size = 0;
  std::int64_t last_used = 0;  // unix seconds
  bool pinned = false;
};

struct Stats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t expansions = 0;   // levels multiplied in by this cache
  std::uint64_t checkpoints = 0;  // checkpoint files written
  std::uint64_t quarantined = 0;
  int resumed_from = -1;          // level_end of the checkpoint resumed, -1 if none
  std::vector<std::string> warnings;
};

struct KeepPolicy {
  std::optional<std::int64_t> max_age_seconds;
  std::optional<std::uint64_t> max_total_bytes;
  std::int64_t now = 0;  // 0: wall clock
};

struct GcReport {
  std::vector<std::string> removed;
  std::vector<std::string> quarantined;
  std::uint64_t bytes_before = 0;
  std::uint64_t bytes_after = 0;
};

struct ExpandRequest {
  int L = 1;
  int n_max = 0;
  int R = 1;
  std::vector<int> sectors;
  int checkpoint_every = 1;  // levels between checkpoints; 0 disables
  int stop_after = -1;       // stop once this many levels are in (simulated interruption)
  int threads = 1;           // >1: chunked expansion, no checkpoints
};

/// Parameters of a table as stored in the manifest.
nlohmann::json table_params_json(const genfunc::TableParams& p);

class Cache {
 public:
  /// Opens (or creates) a cache directory.
  explicit Cache(std::filesystem::path dir);

  /// MBDOS_CACHE_DIR if set, else ./.mbdos-cache.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }
  const std::map<std::string, ManifestEntry>& entries() const { return entries_; }
  Stats& stats() { return stats_; }
  const Stats& stats() const { return stats_; }

  static std::string make_key(Kind kind, const nlohmann::json& params);

  std::optional<genfunc::CoefficientTable> load_table(const genfunc::TableParams& p);
  void store_table(const genfunc::CoefficientTable& t);

  std::optional<nlohmann::json> load_json(Kind kind, const nlohmann::json& params);
  void store_json(Kind kind, const nlohmann::json& params, const nlohmann::json& payload);

  /// Full table, from cache, from the largest usable checkpoint, or cold.
  /// With stop_after set, returns the partial table after that many levels.
  genfunc::CoefficientTable expand(const ExpandRequest& req);

  /// Recomputes checksums of every entry; bad ones are quarantined. Returns their keys.
  std::vector<std::string> verify();
  GcReport gc(const KeepPolicy& policy);
  void pin(const std::string& key, bool pinned = true);
  std::uint64_t total_bytes() const;

 private:
  void load_manifest();
  void save_manifest() const;
  void quarantine(const std::string& key, const std::string& why);
  void remove_entry(const std::string& key);
  void touch(ManifestEntry& e);
  std::optional<std::vector<std::uint8_t>> checked_bytes(const std::string& key);
  void store_bytes(Kind kind, const nlohmann::json& params, const std::vector<std::uint8_t>& bytes,
                   const std::string& ext, std::uint32_t version);

  std::filesystem::path dir_;
  std::map<std::string, ManifestEntry> entries_;
  Stats stats_;
};

}  // namespace mbdos::cache
