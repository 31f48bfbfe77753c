#include "mbdos/cache.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mbdos/table_io.hpp"

namespace mbdos::cache {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::uint32_t kJsonVersion = 1;
constexpr int kManifestVersion = 1;

std::int64_t wall_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

bool same_family(const json& params, const genfunc::TableParams& p) {
  return params.value("L", -1) == p.L && params.value("n_max", -1) == p.n_max && params.value("R", -1) == p.R &&
         params.value("sectors", std::vector<int>{-1}) == p.sectors && params.value("level_begin", -1) == 0;
}
}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::SectorFlow: return "sector-flow";
    case Kind::TMatrix: return "tmatrix";
    case Kind::CoeffTable: return "coeff-table";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "sector-flow") return Kind::SectorFlow;
  if (s == "tmatrix") return Kind::TMatrix;
  if (s == "coeff-table") return Kind::CoeffTable;
  throw CacheCorruption("manifest: unknown entry kind '" + s + "'");
}

json table_params_json(const genfunc::TableParams& p) {
  return {{"L", p.L},           {"n_max", p.n_max},         {"R", p.R},
          {"sectors", p.sectors}, {"level_begin", p.level_begin}, {"level_end", p.level_end}};
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  load_manifest();
}

fs::path Cache::default_dir() {
  if (const char* env = std::getenv("MBDOS_CACHE_DIR"); env && *env) return env;
  return ".mbdos-cache";
}

std::string Cache::make_key(Kind kind, const json& params) {
  const std::string text = params.dump();
  const std::string rev(text.rbegin(), text.rend());
  const auto a = to_bytes(text);
  const auto b = to_bytes(rev);
  return to_string(kind) + "-" + hex32(table_io::crc32(a)) + hex32(table_io::crc32(b));
}

void Cache::load_manifest() {
  entries_.clear();
  const fs::path path = dir_ / "manifest.json";
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  json j;
  try {
    in >> j;
    if (j.at("version").get<int>() != kManifestVersion)
      throw CacheCorruption("manifest version " + j.at("version").dump() + " is not supported");
    for (const auto& [key, v] : j.at("entries").items()) {
      ManifestEntry e;
      e.key = key;
      e.kind = kind_from_string(v.at("kind").get<std::string>());
      e.params = v.at("params");
      e.file = v.at("file").get<std::string>();
      e.checksum = v.at("checksum").get<std::uint32_t>();
      e.version = v.at("version").get<std::uint32_t>();
      e.size = v.at("size").get<std::uint64_t>();
      e.last_used = v.at("last_used").get<std::int64_t>();
      e.pinned = v.at("pinned").get<bool>();
      entries_.emplace(key, std::move(e));
    }
  } catch (const json::exception& ex) {
    throw CacheCorruption("manifest " + path.string() + " is unreadable: " + ex.what());
  }
}

void Cache::save_manifest() const {
  json entries = json::object();
  for (const auto& [key, e] : entries_)
    entries[key] = {{"kind", to_string(e.kind)}, {"params", e.params},      {"file", e.file},
                    {"checksum", e.checksum},    {"version", e.version},    {"size", e.size},
                    {"last_used", e.last_used},  {"pinned", e.pinned}};
  const json j = {{"version", kManifestVersion}, {"entries", entries}};
  table_io::write_bytes((dir_ / "manifest.json").string(), to_bytes(j.dump(2) + "\n"));
}

void Cache::touch(ManifestEntry& e) {
  e.last_used = wall_now();
  save_manifest();
}

void Cache::quarantine(const std::string& key, const std::string& why) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  const fs::path src = dir_ / it->second.file;
  if (fs::exists(src)) {
    fs::create_directories(dir_ / "quarantine");
    fs::rename(src, dir_ / "quarantine" / it->second.file);
  }
  entries_.erase(it);
  ++stats_.quarantined;
  stats_.warnings.push_back("quarantined " + key + ": " + why);
  save_manifest();
}

void Cache::remove_entry(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  std::error_code ec;
  fs::remove(dir_ / it->second.file, ec);
  entries_.erase(it);
}

std::optional<std::vector<std::uint8_t>> Cache::checked_bytes(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  const auto& e = it->second;
  const std::uint32_t want = e.kind == Kind::CoeffTable ? table_io::kFormatVersion : kJsonVersion;
  if (e.version != want) {
    quarantine(key, "version " + std::to_string(e.version) + " does not match " + std::to_string(want));
    return std::nullopt;
  }
  const fs::path path = dir_ / e.file;
  if (!fs::exists(path)) {
    quarantine(key, "file missing");
    return std::nullopt;
  }
  auto bytes = table_io::read_bytes(path.string());
  if (bytes.size() != e.size || table_io::crc32(bytes) != e.checksum) {
    quarantine(key, "checksum mismatch");
    return std::nullopt;
  }
  return bytes;
}

void Cache::store_bytes(Kind kind, const json& params, const std::vector<std::uint8_t>& bytes, const std::string& ext,
                        std::uint32_t version) {
  const std::string key = make_key(kind, params);
  ManifestEntry e;
  e.key = key;
  e.kind = kind;
  e.params = params;
  e.file = key + ext;
  e.checksum = table_io::crc32(bytes);
  e.version = version;
  e.size = bytes.size();
  e.last_used = wall_now();
  if (auto it = entries_.find(key); it != entries_.end()) e.pinned = it->second.pinned;
  table_io::write_bytes((dir_ / e.file).string(), bytes);
  entries_[key] = std::move(e);
  save_manifest();
}

std::optional<genfunc::CoefficientTable> Cache::load_table(const genfunc::TableParams& p) {
  const json params = table_params_json(p);
  const std::string key = make_key(Kind::CoeffTable, params);
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.params != params) return std::nullopt;
  auto bytes = checked_bytes(key);
  if (!bytes) return std::nullopt;
  try {
    auto t = table_io::decode(*bytes);
    if (!(t.params() == p)) {
      quarantine(key, "stored parameters differ from manifest");
      return std::nullopt;
    }
    touch(entries_.at(key));
    return t;
  } catch (const table_io::VersionMismatch& ex) {
    quarantine(key, ex.what());
  } catch (const table_io::CorruptTable& ex) {
    quarantine(key, ex.what());
  }
  return std::nullopt;
}

void Cache::store_table(const genfunc::CoefficientTable& t) {
  store_bytes(Kind::CoeffTable, table_params_json(t.params()), table_io::encode(t), ".tbl", table_io::kFormatVersion);
}

std::optional<json> Cache::load_json(Kind kind, const json& params) {
  const std::string key = make_key(kind, params);
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.params != params) return std::nullopt;
  auto bytes = checked_bytes(key);
  if (!bytes) return std::nullopt;
  try {
    json j = json::parse(bytes->begin(), bytes->end());
    touch(entries_.at(key));
    return j;
  } catch (const json::exception& ex) {
    quarantine(key, ex.what());
  }
  return std::nullopt;
}

void Cache::store_json(Kind kind, const json& params, const json& payload) {
  store_bytes(kind, params, to_bytes(payload.dump() + "\n"), ".json", kJsonVersion);
}

genfunc::CoefficientTable Cache::expand(const ExpandRequest& req) {
  const auto S = genfunc::normalize_sectors(req.L, req.sectors);
  const int target = (req.stop_after >= 0 && req.stop_after < req.L) ? req.stop_after : req.L;
  const genfunc::TableParams want{req.L, req.n_max, req.R, S, 0, target};
  if (auto hit = load_table(want)) {
    ++stats_.hits;
    return *hit;
  }
  ++stats_.misses;

  // Largest usable checkpoint below the target.
  std::optional<genfunc::CoefficientTable> start;
  std::vector<std::pair<int, genfunc::TableParams>> candidates;
  for (const auto& [key, e] : entries_)
    if (e.kind == Kind::CoeffTable && same_family(e.params, want)) {
      const int end = e.params.value("level_end", -1);
      if (end > 0 && end < target) candidates.push_back({end, {req.L, req.n_max, req.R, S, 0, end}});
    }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [end, p] : candidates)
    if ((start = load_table(p))) {
      stats_.resumed_from = end;
      break;
    }

  genfunc::CoefficientTable result;
  if (!start && req.threads > 1 && target == req.L) {
    result = genfunc::expand_chunked(req.L, req.n_max, req.R, S, req.threads);
    stats_.expansions += static_cast<std::uint64_t>(req.L);
  } else {
    const auto base = start ? *start : genfunc::CoefficientTable::identity(req.L, req.n_max, req.R, S, 0);
    genfunc::ExpandOptions opts;
    opts.on_level = [&](const genfunc::CoefficientTable& t) {
      ++stats_.expansions;
      const int lvl = t.params().level_end;
      if (req.checkpoint_every > 0 && lvl < target && lvl % req.checkpoint_every == 0) {
        store_table(t);
        ++stats_.checkpoints;
      }
    };
    result = genfunc::extend(base, target, opts);
  }
  store_table(result);

  if (target == req.L) {
    std::vector<std::string> stale;
    for (const auto& [key, e] : entries_)
      if (e.kind == Kind::CoeffTable && !e.pinned && same_family(e.params, want) &&
          e.params.value("level_end", -1) < req.L)
        stale.push_back(key);
    for (const auto& k : stale) remove_entry(k);
    if (!stale.empty()) save_manifest();
  }
  return result;
}

std::vector<std::string> Cache::verify() {
  std::vector<std::string> keys;
  for (const auto& [key, e] : entries_) keys.push_back(key);
  std::vector<std::string> bad;
  for (const auto& key : keys) {
    const auto kind = entries_.at(key).kind;
    auto bytes = checked_bytes(key);
    if (!bytes) {
      bad.push_back(key);
      continue;
    }
    if (kind == Kind::CoeffTable) {
      try {
        (void)table_io::decode(*bytes);
      } catch (const std::exception& ex) {
        quarantine(key, ex.what());
        bad.push_back(key);
      }
    }
  }
  return bad;
}

std::uint64_t Cache::total_bytes() const {
  std::uint64_t s = 0;
  for (const auto& [key, e] : entries_) s += e.size;
  return s;
}

GcReport Cache::gc(const KeepPolicy& policy) {
  GcReport r;
  r.bytes_before = total_bytes();
  r.quarantined = verify();
  const std::int64_t now = policy.now != 0 ? policy.now : wall_now();
  if (policy.max_age_seconds) {
    std::vector<std::string> old;
    for (const auto& [key, e] : entries_)
      if (!e.pinned && now - e.last_used > *policy.max_age_seconds) old.push_back(key);
    for (const auto& k : old) {
      remove_entry(k);
      r.removed.push_back(k);
    }
  }
  if (policy.max_total_bytes) {
    std::vector<const ManifestEntry*> lru;
    for (const auto& [key, e] : entries_)
      if (!e.pinned) lru.push_back(&e);
    std::sort(lru.begin(), lru.end(), [](const ManifestEntry* a, const ManifestEntry* b) {
      return a->last_used != b->last_used ? a->last_used < b->last_used : a->key < b->key;
    });
    std::uint64_t total = total_bytes();
    std::vector<std::string> drop;
    for (const auto* e : lru) {
      if (total <= *policy.max_total_bytes) break;
      total -= e->size;
      drop.push_back(e->key);
    }
    for (const auto& k : drop) {
      remove_entry(k);
      r.removed.push_back(k);
    }
  }
  if (!r.removed.empty()) save_manifest();
  r.bytes_after = total_bytes();
  return r;
}

void Cache::pin(const std::string& key, bool pinned) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("cache: no entry " + key);
  it->second.pinned = pinned;
  save_manifest();
}

}  // namespace mbdos::cache
