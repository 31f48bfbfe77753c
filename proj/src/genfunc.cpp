#include "mbdos/genfunc.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>

#include "mbdos/cyclotomic.hpp"

namespace mbdos::genfunc {

std::vector<int> normalize_sectors(int L, std::vector<int> sectors) {
  if (L < 1) throw std::invalid_argument("sectors: L must be positive");
  for (int q : sectors)
    if (q < 1 || L % q != 0)
      throw std::invalid_argument("sector " + std::to_string(q) + " does not divide L=" + std::to_string(L));
  std::erase(sectors, 1);
  std::sort(sectors.rbegin(), sectors.rend());
  sectors.erase(std::unique(sectors.begin(), sectors.end()), sectors.end());
  return sectors;
}

std::vector<int> drop_top_sectors(int L, int depth) {
  if (depth < 0) throw std::invalid_argument("drop_top_sectors: negative depth");
  auto all = normalize_sectors(L, cyclo::divisors(L));
  if (static_cast<std::size_t>(depth) >= all.size()) return {};
  return {all.begin() + depth, all.end()};
}

KeyLayout::KeyLayout(int L, std::vector<int> sectors) : L_(L), sectors_(normalize_sectors(L, std::move(sectors))) {
  for (int q : sectors_) {
    offsets_.push_back(width_);
    phis_.push_back(static_cast<int>(cyclo::totient(q)));
    width_ += phis_.back();
  }
}

int KeyLayout::offset_of(int q) const {
  for (std::size_t i = 0; i < sectors_.size(); ++i)
    if (sectors_[i] == q) return offsets_[i];
  throw std::invalid_argument("sector " + std::to_string(q) + " is not part of the key layout");
}

CoefficientTable::CoefficientTable(TableParams params, std::vector<Entry> entries)
    : params_(std::move(params)), entries_(std::move(entries)) {
  params_.sectors = normalize_sectors(params_.L, params_.sectors);
  layout_ = KeyLayout(params_.L, params_.sectors);
  if (params_.level_begin < 0 || params_.level_begin > params_.level_end || params_.level_end > params_.L)
    throw std::invalid_argument("CoefficientTable: invalid level range");
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (static_cast<int>(e.key.inv.size()) != layout_.width())
      throw std::invalid_argument("CoefficientTable: key width does not match layout");
    if (e.key.particles < 0 || e.key.particles > params_.n_max)
      throw std::invalid_argument("CoefficientTable: particle count outside [0, N_max]");
    if (e.count <= 0) throw std::invalid_argument("CoefficientTable: non-positive count");
    if (i > 0 && entries_[i - 1].key == e.key) throw std::invalid_argument("CoefficientTable: duplicate key");
  }
}

CoefficientTable CoefficientTable::identity(int L, int n_max, int R, std::vector<int> sectors, int at_level) {
  TableParams p{L, n_max, R, normalize_sectors(L, std::move(sectors)), at_level, at_level};
  const KeyLayout layout(L, p.sectors);
  std::vector<Entry> e;
  e.push_back({TermKey{0, std::vector<std::int32_t>(layout.width(), 0)}, BigCount(1)});
  return CoefficientTable(std::move(p), std::move(e));
}

BigCount CoefficientTable::count(const TermKey& key) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const Entry& e, const TermKey& k) { return e.key < k; });
  if (it != entries_.end() && it->key == key) return it->count;
  return 0;
}

BigCount CoefficientTable::total(int particles) const {
  BigCount s = 0;
  for (const auto& e : entries_)
    if (e.key.particles == particles) s += e.count;
  return s;
}

std::size_t CoefficientTable::keys_with(int particles) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key.particles == particles; }));
}

bool CoefficientTable::equal_entries(const CoefficientTable& b) const {
  if (entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].key != b.entries_[i].key || entries_[i].count != b.entries_[i].count) return false;
  return true;
}

namespace {

// Working representation: [particles, inv...] -> count.
using FlatKey = std::vector<std::int32_t>;
using WorkMap = std::unordered_map<FlatKey, BigCount, boost::hash<FlatKey>>;

void check_ensemble(int L, int n_max, int R) {
  if (L < 1) throw std::invalid_argument("expand: L must be positive");
  if (n_max < 0) throw std::invalid_argument("expand: N_max must be non-negative");
  if (R < 0) throw std::invalid_argument("expand: R must be non-negative");
}

// Per-level exponent deltas for a single particle, per kept sector block.
std::vector<std::vector<std::int32_t>> level_deltas(const KeyLayout& layout, int n_max) {
  std::vector<std::vector<std::int32_t>> deltas(layout.L(), std::vector<std::int32_t>(layout.width(), 0));
  for (std::size_t s = 0; s < layout.sectors().size(); ++s) {
    const cyclo::TransferMatrix t(layout.sectors()[s]);
    for (int k = 0; k < layout.L(); ++k)
      for (int j = 0; j < t.phi(); ++j) {
        const auto v = t(k, j);
        if (v != 0 && std::abs(v) > std::numeric_limits<std::int32_t>::max() / std::max(1, n_max))
          throw std::overflow_error("expand: invariant range exceeds 32-bit keys");
        deltas[k][layout.offsets()[s] + j] = static_cast<std::int32_t>(v);
      }
  }
  return deltas;
}

WorkMap to_work(const CoefficientTable& t) {
  WorkMap m;
  m.reserve(t.size());
  for (const auto& e : t.entries()) {
    FlatKey k;
    k.reserve(e.key.inv.size() + 1);
    k.push_back(e.key.particles);
    k.insert(k.end(), e.key.inv.begin(), e.key.inv.end());
    m.emplace(std::move(k), e.count);
  }
  return m;
}

CoefficientTable from_work(TableParams params, WorkMap&& m) {
  std::vector<Entry> entries;
  entries.reserve(m.size());
  for (auto it = m.begin(); it != m.end();) {
    auto node = m.extract(it++);
    auto& k = node.key();
    entries.push_back({TermKey{k[0], FlatKey(k.begin() + 1, k.end())}, std::move(node.mapped())});
  }
  return CoefficientTable(std::move(params), std::move(entries));
}

void multiply_bracket(WorkMap& cur, const std::vector<std::int32_t>& delta, int R, int n_max, ExpandStats* stats) {
  WorkMap next;
  next.reserve(cur.size() * 2);
  FlatKey nk;
  for (const auto& [key, cnt] : cur) {
    const int room = std::min(R, n_max - key[0]);
    nk = key;
    for (int n = 0; n <= room; ++n) {
      if (n > 0) {
        nk[0] += 1;
        for (std::size_t j = 0; j < delta.size(); ++j) nk[j + 1] += delta[j];
      }
      auto [it, inserted] = next.try_emplace(nk);
      if (inserted)
        it->second = cnt;
      else
        it->second += cnt;
    }
    if (stats) stats->term_products += static_cast<std::uint64_t>(std::max(room, -1) + 1);
  }
  cur = std::move(next);
  if (stats) stats->peak_keys = std::max<std::uint64_t>(stats->peak_keys, cur.size());
}

}  // namespace

CoefficientTable extend(const CoefficientTable& partial, int level_end, const ExpandOptions& opts) {
  const auto& p = partial.params();
  if (level_end < p.level_end || level_end > p.L)
    throw std::invalid_argument("extend: target level " + std::to_string(level_end) + " outside [" +
                                std::to_string(p.level_end) + ", " + std::to_string(p.L) + "]");
  const auto deltas = level_deltas(partial.layout(), p.n_max);
  WorkMap cur = to_work(partial);
  CoefficientTable result = partial;
  for (int k = p.level_end; k < level_end; ++k) {
    multiply_bracket(cur, deltas[k], p.R, p.n_max, opts.stats);
    if (opts.on_level || k + 1 == level_end) {
      TableParams np = p;
      np.level_end = k + 1;
      if (k + 1 == level_end) {
        result = from_work(std::move(np), std::move(cur));
        if (opts.on_level) opts.on_level(result);
      } else {
        WorkMap copy = cur;
        opts.on_level(from_work(std::move(np), std::move(copy)));
      }
    }
  }
  return result;
}

CoefficientTable expand_levels(int L, int n_max, int R, const std::vector<int>& sectors, int level_begin,
                               int level_end, const ExpandOptions& opts) {
  check_ensemble(L, n_max, R);
  if (level_begin < 0 || level_begin > level_end || level_end > L)
    throw std::invalid_argument("expand: invalid level range");
  return extend(CoefficientTable::identity(L, n_max, R, sectors, level_begin), level_end, opts);
}

CoefficientTable expand(int L, int n_max, int R, const std::vector<int>& sectors, const ExpandOptions& opts) {
  return expand_levels(L, n_max, R, sectors, 0, L, opts);
}

CoefficientTable merge(const CoefficientTable& a, const CoefficientTable& b) {
  const auto& pa = a.params();
  const auto& pb = b.params();
  if (pa.L != pb.L || pa.R != pb.R || pa.n_max != pb.n_max || pa.sectors != pb.sectors)
    throw std::invalid_argument("merge: tables have different (L, R, N_max, sectors)");
  const bool a_empty = pa.level_begin == pa.level_end;
  const bool b_empty = pb.level_begin == pb.level_end;
  TableParams out = pa;
  if (a_empty) {
    out.level_begin = pb.level_begin;
    out.level_end = pb.level_end;
  } else if (!b_empty) {
    if (pa.level_end == pb.level_begin) {
      out.level_end = pb.level_end;
    } else if (pb.level_end == pa.level_begin) {
      out.level_begin = pb.level_begin;
    } else {
      throw std::invalid_argument("merge: level ranges are not adjacent");
    }
  }
  WorkMap m;
  FlatKey k;
  const int width = a.layout().width();
  for (const auto& ea : a.entries())
    for (const auto& eb : b.entries()) {
      const int particles = ea.key.particles + eb.key.particles;
      if (particles > pa.n_max) continue;
      k.assign(width + 1, 0);
      k[0] = particles;
      for (int j = 0; j < width; ++j) k[j + 1] = ea.key.inv[j] + eb.key.inv[j];
      m[k] += ea.count * eb.count;
    }
  return from_work(std::move(out), std::move(m));
}

CoefficientTable expand_chunked(int L, int n_max, int R, const std::vector<int>& sectors, int chunks) {
  check_ensemble(L, n_max, R);
  chunks = std::clamp(chunks, 1, L);
  std::vector<std::future<CoefficientTable>> parts;
  for (int c = 0; c < chunks; ++c) {
    const int b = L * c / chunks;
    const int e = L * (c + 1) / chunks;
    parts.push_back(std::async(std::launch::async, [=] { return expand_levels(L, n_max, R, sectors, b, e); }));
  }
  CoefficientTable acc = parts.front().get();
  for (std::size_t c = 1; c < parts.size(); ++c) acc = merge(acc, parts[c].get());
  return acc;
}

BigCount term_count_bound(int L, int R, const std::vector<int>& sectors) {
  const KeyLayout layout(L, sectors);
  BigCount base = static_cast<long long>(layout.width()) * (R + 1);
  return boost::multiprecision::pow(base, static_cast<unsigned>(L));
}

CoefficientTable project(const CoefficientTable& table, const std::vector<int>& keep) {
  const auto kept = normalize_sectors(table.params().L, keep);
  std::vector<int> cols;
  for (int q : kept) {
    const int off = table.layout().offset_of(q);
    for (int j = 0; j < static_cast<int>(cyclo::totient(q)); ++j) cols.push_back(off + j);
  }
  WorkMap m;
  FlatKey k;
  for (const auto& e : table.entries()) {
    k.assign(1, e.key.particles);
    for (int c : cols) k.push_back(e.key.inv[c]);
    m[k] += e.count;
  }
  TableParams p = table.params();
  p.sectors = kept;
  return from_work(std::move(p), std::move(m));
}

}  // namespace mbdos::genfunc
