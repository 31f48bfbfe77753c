#pragma once

// Truncated expansion of the all-sector generating function
//
//   G'(X, {Y}) = prod_k  sum_{n=0}^{R}  X^n  prod_{q in S, j} Y_{q,j}^(n T_q[k mod q][j])
//
// into a sparse table mapping (particle count, invariant vector) to the
// number of occupation vectors carrying those invariants.

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

#include "mbdos/types.hpp"

namespace mbdos::genfunc {

/// Validates S against L, drops the trivial sector 1, dedupes and sorts descending.
std::vector<int> normalize_sectors(int L, std::vector<int> sectors);

/// Sectors left after discarding the `depth` largest nontrivial ones.
std::vector<int> drop_top_sectors(int L, int depth);

/// Block layout of a key: one block of phi(q) coordinates per kept sector.
class KeyLayout {
 public:
  KeyLayout() = default;
  KeyLayout(int L, std::vector<int> sectors);

  int L() const { return L_; }
  const std::vector<int>& sectors() const { return sectors_; }
  const std::vector<int>& phis() const { return phis_; }
  const std::vector<int>& offsets() const { return offsets_; }
  int width() const { return width_; }
  /// Offset of sector q's block; throws when q is not kept.
  int offset_of(int q) const;

  friend bool operator==(const KeyLayout&, const KeyLayout&) = default;

 private:
  int L_ = 1;
  std::vector<int> sectors_;
  std::vector<int> phis_;
  std::vector<int> offsets_;
  int width_ = 0;
};

struct TermKey {
  int particles = 0;
  std::vector<std::int32_t> inv;

  friend auto operator<=>(const TermKey&, const TermKey&) = default;
  friend bool operator==(const TermKey&, const TermKey&) = default;
};

struct TableParams {
  int L = 1;
  int n_max = 0;
  int R = 1;
  std::vector<int> sectors;  // normalized: descending, no 1
  int level_begin = 0;
  int level_end = 0;  // levels [level_begin, level_end) are multiplied in

  bool complete() const { return level_begin == 0 && level_end == L; }
  friend bool operator==(const TableParams&, const TableParams&) = default;
};

struct Entry {
  TermKey key;
  BigCount count;
};

class CoefficientTable {
 public:
  CoefficientTable() = default;
  /// Entries are sorted by key; duplicate keys are rejected.
  CoefficientTable(TableParams params, std::vector<Entry> entries);

  /// The empty product {key(0, 0) -> 1} over an empty level range.
  static CoefficientTable identity(int L, int n_max, int R, std::vector<int> sectors, int at_level = 0);

  const TableParams& params() const { return params_; }
  const KeyLayout& layout() const { return layout_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Count at key, zero if absent.
  BigCount count(const TermKey& key) const;
  /// Sum of counts over keys with the given particle number.
  BigCount total(int particles) const;
  /// Number of keys with the given particle number.
  std::size_t keys_with(int particles) const;

  friend bool operator==(const CoefficientTable& a, const CoefficientTable& b) {
    return a.params_ == b.params_ && a.equal_entries(b);
  }

 private:
  bool equal_entries(const CoefficientTable& b) const;

  TableParams params_;
  KeyLayout layout_;
  std::vector<Entry> entries_;
};

struct ExpandStats {
  std::uint64_t term_products = 0;  // (key, occupancy) pairs multiplied in
  std::uint64_t peak_keys = 0;
};

struct ExpandOptions {
  /// Called with the partial table after each bracket (checkpoint hook).
  std::function<void(const CoefficientTable&)> on_level;
  ExpandStats* stats = nullptr;
};

/// Expansion over levels [level_begin, level_end).
CoefficientTable expand_levels(int L, int n_max, int R, const std::vector<int>& sectors, int level_begin,
                               int level_end, const ExpandOptions& opts = {});

/// Full expansion over all L levels.
CoefficientTable expand(int L, int n_max, int R, const std::vector<int>& sectors, const ExpandOptions& opts = {});

/// Continues a partial table [b, e) through levels [e, level_end).
CoefficientTable extend(const CoefficientTable& partial, int level_end, const ExpandOptions& opts = {});

/// Product of two partial expansions over adjacent level ranges.
CoefficientTable merge(const CoefficientTable& a, const CoefficientTable& b);

/// Splits the levels into `chunks` ranges, expands them on separate threads and merges.
CoefficientTable expand_chunked(int L, int n_max, int R, const std::vector<int>& sectors, int chunks);

/// [(sum_{q in S} phi(q)) * (R + 1)]^L.
BigCount term_count_bound(int L, int R, const std::vector<int>& sectors);

/// Re-aggregates a table onto a subset of its sectors by deleting blocks.
CoefficientTable project(const CoefficientTable& table, const std::vector<int>& keep);

}  // namespace mbdos::genfunc
