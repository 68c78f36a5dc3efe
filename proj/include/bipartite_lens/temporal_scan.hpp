#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bipartite_lens/clustering.hpp"
#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"
#include "bipartite_lens/ingest.hpp"

namespace bipartite_lens {

/// Inclusive calendar-year window.
struct WindowSpec {
  int start_year = 0;
  int end_year = 0;

  bool contains(int year) const noexcept { return start_year <= year && year <= end_year; }
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

namespace detail {

inline void check_window(const TimedEdgeStore& store, const WindowSpec& w) {
  auto range = store.year_range();
  if (!range) throw WindowOutOfRange("store is empty");
  if (w.start_year > w.end_year || w.start_year < range->first || w.end_year > range->second)
    throw WindowOutOfRange("window [" + std::to_string(w.start_year) + ", " + std::to_string(w.end_year) +
                           "] outside data range [" + std::to_string(range->first) + ", " +
                           std::to_string(range->second) + "]");
}

inline bool any_year_in(std::span<const int> years, const WindowSpec& w) {
  auto it = std::lower_bound(years.begin(), years.end(), w.start_year);
  return it != years.end() && *it <= w.end_year;
}

}  // namespace detail

/// (firm_id, org_id) pairs with at least one project starting inside the
/// window, ascending. Throws WindowOutOfRange.
inline std::vector<std::pair<std::string, std::string>> window_edges(const TimedEdgeStore& store,
                                                                     const WindowSpec& w) {
  detail::check_window(store, w);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t p = 0; p < store.pairs().size(); ++p)
    if (detail::any_year_in(store.pair_years(p), w)) {
      auto pr = store.pairs()[p];
      out.emplace_back(store.firm_ids()[pr.firm], store.org_ids()[pr.org]);
    }
  return out;
}

/// Graph of the window's edges over the store's full node universe.
inline BipartiteGraph window_graph(const TimedEdgeStore& store, const WindowSpec& w) {
  detail::check_window(store, w);
  GraphBuilder b;
  for (const auto& id : store.firm_ids()) b.add_node(firm(id));
  for (const auto& id : store.org_ids()) b.add_node(org(id));
  for (std::size_t p = 0; p < store.pairs().size(); ++p)
    if (detail::any_year_in(store.pair_years(p), w)) {
      auto pr = store.pairs()[p];
      b.add_edge(store.firm_ids()[pr.firm], store.org_ids()[pr.org]);
    }
  return b.build();
}

/// Square and 3-path counts maintained under edge insertion.
///
/// The mode with fewer nodes is the "hub" side. For every pair of hubs we
/// keep the number of leaves adjacent to both, and for every hub the sum of
/// its leaf neighbors' degrees. Inserting leaf-hub edge (l, h) with prior
/// degrees dl, dh then adds
///   dl*dh                                 3-paths with (l,h) in the middle,
///   sum_{h' in N(l)} (deg h' - 1)         3-paths ending h-l-h'-x,
///   degsum(h) - dh                        3-paths ending l-h-l'-x,
///   sum_{h' in N(l)} common(h, h')        squares through (l,h),
/// so each insertion costs O(deg l) and never walks a hub's neighborhood.
class IncrementalCensus {
public:
  IncrementalCensus(std::size_t n_firms, std::size_t n_orgs)
      : hub_mode_(n_orgs <= n_firms ? Mode::ResearchOrg : Mode::Firm),
        leaf_adj_(hub_mode_ == Mode::ResearchOrg ? n_firms : n_orgs),
        leaf_deg_(leaf_adj_.size(), 0),
        hub_deg_(hub_mode_ == Mode::ResearchOrg ? n_orgs : n_firms, 0),
        hub_degsum_(hub_deg_.size(), 0),
        dense_(hub_deg_.size() <= kDenseHubLimit) {
    if (dense_) common_dense_.assign(hub_deg_.size() * hub_deg_.size(), 0);
  }

  /// Adds {firm, org}. The edge must not already be present.
  void insert(NodeIndex firm_index, NodeIndex org_index) {
    const bool org_hub = hub_mode_ == Mode::ResearchOrg;
    const NodeIndex l = org_hub ? firm_index : org_index;
    const NodeIndex h = org_hub ? org_index : firm_index;
    auto& nl = leaf_adj_[l];
    const std::uint64_t dl = leaf_deg_[l];
    const std::uint64_t dh = hub_deg_[h];

    std::uint64_t path_gain = checked::add(checked::mul(dl, dh), hub_degsum_[h] - dh);
    std::uint64_t square_gain = 0;
    for (NodeIndex other : nl) {
      path_gain = checked::add(path_gain, hub_deg_[other] - 1);
      square_gain = checked::add(square_gain, bump_common(h, other));
      ++hub_degsum_[other];
    }
    paths_ = checked::add(paths_, path_gain);
    squares_ = checked::add(squares_, square_gain);

    hub_degsum_[h] += dl + 1;
    ++leaf_deg_[l];
    ++hub_deg_[h];
    nl.push_back(h);
    ++edges_;
  }

  ClusteringCensus census() const { return ClusteringCensus::from_counts(squares_, paths_); }
  std::uint64_t edge_count() const noexcept { return edges_; }

private:
  static constexpr std::size_t kDenseHubLimit = 2048;

  // Returns common(a, b) before incrementing it.
  std::uint64_t bump_common(NodeIndex a, NodeIndex b) {
    if (dense_) {
      const std::size_t n = hub_deg_.size();
      const std::uint32_t before = common_dense_[a * n + b]++;
      ++common_dense_[b * n + a];
      return before;
    }
    const auto key = a < b ? (std::uint64_t{a} << 32 | b) : (std::uint64_t{b} << 32 | a);
    return common_sparse_[key]++;
  }

  Mode hub_mode_;
  std::vector<std::vector<NodeIndex>> leaf_adj_;
  std::vector<std::uint32_t> leaf_deg_;
  std::vector<std::uint32_t> hub_deg_;
  std::vector<std::uint64_t> hub_degsum_;
  bool dense_;
  std::vector<std::uint32_t> common_dense_;
  std::unordered_map<std::uint64_t, std::uint32_t> common_sparse_;
  std::uint64_t squares_ = 0;
  std::uint64_t paths_ = 0;
  std::uint64_t edges_ = 0;
};

struct WindowCell {
  WindowSpec window;
  ClusteringCensus census;
  std::uint64_t edge_count = 0;
  /// Display-masked: counts are real but the coefficient is suppressed.
  bool masked = false;

  friend bool operator==(const WindowCell&, const WindowCell&) = default;
};

namespace detail {

/// Grows the window [start_year, e] one calendar year at a time and records a
/// cell at each requested end year. end_years must be ascending and >= start.
inline std::vector<WindowCell> scan_row(const TimedEdgeStore& store, int start_year,
                                        std::span<const int> end_years) {
  std::vector<WindowCell> row;
  if (end_years.empty()) return row;
  IncrementalCensus state(store.firm_ids().size(), store.org_ids().size());
  std::vector<char> present(store.pairs().size(), 0);
  const auto& index = store.year_index();
  auto next = index.lower_bound(start_year);

  row.reserve(end_years.size());
  for (int end : end_years) {
    for (; next != index.end() && next->first <= end; ++next)
      for (std::uint32_t p : next->second) {
        if (present[p]) continue;
        present[p] = 1;
        const auto pr = store.pairs()[p];
        state.insert(pr.firm, pr.org);
      }
    row.push_back({{start_year, end}, state.census(), state.edge_count(), false});
  }
  return row;
}

inline void check_row_args(const TimedEdgeStore& store, int start_year, std::span<const int> end_years) {
  if (end_years.empty()) return;
  if (!std::is_sorted(end_years.begin(), end_years.end())) throw Error("end years must be ascending");
  check_window(store, {start_year, end_years.front()});
  check_window(store, {start_year, end_years.back()});
}

}  // namespace detail

/// Censuses of windows [start_year, e] for each e in end_years, computed by
/// a single insert-only sweep.
inline std::vector<ClusteringCensus> incremental_row_scan(const TimedEdgeStore& store, int start_year,
                                                          std::span<const int> end_years) {
  detail::check_row_args(store, start_year, end_years);
  std::vector<ClusteringCensus> out;
  for (auto& cell : detail::scan_row(store, start_year, end_years)) out.push_back(cell.census);
  return out;
}

struct ScanOptions {
  /// Drop projects starting in this year and remove it from both axes.
  std::optional<int> exclude_year;
  /// With exclude_year: keep all data, only suppress coefficients of windows
  /// containing the year.
  bool mask_only = false;
  /// Worker threads for rows; 0 means hardware concurrency.
  unsigned jobs = 0;
};

/// Upper-triangular grid of window censuses, cells ordered by (start, end).
class WindowMatrix {
public:
  WindowMatrix() = default;
  WindowMatrix(std::vector<int> years, std::vector<WindowCell> cells, std::optional<int> excluded, bool mask_only)
      : years_(std::move(years)), cells_(std::move(cells)), excluded_(excluded), mask_only_(mask_only) {}

  std::span<const int> years() const noexcept { return years_; }
  std::span<const WindowCell> cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::optional<int> excluded_year() const noexcept { return excluded_; }
  bool mask_only() const noexcept { return mask_only_; }

  /// Throws WindowOutOfRange when either year is off the axis or start > end.
  const WindowCell& at(int start_year, int end_year) const {
    auto s = std::lower_bound(years_.begin(), years_.end(), start_year);
    auto e = std::lower_bound(years_.begin(), years_.end(), end_year);
    if (s == years_.end() || *s != start_year || e == years_.end() || *e != end_year || start_year > end_year)
      throw WindowOutOfRange("no cell for window [" + std::to_string(start_year) + ", " +
                             std::to_string(end_year) + "]");
    const std::size_t n = years_.size();
    const std::size_t i = static_cast<std::size_t>(s - years_.begin());
    const std::size_t j = static_cast<std::size_t>(e - years_.begin());
    // rows before i hold n + (n-1) + ... + (n-i+1) cells
    return cells_[i * n - i * (i - 1) / 2 + (j - i)];
  }

  friend bool operator==(const WindowMatrix&, const WindowMatrix&) = default;

private:
  std::vector<int> years_;
  std::vector<WindowCell> cells_;
  std::optional<int> excluded_;
  bool mask_only_ = false;
};

/// Census of every window [s, e], s <= e, over the store's calendar years.
/// Rows (fixed start year) are independent and run on up to `jobs` threads;
/// the result does not depend on the thread count.
inline WindowMatrix scan_all_windows(const TimedEdgeStore& store, const ScanOptions& opt = {}) {
  auto range = store.year_range();
  if (!range) throw EmptyStore("cannot scan an empty store");

  std::vector<int> years;
  for (int y = range->first; y <= range->second; ++y) years.push_back(y);

  const TimedEdgeStore* source = &store;
  TimedEdgeStore filtered;
  if (opt.exclude_year) {
    const int ex = *opt.exclude_year;
    if (ex < range->first || ex > range->second)
      throw WindowOutOfRange("excluded year " + std::to_string(ex) + " outside data range");
    if (!opt.mask_only) {
      filtered = store.without_year(ex);
      if (filtered.empty()) throw EmptyStore("no projects left after excluding " + std::to_string(ex));
      source = &filtered;
      years.erase(std::find(years.begin(), years.end(), ex));
    }
  }

  const std::size_t n = years.size();
  std::vector<std::vector<WindowCell>> rows(n);
  std::atomic<std::size_t> next_row{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next_row.fetch_add(1)) < n;) {
      try {
        rows[i] = detail::scan_row(*source, years[i], std::span<const int>(years).subspan(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<WindowCell> cells;
  cells.reserve(n * (n + 1) / 2);
  for (auto& row : rows)
    for (auto& cell : row) {
      if (opt.exclude_year && opt.mask_only && cell.window.contains(*opt.exclude_year)) {
        cell.masked = true;
        cell.census.coefficient.reset();
      }
      cells.push_back(std::move(cell));
    }
  return WindowMatrix(std::move(years), std::move(cells), opt.exclude_year, opt.mask_only);
}

/// Flat record per matrix cell, for tabular emission.
struct MatrixRow {
  int start_year = 0;
  int end_year = 0;
  std::optional<double> coefficient;
  std::uint64_t squares = 0;
  std::uint64_t three_paths = 0;
  std::uint64_t edge_count = 0;

  friend bool operator==(const MatrixRow&, const MatrixRow&) = default;
};

inline std::vector<MatrixRow> matrix_to_rows(const WindowMatrix& m) {
  std::vector<MatrixRow> out;
  out.reserve(m.cell_count());
  for (const auto& c : m.cells())
    out.push_back({c.window.start_year, c.window.end_year, c.census.coefficient, c.census.squares,
                   c.census.three_paths, c.edge_count});
  return out;
}

}  // namespace bipartite_lens
