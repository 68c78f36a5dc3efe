#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"

namespace bipartite_lens {

/// Exact square (4-cycle) and 3-path counts of a two-mode graph. Both are
/// counts of unordered subgraphs, so a complete K_{2,2} has 1 square and
/// 4 three-paths. The Robins-Alexander coefficient is the fraction of
/// 3-paths closed by a fourth edge: 4 * squares / three_paths.
struct ClusteringCensus {
  std::uint64_t squares = 0;
  std::uint64_t three_paths = 0;
  /// Empty when there are no 3-paths.
  std::optional<double> coefficient;

  static ClusteringCensus from_counts(std::uint64_t squares, std::uint64_t three_paths) {
    ClusteringCensus c{squares, three_paths, std::nullopt};
    if (three_paths > 0)
      c.coefficient = static_cast<double>(checked::mul(4, squares)) / static_cast<double>(three_paths);
    return c;
  }

  friend bool operator==(const ClusteringCensus&, const ClusteringCensus&) = default;
};

/// Which mode sits in the middle of the wedges enumerated by count_squares.
enum class WedgeCenter { Auto, Firm, ResearchOrg };

/// Sum over edges (u,v) of (deg u - 1)(deg v - 1): every 3-path has a unique
/// middle edge, and endpoints cannot coincide in a bipartite graph.
inline std::uint64_t count_three_paths(const BipartiteGraph& g) {
  std::uint64_t total = 0;
  for (NodeIndex f = 0; f < g.node_count(Mode::Firm); ++f) {
    const std::uint64_t df = g.degree(Mode::Firm, f);
    if (df < 2) continue;
    for (NodeIndex o : g.neighbors(Mode::Firm, f))
      total = checked::add(total, checked::mul(df - 1, g.degree(Mode::ResearchOrg, o) - 1));
  }
  return total;
}

namespace detail {

inline std::uint64_t wedge_cost(const BipartiteGraph& g, Mode center) {
  std::uint64_t cost = 0;
  for (NodeIndex i = 0; i < g.node_count(center); ++i) {
    const std::uint64_t d = g.degree(center, i);
    cost += d * d;
  }
  return cost;
}

}  // namespace detail

/// Butterfly count by wedge accumulation. For each endpoint node a, walk
/// every wedge a - c - b with b > a and tally b in a dense counter; a pair
/// (a, b) with k common neighbors closes C(k, 2) squares. Work is
/// proportional to the sum of squared degrees on the center side, so Auto
/// picks the side where that sum is smaller.
inline std::uint64_t count_squares(const BipartiteGraph& g, WedgeCenter center = WedgeCenter::Auto) {
  Mode c;
  switch (center) {
    case WedgeCenter::Firm: c = Mode::Firm; break;
    case WedgeCenter::ResearchOrg: c = Mode::ResearchOrg; break;
    default:
      c = detail::wedge_cost(g, Mode::Firm) <= detail::wedge_cost(g, Mode::ResearchOrg) ? Mode::Firm
                                                                                         : Mode::ResearchOrg;
  }
  const Mode e = opposite(c);
  const std::size_t n = g.node_count(e);

  std::vector<std::uint32_t> common(n, 0);
  std::vector<NodeIndex> touched;
  std::uint64_t squares = 0;
  for (NodeIndex a = 0; a < n; ++a) {
    for (NodeIndex mid : g.neighbors(e, a)) {
      auto ends = g.neighbors(c, mid);
      for (auto it = std::upper_bound(ends.begin(), ends.end(), a); it != ends.end(); ++it) {
        if (common[*it]++ == 0) touched.push_back(*it);
      }
    }
    for (NodeIndex b : touched) {
      squares = checked::add(squares, checked::pairs(common[b]));
      common[b] = 0;
    }
    touched.clear();
  }
  return squares;
}

inline ClusteringCensus clustering_census(const BipartiteGraph& g) {
  return ClusteringCensus::from_counts(count_squares(g), count_three_paths(g));
}

inline std::optional<double> robins_alexander(const BipartiteGraph& g) {
  return clustering_census(g).coefficient;
}

inline constexpr std::size_t kBruteForceNodeCap = 64;

/// Test oracle: enumerates every 4-node subset and counts, among its
/// induced edges, complete 2+2 squares and 3-edge subsets forming a simple
/// path. Exponential in spirit; refuses graphs above kBruteForceNodeCap.
inline ClusteringCensus brute_force_census(const BipartiteGraph& g) {
  const std::size_t nf = g.node_count(Mode::Firm);
  const std::size_t no = g.node_count(Mode::ResearchOrg);
  const std::size_t n = nf + no;
  if (n > kBruteForceNodeCap) throw TooLarge("brute-force census is limited to 64 nodes");

  // global numbering: firms first, then orgs
  auto adjacent = [&](std::size_t x, std::size_t y) {
    if (x > y) std::swap(x, y);
    if (x >= nf || y < nf) return false;
    return g.has_edge(static_cast<NodeIndex>(x), static_cast<NodeIndex>(y - nf));
  };

  std::uint64_t squares = 0, paths = 0;
  std::array<std::size_t, 4> q{};
  for (q[0] = 0; q[0] < n; ++q[0])
    for (q[1] = q[0] + 1; q[1] < n; ++q[1])
      for (q[2] = q[1] + 1; q[2] < n; ++q[2])
        for (q[3] = q[2] + 1; q[3] < n; ++q[3]) {
          std::vector<std::array<int, 2>> edges;
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
              if (adjacent(q[i], q[j])) edges.push_back({i, j});
          if (edges.size() < 3) continue;

          int firms = 0;
          for (auto v : q) firms += v < nf ? 1 : 0;
          if (firms == 2 && edges.size() == 4) ++squares;

          const std::size_t m = edges.size();
          for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
              for (std::size_t c = b + 1; c < m; ++c) {
                std::array<int, 4> deg{};
                for (std::size_t k : {a, b, c}) {
                  ++deg[edges[k][0]];
                  ++deg[edges[k][1]];
                }
                bool path = true;
                for (int d : deg) path = path && d >= 1 && d <= 2;
                if (path) ++paths;
              }
        }
  return ClusteringCensus::from_counts(squares, paths);
}

}  // namespace bipartite_lens
