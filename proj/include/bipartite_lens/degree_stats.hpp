#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"
#include "bipartite_lens/random.hpp"

namespace bipartite_lens {

struct RankEntry {
  std::size_t rank = 0;
  std::uint64_t degree = 0;
  std::string node_id;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct RankSizeDistribution {
  Mode mode = Mode::Firm;
  std::vector<RankEntry> entries;
};

/// Degrees of one mode sorted descending, ties by ascending id, ranked 1..n.
inline RankSizeDistribution rank_size(const BipartiteGraph& g, Mode mode) {
  // degree_sequence is already ascending by id, so a stable sort keeps ties ordered
  auto seq = g.degree_sequence(mode);
  std::stable_sort(seq.begin(), seq.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  RankSizeDistribution d{mode, {}};
  d.entries.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) d.entries.push_back({i + 1, seq[i].second, std::move(seq[i].first.id)});
  return d;
}

struct LogLogPoint {
  double log_rank = 0;
  double log_degree = 0;
};

/// (log10 rank, log10 degree) for every entry with degree >= 1.
inline std::vector<LogLogPoint> log_log_points(const RankSizeDistribution& d) {
  std::vector<LogLogPoint> pts;
  for (const auto& e : d.entries)
    if (e.degree > 0)
      pts.push_back({std::log10(static_cast<double>(e.rank)), std::log10(static_cast<double>(e.degree))});
  return pts;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// Ordinary least squares of log_degree on log_rank.
inline LinearFit least_squares(std::span<const LogLogPoint> pts) {
  if (pts.size() < 2) throw InsufficientData("least squares needs at least two points");
  double mx = 0, my = 0;
  for (auto p : pts) {
    mx += p.log_rank;
    my += p.log_degree;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (auto p : pts) {
    const double dx = p.log_rank - mx, dy = p.log_degree - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw InsufficientData("least squares needs two distinct ranks");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

struct PowerLawFit {
  double alpha = 0;
  std::uint64_t x_min = 1;
  double ks_distance = 0;
  std::size_t n_tail = 0;
};

/// P(X >= x) of the discretized power law the fit assumes:
/// ((x - 1/2) / (x_min - 1/2))^(1 - alpha) for x >= x_min.
inline double power_law_ccdf(double x, double alpha, std::uint64_t x_min) {
  if (x <= static_cast<double>(x_min)) return 1.0;
  return std::pow((x - 0.5) / (static_cast<double>(x_min) - 0.5), 1.0 - alpha);
}

namespace detail {

// `sorted` ascending; tail starts at index `first`.
inline PowerLawFit fit_tail(std::span<const std::uint64_t> sorted, std::size_t first, std::uint64_t x_min,
                            double log_sum) {
  const std::size_t n = sorted.size() - first;
  const double shift = std::log(static_cast<double>(x_min) - 0.5);
  PowerLawFit f;
  f.x_min = x_min;
  f.n_tail = n;
  f.alpha = 1.0 + static_cast<double>(n) / (log_sum - static_cast<double>(n) * shift);

  // KS between empirical and fitted CCDF at each distinct observed value
  double d = 0;
  for (std::size_t i = first; i < sorted.size();) {
    const double emp = static_cast<double>(sorted.size() - i) / static_cast<double>(n);
    d = std::max(d, std::abs(emp - power_law_ccdf(static_cast<double>(sorted[i]), f.alpha, x_min)));
    const std::uint64_t v = sorted[i];
    while (i < sorted.size() && sorted[i] == v) ++i;
  }
  f.ks_distance = d;
  return f;
}

}  // namespace detail

/// Discrete power-law MLE in the continuous approximation,
///   alpha = 1 + n / sum ln(x_i / (x_min - 1/2))  over x_i >= x_min.
/// Without x_min, every distinct observed value whose tail holds at least
/// two distinct values is tried, and the one minimizing the KS distance wins
/// (smallest x_min on ties).
inline PowerLawFit fit_power_law(std::span<const std::uint64_t> degrees,
                                 std::optional<std::uint64_t> x_min = std::nullopt) {
  if (x_min && *x_min < 1) throw InsufficientData("x_min must be positive");
  std::vector<std::uint64_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());

  // suffix sums of ln x for O(1) tail log sums
  std::vector<double> suffix(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;)
    suffix[i] = suffix[i + 1] + (sorted[i] > 0 ? std::log(static_cast<double>(sorted[i])) : 0.0);

  if (x_min) {
    const auto first = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), *x_min) - sorted.begin());
    if (sorted.size() - first < 2) throw InsufficientData("fewer than two observations at or above x_min");
    return detail::fit_tail(sorted, first, *x_min, suffix[first]);
  }

  std::optional<PowerLawFit> best;
  for (std::size_t i = 0; i < sorted.size();) {
    const std::uint64_t v = sorted[i];
    // a tail holding one distinct value fits any alpha with zero KS distance
    if (v >= 1 && sorted.size() - i >= 2 && sorted.back() != v) {
      auto f = detail::fit_tail(sorted, i, v, suffix[i]);
      if (!best || f.ks_distance < best->ks_distance) best = f;
    }
    while (i < sorted.size() && sorted[i] == v) ++i;
  }
  if (!best) throw InsufficientData("fewer than two positive observations");
  return *best;
}

/// Draws from the distribution power_law_ccdf describes, by inverse
/// transform: floor((x_min - 1/2) (1 - u)^(-1/(alpha - 1)) + 1/2).
inline std::vector<std::uint64_t> sample_power_law(double alpha, std::uint64_t x_min, std::size_t n, Rng& rng) {
  std::vector<std::uint64_t> out;
  out.reserve(n);
  constexpr double cap = 9.0e18;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    const double x = (static_cast<double>(x_min) - 0.5) * std::pow(1.0 - u, -1.0 / (alpha - 1.0)) + 0.5;
    out.push_back(static_cast<std::uint64_t>(std::floor(std::min(x, cap))));
  }
  return out;
}

struct ModeSummary {
  std::size_t firm_count = 0;
  std::size_t org_count = 0;
  std::size_t edge_count = 0;
  std::size_t firm_max_degree = 0;
  std::size_t org_max_degree = 0;

  friend bool operator==(const ModeSummary&, const ModeSummary&) = default;
};

inline ModeSummary mode_summary(const BipartiteGraph& g) {
  ModeSummary s{g.node_count(Mode::Firm), g.node_count(Mode::ResearchOrg), g.edge_count(), 0, 0};
  for (NodeIndex i = 0; i < s.firm_count; ++i) s.firm_max_degree = std::max(s.firm_max_degree, g.degree(Mode::Firm, i));
  for (NodeIndex i = 0; i < s.org_count; ++i)
    s.org_max_degree = std::max(s.org_max_degree, g.degree(Mode::ResearchOrg, i));
  return s;
}

}  // namespace bipartite_lens
