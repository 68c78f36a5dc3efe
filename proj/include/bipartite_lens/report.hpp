#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "bipartite_lens/clustering.hpp"
#include "bipartite_lens/degree_stats.hpp"
#include "bipartite_lens/ingest.hpp"
#include "bipartite_lens/temporal_scan.hpp"

// Plot-data emitters. Line endings are LF; coefficients print with six
// decimals, or "nan" (CSV) / null (JSON) when undefined.

namespace bipartite_lens {

inline constexpr std::string_view kRankSizeHeader = "rank,degree,node_id";
inline constexpr std::string_view kMatrixHeader = "start_year,end_year,coefficient,squares,three_paths,edge_count";

inline std::string format_coefficient(std::optional<double> c) {
  if (!c) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", *c);
  return buf;
}

inline nlohmann::json census_to_json(const ClusteringCensus& c) {
  nlohmann::json j;
  j["squares"] = c.squares;
  j["three_paths"] = c.three_paths;
  j["coefficient"] = c.coefficient ? nlohmann::json(*c.coefficient) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json fit_to_json(const PowerLawFit& f) {
  return {{"alpha", f.alpha}, {"x_min", f.x_min}, {"ks_distance", f.ks_distance}, {"n_tail", f.n_tail}};
}

inline void write_rank_size_csv(std::ostream& os, const RankSizeDistribution& d) {
  os << kRankSizeHeader << '\n';
  for (const auto& e : d.entries) {
    os << e.rank << ',' << e.degree << ',';
    detail::write_csv_field(os, e.node_id);
    os << '\n';
  }
}

inline void write_matrix_csv(std::ostream& os, const WindowMatrix& m) {
  os << kMatrixHeader << '\n';
  for (const auto& r : matrix_to_rows(m))
    os << r.start_year << ',' << r.end_year << ',' << format_coefficient(r.coefficient) << ',' << r.squares << ','
       << r.three_paths << ',' << r.edge_count << '\n';
}

}  // namespace bipartite_lens
