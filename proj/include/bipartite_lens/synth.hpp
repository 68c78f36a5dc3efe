#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"
#include "bipartite_lens/ingest.hpp"
#include "bipartite_lens/random.hpp"

namespace bipartite_lens {

/// A burst of co-collaboration: in `year`, each project is drawn with
/// probability hot_prob from a fixed block of hot firms x hot orgs.
struct RegimeShift {
  int year = 0;
  std::size_t hot_firms = 8;
  std::size_t hot_orgs = 4;
  double hot_prob = 0.8;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::size_t n_orgs = 74;
  std::size_t n_projects = 10000;
  int first_year = 1992;
  int last_year = 2018;
  double new_firm_prob = 0.4;
  std::optional<RegimeShift> shift;

  /// Throws InvalidConfig (ShiftOutsideRange for a misplaced shift year).
  void validate() const {
    if (n_orgs < 1) throw InvalidConfig("n_orgs must be positive");
    if (n_projects < 1) throw InvalidConfig("n_projects must be positive");
    if (first_year > last_year) throw InvalidConfig("year range is empty");
    if (!(new_firm_prob > 0.0 && new_firm_prob <= 1.0)) throw InvalidConfig("new_firm_prob must lie in (0, 1]");
    if (!shift) return;
    if (shift->year < first_year || shift->year > last_year)
      throw ShiftOutsideRange("shift year " + std::to_string(shift->year) + " outside year range");
    if (shift->hot_orgs < 1 || shift->hot_orgs > n_orgs) throw InvalidConfig("hot org count must lie in [1, n_orgs]");
    if (shift->hot_firms < 1 || shift->hot_firms > n_projects)
      throw InvalidConfig("hot firm count must lie in [1, n_projects]");
    if (!(shift->hot_prob >= 0.0 && shift->hot_prob <= 1.0)) throw InvalidConfig("hot_prob must lie in [0, 1]");
  }
};

namespace detail {

inline std::string padded_id(char prefix, std::uint64_t i, std::uint64_t count) {
  const std::size_t width = std::to_string(count > 1 ? count - 1 : 0).size();
  std::string digits = std::to_string(i);
  return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

inline std::vector<ProjectRecord> generate_stream(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  const auto n_years = static_cast<std::uint64_t>(cfg.last_year - cfg.first_year + 1);

  std::vector<std::string> orgs;
  for (std::size_t o = 0; o < cfg.n_orgs; ++o) orgs.push_back(padded_id('o', o, cfg.n_orgs));
  std::vector<std::string> hot;
  if (cfg.shift)
    for (std::size_t h = 0; h < cfg.shift->hot_firms; ++h) hot.push_back(padded_id('h', h, cfg.shift->hot_firms));

  // one entry per past project, so a uniform pick is proportional to project count
  std::vector<std::uint32_t> attachment;
  std::uint32_t firm_count = 0;

  std::vector<ProjectRecord> out;
  out.reserve(cfg.n_projects);
  for (std::uint64_t i = 0; i < cfg.n_projects; ++i) {
    ProjectRecord r;
    r.project_id = padded_id('P', i, cfg.n_projects);
    r.start_year = cfg.first_year + static_cast<int>(i * n_years / cfg.n_projects);

    if (cfg.shift && r.start_year == cfg.shift->year && cfg.shift->hot_prob > 0.0 &&
        bernoulli(rng, cfg.shift->hot_prob)) {
      r.firm_id = hot[uniform_below(rng, hot.size())];
      r.org_id = orgs[uniform_below(rng, cfg.shift->hot_orgs)];
      out.push_back(std::move(r));
      continue;
    }

    std::uint32_t f;
    if (attachment.empty() || bernoulli(rng, cfg.new_firm_prob))
      f = firm_count++;
    else
      f = attachment[uniform_below(rng, attachment.size())];
    attachment.push_back(f);
    r.firm_id = padded_id('f', f, cfg.n_projects);
    r.org_id = orgs[uniform_below(rng, cfg.n_orgs)];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Random bipartite baseline: each of the n_firms * n_orgs possible edges is
/// present independently with probability p. Every node is registered.
inline BipartiteGraph gen_er_bipartite(std::size_t n_firms, std::size_t n_orgs, double p, std::uint64_t seed) {
  if (n_firms < 1 || n_orgs < 1) throw InvalidConfig("node counts must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("edge probability must lie in [0, 1]");
  Rng rng(seed);
  GraphBuilder b;
  std::vector<NodeRef> orgs;
  for (std::size_t o = 0; o < n_orgs; ++o) {
    orgs.push_back(org(detail::padded_id('o', o, n_orgs)));
    b.add_node(orgs.back());
  }
  for (std::size_t f = 0; f < n_firms; ++f) {
    const NodeRef fr = firm(detail::padded_id('f', f, n_firms));
    b.add_node(fr);
    for (const auto& o : orgs)
      if (bernoulli(rng, p)) b.add_edge(fr, o);
  }
  return b.build();
}

/// One record per edge, all dated `year`, so a random graph can travel
/// through the canonical CSV.
inline std::vector<ProjectRecord> graph_to_records(const BipartiteGraph& g, int year) {
  std::vector<ProjectRecord> out;
  std::uint64_t k = 0;
  for (NodeIndex f = 0; f < g.node_count(Mode::Firm); ++f)
    for (NodeIndex o : g.neighbors(Mode::Firm, f))
      out.push_back({detail::padded_id('E', k++, g.edge_count()), g.id(Mode::Firm, f), g.id(Mode::ResearchOrg, o), year});
  return out;
}

/// Preferential-attachment project stream. Projects are dated in order,
/// spread evenly over the year range. Each project's firm is new with
/// probability new_firm_prob, otherwise an existing firm picked in
/// proportion to its project count; the org is uniform over n_orgs.
inline std::vector<ProjectRecord> gen_pa_stream(const GeneratorConfig& cfg) {
  cfg.validate();
  if (cfg.shift) throw InvalidConfig("gen_pa_stream takes no regime shift; use gen_regime_shift_stream");
  return detail::generate_stream(cfg);
}

/// gen_pa_stream plus a hot block in the shift year: those projects go, with
/// probability hot_prob, to a uniform pair of the dedicated hot firms
/// (ids h0..) and the first hot_orgs orgs. Hot projects do not feed the
/// attachment pool. With hot_prob = 0 the output equals gen_pa_stream.
inline std::vector<ProjectRecord> gen_regime_shift_stream(const GeneratorConfig& cfg) {
  cfg.validate();
  if (!cfg.shift) throw InvalidConfig("gen_regime_shift_stream needs a shift");
  return detail::generate_stream(cfg);
}

}  // namespace bipartite_lens
