#pragma once

#include <bipartite_lens/synth.hpp>

namespace bipartite_lens::testing {

/// Frozen regime-shift demo corpus (same defaults as `generate shift`).
inline GeneratorConfig regime_demo_config() {
  GeneratorConfig cfg;
  cfg.seed = 11;
  cfg.n_orgs = 74;
  cfg.n_projects = 6000;
  cfg.first_year = 2000;
  cfg.last_year = 2014;
  cfg.new_firm_prob = 0.6;
  cfg.shift = RegimeShift{2008, 8, 4, 0.8};
  return cfg;
}

/// Frozen preferential-attachment corpus for rank-size shape checks.
inline GeneratorConfig pa_demo_config() {
  GeneratorConfig cfg;
  cfg.seed = 7;
  cfg.n_orgs = 74;
  cfg.n_projects = 50000;
  cfg.new_firm_prob = 0.4;
  return cfg;
}

}  // namespace bipartite_lens::testing
