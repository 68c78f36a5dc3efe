#pragma once

#include "bipartite_lens/clustering.hpp"
#include "bipartite_lens/degree_stats.hpp"
#include "bipartite_lens/error.hpp"
#include "bipartite_lens/graph.hpp"
#include "bipartite_lens/ingest.hpp"
#include "bipartite_lens/random.hpp"
#include "bipartite_lens/report.hpp"
#include "bipartite_lens/synth.hpp"
#include "bipartite_lens/temporal_scan.hpp"
#include "bipartite_lens/version.hpp"
