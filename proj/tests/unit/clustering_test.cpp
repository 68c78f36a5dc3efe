#include <catch_amalgamated.hpp>

#include <limits>

#include "support/test_graphs.hpp"

using namespace bipartite_lens;
using bipartite_lens::testing::complete;
using bipartite_lens::testing::make_graph;

namespace {

BipartiteGraph path3() { return make_graph({{"a", "x"}, {"b", "x"}, {"b", "y"}}); }
BipartiteGraph single_edge() { return make_graph({{"a", "x"}}); }
BipartiteGraph k33_minus_two() {
  return make_graph({{"a1", "p1"}, {"a1", "p2"}, {"a1", "p3"}, {"a2", "p1"}, {"a2", "p2"}});
}

}  // namespace

TEST_CASE("count_three_paths", "[clustering]") {
  CHECK(count_three_paths(path3()) == 1);
  CHECK(count_three_paths(complete(2, 2)) == brute_force_census(complete(2, 2)).three_paths);
  CHECK(count_three_paths(complete(2, 2)) == 4);
  CHECK(count_three_paths(single_edge()) == 0);
  CHECK(count_three_paths(BipartiteGraph{}) == 0);
}

TEST_CASE("count_squares", "[clustering]") {
  CHECK(count_squares(complete(2, 2)) == 1);
  CHECK(count_squares(complete(3, 3)) == 9);
  CHECK(count_squares(k33_minus_two()) == brute_force_census(k33_minus_two()).squares);
  CHECK(count_squares(k33_minus_two()) == 1);
  CHECK(count_squares(path3()) == 0);
}

TEST_CASE("robins_alexander", "[clustering]") {
  using Catch::Matchers::WithinAbs;
  CHECK(robins_alexander(complete(2, 2)) == 1.0);
  CHECK(robins_alexander(path3()) == 0.0);
  CHECK_THAT(*robins_alexander(k33_minus_two()), WithinAbs(2.0 / 3.0, 1e-12));
  CHECK_THAT(*robins_alexander(k33_minus_two()), WithinAbs(0.666667, 1e-6));
  CHECK_FALSE(robins_alexander(single_edge()).has_value());
}

TEST_CASE("clustering_census and brute_force_census", "[clustering]") {
  CHECK(clustering_census(complete(2, 2)) == ClusteringCensus{1, 4, 1.0});
  CHECK(clustering_census(BipartiteGraph{}) == ClusteringCensus{0, 0, std::nullopt});
  CHECK(clustering_census(complete(3, 3)) == ClusteringCensus{9, 36, 1.0});

  CHECK(brute_force_census(complete(2, 2)) == ClusteringCensus{1, 4, 1.0});
  CHECK(brute_force_census(BipartiteGraph{}) == ClusteringCensus{0, 0, std::nullopt});
  CHECK(brute_force_census(complete(3, 3)) == ClusteringCensus{9, 36, 1.0});

  // 8 + 8 random graph
  Rng rng(88);
  auto g = bipartite_lens::testing::random_graph(8, 8, 0.5, rng);
  CHECK(clustering_census(g) == brute_force_census(g));

  REQUIRE_THROWS_AS(brute_force_census(complete(33, 32)), TooLarge);
  REQUIRE_NOTHROW(brute_force_census(complete(32, 32)));
}

TEST_CASE("census matches brute force on random graphs", "[clustering][property]") {
  Rng rng(1234);
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t nf = 1 + uniform_below(rng, 10), no = 1 + uniform_below(rng, 10);
    const double p = 0.1 * static_cast<double>(1 + trial % 9);
    auto g = bipartite_lens::testing::random_graph(nf, no, p, rng);
    const auto fast = clustering_census(g);
    const auto slow = brute_force_census(g);
    REQUIRE(fast.squares == slow.squares);
    REQUIRE(fast.three_paths == slow.three_paths);
    REQUIRE(fast.coefficient.has_value() == slow.coefficient.has_value());
    if (fast.coefficient) REQUIRE(std::abs(*fast.coefficient - *slow.coefficient) <= 1e-12);

    REQUIRE(4 * fast.squares <= fast.three_paths);
    if (fast.three_paths == 0) REQUIRE(fast.squares == 0);
    REQUIRE(count_squares(g, WedgeCenter::Firm) == count_squares(g, WedgeCenter::ResearchOrg));
  }
}

TEST_CASE("closed forms and structural properties", "[clustering][property]") {
  SECTION("complete bipartite graphs close every 3-path") {
    for (std::size_t m = 2; m <= 6; ++m)
      for (std::size_t n = 2; n <= 6; ++n) {
        auto c = clustering_census(complete(m, n));
        REQUIRE(c.coefficient == 1.0);
        // C(m,2) C(n,2) squares
        REQUIRE(c.squares == (m * (m - 1) / 2) * (n * (n - 1) / 2));
      }
  }

  SECTION("trees have no squares") {
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
      auto g = bipartite_lens::testing::random_tree(2 + uniform_below(rng, 40), rng);
      auto c = clustering_census(g);
      REQUIRE(c.squares == 0);
      if (c.three_paths > 0) REQUIRE(c.coefficient == 0.0);
    }
  }

  SECTION("insertion order does not matter") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
      auto g = bipartite_lens::testing::random_graph(9, 9, 0.4, rng);
      bipartite_lens::testing::EdgeList edges;
      for (NodeIndex f = 0; f < g.node_count(Mode::Firm); ++f)
        for (NodeIndex o : g.neighbors(Mode::Firm, f))
          edges.emplace_back(g.id(Mode::Firm, f), g.id(Mode::ResearchOrg, o));
      for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[uniform_below(rng, i)]);
      REQUIRE(clustering_census(make_graph(edges)) == clustering_census(g));
    }
  }
}

TEST_CASE("checked arithmetic reports overflow", "[clustering]") {
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  REQUIRE_THROWS_AS(checked::add(max, 1), OverflowError);
  REQUIRE_THROWS_AS(checked::mul(max / 2 + 1, 2), OverflowError);
  REQUIRE(checked::pairs(5) == 10);
  REQUIRE(checked::pairs(1) == 0);
  REQUIRE(checked::pairs(std::uint64_t{1} << 32) == (std::uint64_t{1} << 63) - (std::uint64_t{1} << 31));
}
