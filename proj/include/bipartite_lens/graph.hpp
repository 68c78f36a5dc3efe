#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bipartite_lens/error.hpp"

namespace bipartite_lens {

enum class Mode : std::uint8_t { Firm = 0, ResearchOrg = 1 };

constexpr Mode opposite(Mode m) noexcept {
  return m == Mode::Firm ? Mode::ResearchOrg : Mode::Firm;
}

constexpr std::string_view to_string(Mode m) noexcept {
  return m == Mode::Firm ? "firm" : "org";
}

struct NodeRef {
  std::string id;
  Mode mode = Mode::Firm;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef& a, const NodeRef& b) {
    if (auto c = a.mode <=> b.mode; c != 0) return c;
    return a.id <=> b.id;
  }
};

inline NodeRef firm(std::string id) { return {std::move(id), Mode::Firm}; }
inline NodeRef org(std::string id) { return {std::move(id), Mode::ResearchOrg}; }

/// Dense per-mode node index. Indices follow ascending id order.
using NodeIndex = std::uint32_t;

class GraphBuilder;

/// Frozen simple two-mode graph. Nodes of each mode are interned to dense
/// indices in ascending id order; adjacency is stored CSR-style per mode with
/// sorted neighbor lists.
class BipartiteGraph {
public:
  BipartiteGraph() = default;

  std::size_t node_count(Mode m) const noexcept { return side(m).ids.size(); }
  std::size_t edge_count() const noexcept { return side(Mode::Firm).adj.size(); }

  const std::string& id(Mode m, NodeIndex i) const { return side(m).ids.at(i); }
  std::span<const std::string> ids(Mode m) const noexcept { return side(m).ids; }

  std::optional<NodeIndex> index_of(Mode m, std::string_view id) const {
    const auto& ids = side(m).ids;
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<NodeIndex>(it - ids.begin());
  }

  bool contains(const NodeRef& n) const { return index_of(n.mode, n.id).has_value(); }

  std::span<const NodeIndex> neighbors(Mode m, NodeIndex i) const {
    const auto& s = side(m);
    return std::span<const NodeIndex>(s.adj).subspan(s.offsets[i], s.offsets[i + 1] - s.offsets[i]);
  }

  std::size_t degree(Mode m, NodeIndex i) const {
    const auto& s = side(m);
    return s.offsets[i + 1] - s.offsets[i];
  }

  /// Neighbors of `node` by reference, ascending id. Throws UnknownNode.
  std::vector<NodeRef> neighbors(const NodeRef& node) const {
    auto i = index_of(node.mode, node.id);
    if (!i) throw UnknownNode("unknown " + std::string(to_string(node.mode)) + " node '" + node.id + "'");
    const Mode other = opposite(node.mode);
    std::vector<NodeRef> out;
    for (NodeIndex j : neighbors(node.mode, *i)) out.push_back({id(other, j), other});
    return out;
  }

  bool has_edge(NodeIndex firm_index, NodeIndex org_index) const {
    auto n = neighbors(Mode::Firm, firm_index);
    return std::binary_search(n.begin(), n.end(), org_index);
  }

  /// One entry per node of `m` (zero-degree nodes included), ascending id.
  std::vector<std::pair<NodeRef, std::size_t>> degree_sequence(Mode m) const {
    std::vector<std::pair<NodeRef, std::size_t>> out;
    out.reserve(node_count(m));
    for (NodeIndex i = 0; i < node_count(m); ++i) out.emplace_back(NodeRef{id(m, i), m}, degree(m, i));
    return out;
  }

  /// Text form listing nodes then edges; equal graphs serialize identically.
  std::string canonical() const {
    std::string out;
    for (Mode m : {Mode::Firm, Mode::ResearchOrg})
      for (const auto& s : side(m).ids) {
        out += to_string(m);
        out += '\t';
        out += s;
        out += '\n';
      }
    for (NodeIndex f = 0; f < node_count(Mode::Firm); ++f)
      for (NodeIndex o : neighbors(Mode::Firm, f)) {
        out += "edge\t";
        out += id(Mode::Firm, f);
        out += '\t';
        out += id(Mode::ResearchOrg, o);
        out += '\n';
      }
    return out;
  }

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

private:
  friend class GraphBuilder;

  struct Side {
    std::vector<std::string> ids;
    std::vector<std::size_t> offsets{0};
    std::vector<NodeIndex> adj;
    friend bool operator==(const Side&, const Side&) = default;
  };

  const Side& side(Mode m) const noexcept { return sides_[static_cast<std::size_t>(m)]; }

  std::array<Side, 2> sides_;
};

/// Single-writer accumulator for a BipartiteGraph. Repeated edges collapse.
class GraphBuilder {
public:
  /// Registers a node without edges. Idempotent.
  NodeIndex add_node(const NodeRef& n) {
    if (n.id.empty()) throw Error("node id must be non-empty");
    return intern(n.mode, n.id);
  }

  /// Adds {a, b}; the endpoints may be given in either order but must
  /// differ in mode.
  void add_edge(const NodeRef& a, const NodeRef& b) {
    if (a.mode == b.mode)
      throw ModeViolation("edge '" + a.id + "'-'" + b.id + "' joins two " + std::string(to_string(a.mode)) + " nodes");
    const NodeRef& f = a.mode == Mode::Firm ? a : b;
    const NodeRef& o = a.mode == Mode::Firm ? b : a;
    const NodeIndex fi = add_node(f);
    const NodeIndex oi = add_node(o);
    edges_.emplace_back(fi, oi);
  }

  void add_edge(std::string_view firm_id, std::string_view org_id) {
    add_edge(NodeRef{std::string(firm_id), Mode::Firm}, NodeRef{std::string(org_id), Mode::ResearchOrg});
  }

  BipartiteGraph build() const {
    BipartiteGraph g;
    std::array<std::vector<NodeIndex>, 2> remap;
    for (std::size_t m = 0; m < 2; ++m) {
      const auto& names = names_[m];
      std::vector<NodeIndex> order(names.size());
      for (NodeIndex i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](NodeIndex x, NodeIndex y) { return names[x] < names[y]; });
      remap[m].resize(names.size());
      auto& ids = g.sides_[m].ids;
      ids.reserve(names.size());
      for (NodeIndex rank = 0; rank < order.size(); ++rank) {
        remap[m][order[rank]] = rank;
        ids.push_back(names[order[rank]]);
      }
    }

    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    edges.reserve(edges_.size());
    for (auto [f, o] : edges_) edges.emplace_back(remap[0][f], remap[1][o]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    fill_csr(g.sides_[0], edges, [](auto& e) { return e.first; }, [](auto& e) { return e.second; });
    std::sort(edges.begin(), edges.end(), [](auto& x, auto& y) {
      return std::tie(x.second, x.first) < std::tie(y.second, y.first);
    });
    fill_csr(g.sides_[1], edges, [](auto& e) { return e.second; }, [](auto& e) { return e.first; });
    return g;
  }

private:
  NodeIndex intern(Mode m, const std::string& id) {
    auto& lookup = lookup_[static_cast<std::size_t>(m)];
    auto [it, inserted] = lookup.try_emplace(id, static_cast<NodeIndex>(lookup.size()));
    if (inserted) names_[static_cast<std::size_t>(m)].push_back(id);
    return it->second;
  }

  // edges must be sorted by (key, value)
  template <class Key, class Value>
  static void fill_csr(BipartiteGraph::Side& s, const std::vector<std::pair<NodeIndex, NodeIndex>>& edges, Key key,
                       Value value) {
    s.offsets.assign(s.ids.size() + 1, 0);
    for (auto& e : edges) ++s.offsets[key(e) + 1];
    for (std::size_t i = 1; i < s.offsets.size(); ++i) s.offsets[i] += s.offsets[i - 1];
    s.adj.reserve(edges.size());
    for (auto& e : edges) s.adj.push_back(value(e));
  }

  std::array<std::unordered_map<std::string, NodeIndex>, 2> lookup_;
  std::array<std::vector<std::string>, 2> names_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
};

}  // namespace bipartite_lens
