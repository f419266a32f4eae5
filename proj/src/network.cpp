#include "homonet/network.hpp"

#include <algorithm>
#include <set>

#include "homonet/union_find.hpp"

namespace homonet {

CoauthorNetwork CoauthorNetwork::from_parts(
    std::vector<AuthorNode> nodes,
    std::vector<std::tuple<std::string, std::string, std::uint32_t>> edges) {
  CoauthorNetwork net;
  std::sort(nodes.begin(), nodes.end(),
            [](const AuthorNode& a, const AuthorNode& b) { return a.label < b.label; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i && nodes[i].label == nodes[i - 1].label)
      throw Error("duplicate node label: " + nodes[i].label);
    net.index_.emplace(nodes[i].label, static_cast<std::uint32_t>(i));
  }
  net.nodes_ = std::move(nodes);

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> acc;
  for (auto& [a, b, w] : edges) {
    auto ia = net.index_.find(a);
    auto ib = net.index_.find(b);
    if (ia == net.index_.end() || ib == net.index_.end())
      throw Error("edge references unknown node");
    if (ia->second == ib->second) throw Error("self-edge on node: " + a);
    std::uint32_t u = std::min(ia->second, ib->second);
    std::uint32_t v = std::max(ia->second, ib->second);
    acc[{u, v}] += w;
  }
  for (const auto& [uv, w] : acc) {
    net.edges_.push_back({uv.first, uv.second, w});
  }
  net.compute_components();
  return net;
}

std::optional<std::uint32_t> CoauthorNetwork::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CoauthorNetwork::component_size(std::uint32_t id) const {
  std::size_t n = 0;
  for (std::uint32_t c : component_ids_) {
    if (c == id) ++n;
  }
  return n;
}

std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> CoauthorNetwork::adjacency()
    const {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(nodes_.size());
  for (const NetworkEdge& e : edges_) {
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
  }
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

void CoauthorNetwork::compute_components() {
  component_ids_.assign(nodes_.size(), 0);
  component_count_ = 0;
  if (nodes_.empty()) return;

  UnionFind uf(nodes_.size());
  for (const NetworkEdge& e : edges_) uf.unite(e.u, e.v);

  // Components ordered by size descending, then by their smallest member
  // label; nodes are label-sorted, so the smallest root index carries it.
  std::map<std::size_t, std::vector<std::uint32_t>> by_root;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    by_root[uf.find(i)].push_back(i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (root, size)
  for (const auto& [root, members] : by_root) order.emplace_back(root, members.size());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  component_count_ = order.size();
  for (std::uint32_t id = 0; id < order.size(); ++id) {
    for (std::uint32_t member : by_root.at(order[id].first)) {
      component_ids_[member] = id;
    }
  }
}

CoauthorNetwork build_network(const Corpus& corpus,
                              const std::map<NameKey, IdentityPartition>& identities,
                              const NetworkFilterOptions& opts) {
  // Materialize identities as (label, article set) and validate coverage.
  struct Identity {
    std::string label;
    std::vector<std::string> papers;
  };
  std::vector<Identity> all;
  for (const auto& [key, partition] : identities) {
    std::set<std::string> covered;
    for (std::size_t k = 0; k < partition.identities.size(); ++k) {
      Identity ident;
      ident.label = identity_label(key, k + 1);
      for (const std::string& id : partition.identities[k]) {
        if (!corpus.contains(id))
          throw Error("identity map references unknown article: " + id);
        if (!covered.insert(id).second)
          throw Error("article assigned twice under " + key.display() + ": " + id);
        ident.papers.push_back(id);
      }
      std::sort(ident.papers.begin(), ident.papers.end());
      all.push_back(std::move(ident));
    }
    std::vector<std::string> expected = corpus.articles_of(key);
    if (std::vector<std::string>(covered.begin(), covered.end()) != expected)
      throw Error("identity map does not cover the articles of " + key.display());
  }
  for (const auto& [key, ids] : corpus.name_index()) {
    if (!identities.count(key)) throw Error("identity map misses name key: " + key.display());
  }

  std::vector<char> alive(all.size(), 1);
  std::map<std::string, std::vector<std::size_t>> paper_identities;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (const std::string& id : all[i].papers) paper_identities[id].push_back(i);
  }
  std::set<std::string> live_papers;
  for (const PublicationRecord& rec : corpus.records()) live_papers.insert(rec.id);

  // Step 1 drops one-paper identities; step 2 drops publications left with
  // fewer than two identities, then the process stops. Identities reduced to
  // one (or zero) surviving papers by step 2 are kept, matching the
  // interrupted recursion; --filter-to-fixpoint repeats both steps instead.
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!alive[i]) continue;
      std::size_t papers = 0;
      for (const std::string& id : all[i].papers) {
        if (live_papers.count(id)) ++papers;
      }
      if (papers <= 1) {
        alive[i] = 0;
        changed = true;
      }
    }
    std::vector<std::string> drop;
    for (const std::string& id : live_papers) {
      std::size_t remaining = 0;
      auto it = paper_identities.find(id);
      if (it != paper_identities.end()) {
        for (std::size_t i : it->second) {
          if (alive[i]) ++remaining;
        }
      }
      if (remaining < 2) drop.push_back(id);
    }
    for (const std::string& id : drop) {
      live_papers.erase(id);
      changed = true;
    }
    if (!opts.to_fixpoint || !changed) break;
  }

  std::vector<AuthorNode> nodes;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!alive[i]) continue;
    AuthorNode node;
    node.label = all[i].label;
    for (const std::string& id : all[i].papers) {
      if (live_papers.count(id)) node.paper_ids.push_back(id);
    }
    if (node.paper_ids.empty()) continue;
    nodes.push_back(std::move(node));
  }

  std::map<std::pair<std::string, std::string>, std::uint32_t> weights;
  for (const std::string& id : live_papers) {
    std::vector<std::string> labels;
    for (std::size_t i : paper_identities.at(id)) {
      if (alive[i]) labels.push_back(all[i].label);
    }
    std::sort(labels.begin(), labels.end());
    for (std::size_t a = 0; a < labels.size(); ++a) {
      for (std::size_t b = a + 1; b < labels.size(); ++b) {
        weights[{labels[a], labels[b]}] += 1;
      }
    }
  }
  std::vector<std::tuple<std::string, std::string, std::uint32_t>> edges;
  edges.reserve(weights.size());
  for (const auto& [uv, w] : weights) edges.emplace_back(uv.first, uv.second, w);
  return CoauthorNetwork::from_parts(std::move(nodes), std::move(edges));
}

CoauthorNetwork giant_component(const CoauthorNetwork& net) {
  if (net.empty()) throw Error("empty network has no giant component");
  std::vector<AuthorNode> nodes;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    if (net.component_ids()[i] == 0) nodes.push_back(net.nodes()[i]);
  }
  std::vector<std::tuple<std::string, std::string, std::uint32_t>> edges;
  for (const NetworkEdge& e : net.edges()) {
    if (net.component_ids()[e.u] == 0) {
      edges.emplace_back(net.nodes()[e.u].label, net.nodes()[e.v].label, e.weight);
    }
  }
  return CoauthorNetwork::from_parts(std::move(nodes), std::move(edges));
}

}  // namespace homonet
