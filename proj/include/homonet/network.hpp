#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "homonet/corpus.hpp"
#include "homonet/disambig.hpp"

namespace homonet {

struct AuthorNode {
  std::string label;
  std::vector<std::string> paper_ids;  // sorted, nonempty
  bool operator==(const AuthorNode&) const = default;
};

struct NetworkEdge {
  std::uint32_t u = 0;  // node indices, u < v
  std::uint32_t v = 0;
  std::uint32_t weight = 0;  // number of co-authored papers
};

// Undirected weighted co-author network. Nodes are sorted by label and edges
// by (u, v), so equal inputs produce identical in-memory layouts.
class CoauthorNetwork {
 public:
  static CoauthorNetwork from_parts(
      std::vector<AuthorNode> nodes,
      std::vector<std::tuple<std::string, std::string, std::uint32_t>> edges);

  const std::vector<AuthorNode>& nodes() const { return nodes_; }
  const std::vector<NetworkEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::optional<std::uint32_t> index_of(const std::string& label) const;

  // Component ids per node index; components are numbered by (size
  // descending, smallest member label ascending), so id 0 is the giant
  // component.
  const std::vector<std::uint32_t>& component_ids() const { return component_ids_; }
  std::size_t component_count() const { return component_count_; }
  std::size_t component_size(std::uint32_t id) const;

  // Adjacency lists as (neighbor index, weight), neighbors ascending.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adjacency() const;

 private:
  void compute_components();

  std::vector<AuthorNode> nodes_;
  std::vector<NetworkEdge> edges_;
  std::map<std::string, std::uint32_t> index_;
  std::vector<std::uint32_t> component_ids_;
  std::size_t component_count_ = 0;
};

struct NetworkFilterOptions {
  // The default filter is exactly two passes: drop one-paper identities, then
  // drop publications left with fewer than two identities, then stop. Setting
  // this iterates the two passes until nothing changes.
  bool to_fixpoint = false;
};

// Builds the co-author network from an identity assignment covering every
// name key of the corpus. Edge weight is the number of shared surviving
// papers. Throws Error if the identity map references unknown articles or
// does not cover a key's article set.
CoauthorNetwork build_network(const Corpus& corpus,
                              const std::map<NameKey, IdentityPartition>& identities,
                              const NetworkFilterOptions& opts = {});

// Subnetwork induced by the largest component (ties: the component containing
// the lexicographically smallest label). Throws Error on an empty network.
CoauthorNetwork giant_component(const CoauthorNetwork& net);

}  // namespace homonet
