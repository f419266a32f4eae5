#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homonet/network.hpp"

namespace homonet {

enum class ClusterMethod {
  map_equation,  // two-level description-length minimization
  modularity,    // Newman-Girvan modularity maximization
};

struct ClusterOptions {
  ClusterMethod method = ClusterMethod::map_equation;
  std::uint32_t max_passes = 64;
  double min_gain = 1e-10;  // strict improvement threshold per move
};

struct Clustering {
  // Cluster id per node index. Clusters are renumbered 0..k-1 by their
  // smallest member label.
  std::vector<std::uint32_t> assignment;
  std::uint32_t cluster_count = 0;
  // Codelength in bits for map_equation, modularity score otherwise.
  double quality = 0.0;
  ClusterMethod method = ClusterMethod::map_equation;

  std::vector<std::vector<std::uint32_t>> members() const;
};

// Runs a Louvain-style local-move pass over the network's weighted edges.
// Deterministic for a fixed (network, seed, options) triple.
Clustering cluster_network(const CoauthorNetwork& net, std::uint64_t seed,
                           const ClusterOptions& opts = {});

// Two-level map-equation codelength (bits) of an assignment; exposed for
// tests. Assignment values need not be contiguous.
double map_equation_codelength(const CoauthorNetwork& net,
                               const std::vector<std::uint32_t>& assignment);

// Newman-Girvan weighted modularity of an assignment; exposed for tests.
double modularity_score(const CoauthorNetwork& net,
                        const std::vector<std::uint32_t>& assignment);

// Node roles in the cluster structure, after Guimera-Amaral cartography.
enum class Role {
  R1 = 1,  // ultra-peripheral
  R2,      // peripheral
  R3,      // non-hub connector
  R4,      // non-hub kinless
  R5,      // provincial hub
  R6,      // connector hub
  R7,      // kinless hub
  unclassifiable,  // degenerate within-cluster degree spread
};

const char* role_name(Role r);

struct RoleThresholds {
  double z_hub = 2.5;
  double nonhub_p1 = 0.05;
  double nonhub_p2 = 0.62;
  double nonhub_p3 = 0.80;
  double hub_p1 = 0.30;
  double hub_p2 = 0.75;
  bool weighted_degree = false;
};

struct NodeRoleMetrics {
  double z = 0.0;            // within-cluster degree z-score
  double participation = 0.0;  // 1 - sum_s (k_s / k)^2
  Role role = Role::unclassifiable;
};

// Classifies every node. Nodes in clusters whose within-cluster degree has
// zero spread get Role::unclassifiable (their z is reported as 0).
std::vector<NodeRoleMetrics> classify_roles(const CoauthorNetwork& net,
                                            const Clustering& clustering,
                                            const RoleThresholds& thresholds = {});

struct RoleDistribution {
  std::map<Role, std::size_t> counts;  // every enumerator present
  std::size_t classifiable = 0;
  std::size_t total = 0;
  // Fraction of classifiable nodes per role; empty optional when no node is
  // classifiable.
  std::optional<double> fraction(Role r) const;
};

RoleDistribution role_distribution(const std::vector<NodeRoleMetrics>& metrics);

}  // namespace homonet
