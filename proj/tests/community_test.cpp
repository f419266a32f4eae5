#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "homonet/community.hpp"
#include "homonet/network.hpp"
#include "homonet/rng.hpp"
#include "oracles.hpp"

using namespace homonet;

namespace {

using EdgeList = std::vector<std::tuple<std::size_t, std::size_t, double>>;

// Nodes labeled in index order (two digits keep label order == index order).
CoauthorNetwork net_of(std::size_t n, const EdgeList& edges) {
  std::vector<AuthorNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "n%02zu", i);
    nodes.push_back({buf, {"x"}});
  }
  std::vector<std::tuple<std::string, std::string, std::uint32_t>> weighted;
  for (const auto& [u, v, w] : edges) {
    weighted.emplace_back(nodes[u].label, nodes[v].label,
                          static_cast<std::uint32_t>(w));
  }
  return CoauthorNetwork::from_parts(std::move(nodes), std::move(weighted));
}

EdgeList two_cliques_with_bridge() {
  EdgeList edges;
  for (std::size_t base : {std::size_t{0}, std::size_t{4}}) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) edges.emplace_back(base + i, base + j, 1.0);
    }
  }
  edges.emplace_back(3, 4, 1.0);
  return edges;
}

EdgeList random_graph(std::size_t n, double p, double max_w, Rng& rng) {
  EdgeList edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.next_unit() < p) {
        edges.emplace_back(i, j, 1.0 + std::floor(rng.next_unit() * max_w));
      }
    }
  }
  return edges;
}

std::vector<std::uint32_t> random_assignment(std::size_t n, std::size_t clusters, Rng& rng) {
  std::vector<std::uint32_t> assignment(n);
  for (auto& a : assignment) a = static_cast<std::uint32_t>(rng.next_below(clusters));
  return assignment;
}

}  // namespace

TEST_CASE("two bridged cliques split at the bridge") {
  const EdgeList edges = two_cliques_with_bridge();
  const CoauthorNetwork net = net_of(8, edges);

  for (ClusterMethod method : {ClusterMethod::map_equation, ClusterMethod::modularity}) {
    ClusterOptions opts;
    opts.method = method;
    const Clustering clustering = cluster_network(net, 1, opts);
    REQUIRE(clustering.cluster_count == 2);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(clustering.assignment[i] == clustering.assignment[0]);
      CHECK(clustering.assignment[4 + i] == clustering.assignment[4]);
    }
    CHECK(clustering.assignment[0] != clustering.assignment[4]);
  }
}

TEST_CASE("the two-clique codelength matches hand and oracle values") {
  const EdgeList edges = two_cliques_with_bridge();
  const CoauthorNetwork net = net_of(8, edges);
  const std::vector<std::uint32_t> two_modules{0, 0, 0, 0, 1, 1, 1, 1};
  const std::vector<std::uint32_t> one_module(8, 0);

  const double l2 = map_equation_codelength(net, two_modules);
  const double l1 = map_equation_codelength(net, one_module);
  CHECK(l2 == doctest::Approx(2.464484).epsilon(1e-4));
  CHECK(l1 == doctest::Approx(2.987774).epsilon(1e-4));
  CHECK(l2 < l1);

  CHECK(l2 == doctest::Approx(oracles::entropy_map_equation(8, edges, two_modules))
                  .epsilon(1e-9));
  CHECK(l1 == doctest::Approx(oracles::entropy_map_equation(8, edges, one_module))
                  .epsilon(1e-9));

  // The split at the bridge is the exhaustive optimum for both objectives.
  const double best_codelength = oracles::best_partition_score(
      8,
      [&](const std::vector<std::uint32_t>& a) {
        return oracles::entropy_map_equation(8, edges, a);
      },
      false);
  CHECK(l2 == doctest::Approx(best_codelength).epsilon(1e-9));

  ClusterOptions modularity_opts;
  modularity_opts.method = ClusterMethod::modularity;
  const Clustering by_modularity = cluster_network(net, 1, modularity_opts);
  const double best_modularity = oracles::best_partition_score(
      8,
      [&](const std::vector<std::uint32_t>& a) { return oracles::dense_modularity(8, edges, a); },
      true);
  CHECK(by_modularity.quality == doctest::Approx(best_modularity).epsilon(1e-9));
}

TEST_CASE("objective functions match their oracles on random inputs") {
  Rng rng(21);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_below(8));
    const EdgeList edges = random_graph(n, 0.5, 4.0, rng);
    const CoauthorNetwork net = net_of(n, edges);
    const auto assignment = random_assignment(n, 1 + rng.next_below(n), rng);

    CHECK(map_equation_codelength(net, assignment) ==
          doctest::Approx(oracles::entropy_map_equation(n, edges, assignment))
              .epsilon(1e-9));
    CHECK(modularity_score(net, assignment) ==
          doctest::Approx(oracles::dense_modularity(n, edges, assignment)).epsilon(1e-9));
  }
}

TEST_CASE("a single clique is one cluster") {
  EdgeList edges;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) edges.emplace_back(i, j, 1.0);
  }
  const CoauthorNetwork net = net_of(5, edges);
  for (ClusterMethod method : {ClusterMethod::map_equation, ClusterMethod::modularity}) {
    ClusterOptions opts;
    opts.method = method;
    CHECK(cluster_network(net, 3, opts).cluster_count == 1);
  }
}

TEST_CASE("no cluster spans components") {
  EdgeList edges;
  for (std::size_t base : {std::size_t{0}, std::size_t{3}}) {
    edges.emplace_back(base, base + 1, 1.0);
    edges.emplace_back(base, base + 2, 1.0);
    edges.emplace_back(base + 1, base + 2, 1.0);
  }
  const CoauthorNetwork net = net_of(6, edges);
  const Clustering clustering = cluster_network(net, 1);
  for (const auto& members : clustering.members()) {
    std::set<std::uint32_t> components;
    for (std::uint32_t node : members) components.insert(net.component_ids()[node]);
    CHECK(components.size() == 1);
  }
}

TEST_CASE("clustering is deterministic under a fixed seed") {
  Rng rng(5);
  const EdgeList edges = random_graph(24, 0.2, 3.0, rng);
  const CoauthorNetwork net = net_of(24, edges);
  const Clustering a = cluster_network(net, 42);
  const Clustering b = cluster_network(net, 42);
  CHECK(a.assignment == b.assignment);
  CHECK(a.quality == b.quality);

  // The reported quality is the objective of the reported assignment, and it
  // never beats the exhaustive optimum on a small graph.
  CHECK(a.quality == doctest::Approx(map_equation_codelength(net, a.assignment)).epsilon(1e-12));
  const EdgeList small = random_graph(7, 0.5, 2.0, rng);
  const CoauthorNetwork small_net = net_of(7, small);
  const Clustering small_clustering = cluster_network(small_net, 9);
  const double best = oracles::best_partition_score(
      7,
      [&](const std::vector<std::uint32_t>& assignment) {
        return oracles::entropy_map_equation(7, small, assignment);
      },
      false);
  CHECK(small_clustering.quality >= best - 1e-9);
}

TEST_CASE("empty networks cannot be clustered and sizes must agree") {
  CHECK_THROWS_AS(cluster_network(CoauthorNetwork{}, 1), Error);
  const CoauthorNetwork net = net_of(3, {{0, 1, 1.0}});
  CHECK_THROWS_AS(map_equation_codelength(net, {0, 1}), Error);
  CHECK_THROWS_AS(modularity_score(net, {0}), Error);
}

TEST_CASE("participation is zero inside one cluster and 0.75 on an even four-way split") {
  // Star center c (index 0) with leaves 1..4.
  const EdgeList star{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}};
  const CoauthorNetwork net = net_of(5, star);

  Clustering single;
  single.assignment = {0, 0, 0, 0, 0};
  single.cluster_count = 1;
  const auto internal = classify_roles(net, single);
  for (const auto& m : internal) CHECK(m.participation == doctest::Approx(0.0));

  Clustering four_way;
  four_way.assignment = {0, 0, 1, 2, 3};
  four_way.cluster_count = 4;
  const auto split = classify_roles(net, four_way);
  CHECK(split[0].participation == doctest::Approx(0.75));
}

TEST_CASE("within-cluster degree z-scores standardize against the own cluster") {
  const EdgeList star{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}};
  const CoauthorNetwork net = net_of(5, star);
  Clustering single;
  single.assignment = {0, 0, 0, 0, 0};
  single.cluster_count = 1;
  const auto metrics = classify_roles(net, single);

  // Center degree 4, leaves 1: mean 1.6, population std 1.2.
  CHECK(metrics[0].z == doctest::Approx(2.0));
  for (std::size_t leaf = 1; leaf < 5; ++leaf) {
    CHECK(metrics[leaf].z == doctest::Approx(-0.5));
    CHECK(metrics[0].z > metrics[leaf].z);
  }

  // All of them hold p = 0, z < 2.5: everything is ultra-peripheral.
  const RoleDistribution dist = role_distribution(metrics);
  CHECK(dist.classifiable == 5);
  CHECK(dist.counts.at(Role::R1) == 5);
  CHECK(*dist.fraction(Role::R1) == doctest::Approx(1.0));

  // The hub threshold is inclusive: z >= z_hub flips the center to a hub, and
  // its p = 0 lands it in the provincial class.
  RoleThresholds low_bar;
  low_bar.z_hub = 2.0;
  const auto hubbed = classify_roles(net, single, low_bar);
  CHECK(hubbed[0].role == Role::R5);
  CHECK(hubbed[1].role == Role::R1);
}

TEST_CASE("zero-spread clusters are unclassifiable and excluded from distributions") {
  const CoauthorNetwork net = net_of(8, two_cliques_with_bridge());
  const Clustering clustering = cluster_network(net, 1);
  REQUIRE(clustering.cluster_count == 2);
  const auto metrics = classify_roles(net, clustering);
  for (const auto& m : metrics) {
    CHECK(m.role == Role::unclassifiable);
    CHECK(m.z == doctest::Approx(0.0));
  }
  const RoleDistribution dist = role_distribution(metrics);
  CHECK(dist.classifiable == 0);
  CHECK(dist.total == 8);
  CHECK_FALSE(dist.fraction(Role::R1).has_value());
}

TEST_CASE("role metrics survive cluster relabeling and edge-weight changes") {
  Rng rng(31);
  const EdgeList edges = random_graph(16, 0.3, 1.0, rng);
  const CoauthorNetwork net = net_of(16, edges);
  const Clustering clustering = cluster_network(net, 7);
  const auto metrics = classify_roles(net, clustering);

  Clustering relabeled = clustering;
  for (auto& a : relabeled.assignment) a = relabeled.cluster_count - 1 - a;  // id reversal
  const auto permuted = classify_roles(net, relabeled);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    CHECK(metrics[i].z == doctest::Approx(permuted[i].z));
    CHECK(metrics[i].participation == doctest::Approx(permuted[i].participation));
    CHECK(metrics[i].role == permuted[i].role);
  }

  EdgeList scaled = edges;
  for (auto& [u, v, w] : scaled) w *= 5.0;
  const auto rescaled = classify_roles(net_of(16, scaled), clustering);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    CHECK(metrics[i].role == rescaled[i].role);  // unweighted degree by default
  }

  // Fractions over classifiable nodes sum to one; per-cluster z means vanish.
  const RoleDistribution dist = role_distribution(metrics);
  if (dist.classifiable > 0) {
    double total = 0.0;
    for (Role r : {Role::R1, Role::R2, Role::R3, Role::R4, Role::R5, Role::R6, Role::R7}) {
      if (auto f = dist.fraction(r)) total += *f;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  std::map<std::uint32_t, std::pair<double, std::size_t>> mean_z;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].role == Role::unclassifiable) continue;
    auto& [sum, count] = mean_z[clustering.assignment[i]];
    sum += metrics[i].z;
    count += 1;
  }
  for (const auto& [cluster, acc] : mean_z) {
    CHECK(acc.first / static_cast<double>(acc.second) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("weighted degree mode uses strengths for z and p") {
  // Node 0 splits links 3-vs-1 by weight between two clusters.
  const EdgeList edges{{0, 1, 3.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}};
  const CoauthorNetwork net = net_of(4, edges);
  Clustering clustering;
  clustering.assignment = {0, 0, 1, 1};
  clustering.cluster_count = 2;

  RoleThresholds weighted;
  weighted.weighted_degree = true;
  const auto metrics = classify_roles(net, clustering, weighted);
  // k = 4, k_in = 3: p = 1 - (3/4)^2 - (1/4)^2 = 0.375.
  CHECK(metrics[0].participation == doctest::Approx(0.375));

  const auto unweighted = classify_roles(net, clustering);
  // Unweighted: k = 2 split evenly, p = 0.5.
  CHECK(unweighted[0].participation == doctest::Approx(0.5));
}

TEST_CASE("a missing assignment entry is an error") {
  const CoauthorNetwork net = net_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  Clustering short_clustering;
  short_clustering.assignment = {0, 0};
  short_clustering.cluster_count = 1;
  CHECK_THROWS_AS(classify_roles(net, short_clustering), Error);

  Clustering out_of_range;
  out_of_range.assignment = {0, 0, 3};
  out_of_range.cluster_count = 2;
  CHECK_THROWS_AS(classify_roles(net, out_of_range), Error);
}
