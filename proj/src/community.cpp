#include "homonet/community.hpp"

#include <algorithm>
#include <cmath>

#include "homonet/rng.hpp"

namespace homonet {

namespace {

double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// One level of the aggregation hierarchy. Loop weights appear once nodes are
// merged; strength counts a loop twice (both endpoints).
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> loop;
  std::vector<double> strength;

  std::size_t size() const { return adj.size(); }
};

LevelGraph flat_graph(const CoauthorNetwork& net) {
  LevelGraph g;
  g.adj.resize(net.node_count());
  g.loop.assign(net.node_count(), 0.0);
  g.strength.assign(net.node_count(), 0.0);
  for (const NetworkEdge& e : net.edges()) {
    g.adj[e.u].emplace_back(e.v, static_cast<double>(e.weight));
    g.adj[e.v].emplace_back(e.u, static_cast<double>(e.weight));
    g.strength[e.u] += e.weight;
    g.strength[e.v] += e.weight;
  }
  return g;
}

// Insertion cost of a node into a module, evaluated after the node was
// removed from its own module; lower is better for both methods. For the map
// equation only the module-dependent codelength terms are compared, the
// node-visit entropy being partition-independent.
double insertion_cost(ClusterMethod method, double two_w, double e_m, double s_m,
                      double sum_e, double node_strength, double k_to_m, double node_loop) {
  if (method == ClusterMethod::map_equation) {
    double e_new = e_m + node_strength - 2.0 * k_to_m - 2.0 * node_loop;
    double s_new = s_m + node_strength;
    double sum_new = sum_e - e_m + e_new;
    double before = -2.0 * plogp(e_m / two_w) + plogp((e_m + s_m) / two_w);
    double after = -2.0 * plogp(e_new / two_w) + plogp((e_new + s_new) / two_w);
    return plogp(sum_new / two_w) + after - before;
  }
  // Negated modularity gain; candidate-independent terms dropped.
  return -(2.0 * k_to_m / two_w - node_strength * s_m / (two_w * two_w / 2.0));
}

struct LocalMoveResult {
  std::vector<std::uint32_t> module_of;
  bool merged = false;
};

LocalMoveResult local_move(const LevelGraph& g, ClusterMethod method, double two_w,
                           std::uint64_t seed, const ClusterOptions& opts) {
  const std::size_t n = g.size();
  LocalMoveResult result;
  result.module_of.resize(n);
  std::vector<double> S(n), E(n);
  double sum_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.module_of[i] = static_cast<std::uint32_t>(i);
    S[i] = g.strength[i];
    E[i] = g.strength[i] - 2.0 * g.loop[i];
    sum_e += E[i];
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<double> k_to(n, 0.0);  // scratch: node-to-module weights

  for (std::uint32_t pass = 0; pass < opts.max_passes; ++pass) {
    Rng rng(Rng::mix(seed, pass + 1));
    rng.shuffle(order);
    bool moved = false;

    for (std::size_t node : order) {
      if (g.adj[node].empty()) continue;
      const std::uint32_t home = result.module_of[node];

      std::vector<std::uint32_t> candidates;
      for (const auto& [nb, w] : g.adj[node]) {
        std::uint32_t m = result.module_of[nb];
        if (k_to[m] == 0.0 && m != home) candidates.push_back(m);
        k_to[m] += w;
      }
      candidates.push_back(home);
      // Ascending candidate order makes equal costs resolve to the lowest
      // module id, keeping runs deterministic.
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

      const double s = g.strength[node];
      const double l = g.loop[node];
      double e_home_removed = E[home] - s + 2.0 * k_to[home] + 2.0 * l;
      sum_e += e_home_removed - E[home];
      E[home] = e_home_removed;
      S[home] -= s;

      double best_cost = 0.0;
      double cost_home = 0.0;
      std::uint32_t best = home;
      bool first = true;
      for (std::uint32_t m : candidates) {
        double cost = insertion_cost(method, two_w, E[m], S[m], sum_e, s, k_to[m], l);
        if (m == home) cost_home = cost;
        if (first || cost < best_cost) {
          best_cost = cost;
          best = m;
          first = false;
        }
      }
      if (best != home && !(best_cost < cost_home - opts.min_gain)) best = home;

      double e_best_inserted = E[best] + s - 2.0 * k_to[best] - 2.0 * l;
      sum_e += e_best_inserted - E[best];
      E[best] = e_best_inserted;
      S[best] += s;
      result.module_of[node] = best;
      if (best != home) {
        moved = true;
        result.merged = true;
      }

      for (const auto& [nb, w] : g.adj[node]) k_to[result.module_of[nb]] = 0.0;
      k_to[home] = 0.0;
      k_to[best] = 0.0;
    }
    if (!moved) break;
  }
  return result;
}

// Renumbers module ids to 0..k-1 in order of smallest member index.
std::vector<std::uint32_t> compact_modules(const std::vector<std::uint32_t>& module_of,
                                           std::uint32_t* count_out) {
  std::map<std::uint32_t, std::uint32_t> first_member;
  for (std::uint32_t i = 0; i < module_of.size(); ++i) {
    first_member.try_emplace(module_of[i], i);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (first member, module)
  for (const auto& [m, first] : first_member) order.emplace_back(first, m);
  std::sort(order.begin(), order.end());
  std::map<std::uint32_t, std::uint32_t> renum;
  for (std::uint32_t i = 0; i < order.size(); ++i) renum[order[i].second] = i;
  std::vector<std::uint32_t> out(module_of.size());
  for (std::size_t i = 0; i < module_of.size(); ++i) out[i] = renum.at(module_of[i]);
  if (count_out) *count_out = static_cast<std::uint32_t>(order.size());
  return out;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& module_of,
                     std::uint32_t module_count) {
  LevelGraph out;
  out.adj.resize(module_count);
  out.loop.assign(module_count, 0.0);
  out.strength.assign(module_count, 0.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> weights;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::uint32_t mi = module_of[i];
    out.loop[mi] += g.loop[i];
    out.strength[mi] += g.strength[i];
    for (const auto& [nb, w] : g.adj[i]) {
      if (nb < i) continue;  // each undirected pair once
      std::uint32_t mj = module_of[nb];
      if (mi == mj) {
        out.loop[mi] += w;
      } else {
        weights[{std::min(mi, mj), std::max(mi, mj)}] += w;
      }
    }
  }
  for (const auto& [uv, w] : weights) {
    out.adj[uv.first].emplace_back(uv.second, w);
    out.adj[uv.second].emplace_back(uv.first, w);
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> Clustering::members() const {
  std::vector<std::vector<std::uint32_t>> out(cluster_count);
  for (std::uint32_t i = 0; i < assignment.size(); ++i) {
    out[assignment[i]].push_back(i);
  }
  return out;
}

Clustering cluster_network(const CoauthorNetwork& net, std::uint64_t seed,
                           const ClusterOptions& opts) {
  if (net.empty()) throw Error("cannot cluster an empty network");

  Clustering result;
  result.method = opts.method;

  double two_w = 0.0;
  for (const NetworkEdge& e : net.edges()) two_w += 2.0 * e.weight;

  std::vector<std::uint32_t> flat_assignment(net.node_count());
  if (two_w == 0.0) {
    for (std::uint32_t i = 0; i < flat_assignment.size(); ++i) flat_assignment[i] = i;
  } else {
    LevelGraph g = flat_graph(net);
    for (std::uint32_t i = 0; i < flat_assignment.size(); ++i) flat_assignment[i] = i;
    for (std::uint32_t level = 0;; ++level) {
      LocalMoveResult mv =
          local_move(g, opts.method, two_w, Rng::mix(seed, 0x1000 + level), opts);
      if (!mv.merged) break;
      std::uint32_t module_count = 0;
      std::vector<std::uint32_t> compact = compact_modules(mv.module_of, &module_count);
      for (auto& a : flat_assignment) a = compact[a];
      if (module_count == g.size()) break;
      g = aggregate(g, compact, module_count);
    }
  }

  result.assignment = compact_modules(flat_assignment, &result.cluster_count);
  result.quality = opts.method == ClusterMethod::map_equation
                       ? map_equation_codelength(net, result.assignment)
                       : modularity_score(net, result.assignment);
  return result;
}

double map_equation_codelength(const CoauthorNetwork& net,
                               const std::vector<std::uint32_t>& assignment) {
  if (assignment.size() != net.node_count()) throw Error("assignment size mismatch");
  double two_w = 0.0;
  for (const NetworkEdge& e : net.edges()) two_w += 2.0 * e.weight;
  if (two_w == 0.0) return 0.0;

  std::map<std::uint32_t, double> S, E;
  std::vector<double> strength(net.node_count(), 0.0);
  for (const NetworkEdge& e : net.edges()) {
    strength[e.u] += e.weight;
    strength[e.v] += e.weight;
    if (assignment[e.u] != assignment[e.v]) {
      E[assignment[e.u]] += e.weight;
      E[assignment[e.v]] += e.weight;
    }
  }
  for (std::size_t i = 0; i < net.node_count(); ++i) S[assignment[i]] += strength[i];

  double sum_e = 0.0;
  for (const auto& [m, e] : E) sum_e += e;
  double length = plogp(sum_e / two_w);
  for (const auto& [m, s] : S) {
    double e = E.count(m) ? E.at(m) : 0.0;
    length += -2.0 * plogp(e / two_w) + plogp((e + s) / two_w);
  }
  for (std::size_t i = 0; i < net.node_count(); ++i) length -= plogp(strength[i] / two_w);
  return length;
}

double modularity_score(const CoauthorNetwork& net,
                        const std::vector<std::uint32_t>& assignment) {
  if (assignment.size() != net.node_count()) throw Error("assignment size mismatch");
  double two_w = 0.0;
  for (const NetworkEdge& e : net.edges()) two_w += 2.0 * e.weight;
  if (two_w == 0.0) return 0.0;
  double w = two_w / 2.0;

  std::map<std::uint32_t, double> S, I;
  std::vector<double> strength(net.node_count(), 0.0);
  for (const NetworkEdge& e : net.edges()) {
    strength[e.u] += e.weight;
    strength[e.v] += e.weight;
    if (assignment[e.u] == assignment[e.v]) I[assignment[e.u]] += e.weight;
  }
  for (std::size_t i = 0; i < net.node_count(); ++i) S[assignment[i]] += strength[i];

  double q = 0.0;
  for (const auto& [m, s] : S) {
    double intra = I.count(m) ? I.at(m) : 0.0;
    q += intra / w - (s / two_w) * (s / two_w);
  }
  return q;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::R1: return "R1";
    case Role::R2: return "R2";
    case Role::R3: return "R3";
    case Role::R4: return "R4";
    case Role::R5: return "R5";
    case Role::R6: return "R6";
    case Role::R7: return "R7";
    case Role::unclassifiable: return "unclassifiable";
  }
  return "unclassifiable";
}

std::vector<NodeRoleMetrics> classify_roles(const CoauthorNetwork& net,
                                            const Clustering& clustering,
                                            const RoleThresholds& thresholds) {
  const std::size_t n = net.node_count();
  if (clustering.assignment.size() != n) throw Error("clustering does not cover the network");
  for (std::uint32_t c : clustering.assignment)
    if (c >= clustering.cluster_count) throw Error("cluster id out of range");

  // Within-cluster and per-cluster link counts; integers in both the
  // unweighted and the weighted variant, so zero spread is detected exactly.
  std::vector<double> k_total(n, 0.0), k_in(n, 0.0);
  std::vector<std::map<std::uint32_t, double>> k_by_cluster(n);
  for (const NetworkEdge& e : net.edges()) {
    double w = thresholds.weighted_degree ? static_cast<double>(e.weight) : 1.0;
    k_total[e.u] += w;
    k_total[e.v] += w;
    k_by_cluster[e.u][clustering.assignment[e.v]] += w;
    k_by_cluster[e.v][clustering.assignment[e.u]] += w;
    if (clustering.assignment[e.u] == clustering.assignment[e.v]) {
      k_in[e.u] += w;
      k_in[e.v] += w;
    }
  }

  std::vector<double> mean(clustering.cluster_count, 0.0);
  std::vector<double> sq(clustering.cluster_count, 0.0);
  std::vector<std::size_t> size(clustering.cluster_count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t c = clustering.assignment[i];
    mean[c] += k_in[i];
    sq[c] += k_in[i] * k_in[i];
    size[c] += 1;
  }
  std::vector<double> stddev(clustering.cluster_count, 0.0);
  for (std::uint32_t c = 0; c < clustering.cluster_count; ++c) {
    mean[c] /= static_cast<double>(size[c]);
    double var = sq[c] / static_cast<double>(size[c]) - mean[c] * mean[c];
    stddev[c] = var > 0.0 ? std::sqrt(var) : 0.0;
  }

  std::vector<NodeRoleMetrics> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t c = clustering.assignment[i];
    NodeRoleMetrics& m = out[i];
    if (k_total[i] > 0.0) {
      double sum = 0.0;
      for (const auto& [cluster, k] : k_by_cluster[i]) {
        double frac = k / k_total[i];
        sum += frac * frac;
      }
      m.participation = 1.0 - sum;
    }
    if (stddev[c] == 0.0) {
      m.role = Role::unclassifiable;
      continue;
    }
    m.z = (k_in[i] - mean[c]) / stddev[c];
    double p = m.participation;
    if (m.z >= thresholds.z_hub) {
      m.role = p <= thresholds.hub_p1 ? Role::R5 : p <= thresholds.hub_p2 ? Role::R6 : Role::R7;
    } else {
      m.role = p <= thresholds.nonhub_p1   ? Role::R1
               : p <= thresholds.nonhub_p2 ? Role::R2
               : p <= thresholds.nonhub_p3 ? Role::R3
                                           : Role::R4;
    }
  }
  return out;
}

RoleDistribution role_distribution(const std::vector<NodeRoleMetrics>& metrics) {
  RoleDistribution dist;
  for (Role r : {Role::R1, Role::R2, Role::R3, Role::R4, Role::R5, Role::R6, Role::R7,
                 Role::unclassifiable}) {
    dist.counts[r] = 0;
  }
  for (const NodeRoleMetrics& m : metrics) {
    dist.counts[m.role] += 1;
  }
  dist.total = metrics.size();
  dist.classifiable = dist.total - dist.counts[Role::unclassifiable];
  return dist;
}

std::optional<double> RoleDistribution::fraction(Role r) const {
  if (r == Role::unclassifiable || classifiable == 0) return std::nullopt;
  return static_cast<double>(counts.at(r)) / static_cast<double>(classifiable);
}

}  // namespace homonet
