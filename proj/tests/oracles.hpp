#pragma once

// Reference implementations for cross-checking, kept deliberately naive and
// written along different routes than the library: purity scores by ordered
// article pairs, clustering objectives by entropy sums and dense matrices,
// quantiles by scanning a sorted copy. Frozen; the library must match them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homonet/rng.hpp"

namespace oracles {

using Partition = std::vector<std::vector<std::string>>;

struct PairwiseScores {
  double acp = 0.0;
  double aap = 0.0;
  double k = 0.0;
};

// Purity via ordered article pairs: a pair (a, b) sharing both its empirical
// and its true cluster contributes 1/|empirical cluster| to the ACP sum and
// 1/|true cluster| to the AAP sum; both normalize by the article count.
inline PairwiseScores pairwise_scores(const Partition& truth, const Partition& empirical) {
  std::map<std::string, std::size_t> true_of, emp_of;
  std::vector<std::size_t> true_size, emp_size;
  for (const auto& cluster : truth) {
    for (const auto& article : cluster) true_of[article] = true_size.size();
    true_size.push_back(cluster.size());
  }
  for (const auto& cluster : empirical) {
    for (const auto& article : cluster) emp_of[article] = emp_size.size();
    emp_size.push_back(cluster.size());
  }

  std::vector<std::string> articles;
  for (const auto& [article, idx] : true_of) articles.push_back(article);

  double acp_sum = 0.0;
  double aap_sum = 0.0;
  for (const auto& a : articles) {
    for (const auto& b : articles) {
      if (emp_of.at(a) != emp_of.at(b) || true_of.at(a) != true_of.at(b)) continue;
      acp_sum += 1.0 / static_cast<double>(emp_size[emp_of.at(a)]);
      aap_sum += 1.0 / static_cast<double>(true_size[true_of.at(a)]);
    }
  }
  PairwiseScores out;
  const double n = static_cast<double>(articles.size());
  out.acp = acp_sum / n;
  out.aap = aap_sum / n;
  out.k = std::sqrt(out.acp * out.aap);
  return out;
}

// Random set partition of the given articles: each article draws a slot,
// nonempty slots become clusters. Any distribution is fine here; this one
// reaches every partition shape.
inline Partition random_partition(const std::vector<std::string>& articles, homonet::Rng& rng) {
  std::vector<std::vector<std::string>> slots(articles.size());
  for (const auto& article : articles) {
    slots[static_cast<std::size_t>(rng.next_below(articles.size()))].push_back(article);
  }
  Partition out;
  for (auto& slot : slots) {
    if (!slot.empty()) out.push_back(std::move(slot));
  }
  return out;
}

// Dense-matrix modularity: Q = (1/2W) sum_ij (A_ij - s_i s_j / 2W) [c_i = c_j].
inline double dense_modularity(std::size_t n,
                               const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                               const std::vector<std::uint32_t>& assignment) {
  std::vector<std::vector<double>> adj(n, std::vector<double>(n, 0.0));
  for (const auto& [u, v, w] : edges) {
    adj[u][v] += w;
    adj[v][u] += w;
  }
  std::vector<double> strength(n, 0.0);
  double two_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) strength[i] += adj[i][j];
    two_w += strength[i];
  }
  if (two_w == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (assignment[i] != assignment[j]) continue;
      q += adj[i][j] - strength[i] * strength[j] / two_w;
    }
  }
  return q / two_w;
}

// Map equation in its entropy form: L = q H(Q) + sum_m p_m H(P_m), with exit
// probabilities q_m = E_m / 2W and visit probabilities p_a = s_a / 2W.
inline double entropy_map_equation(
    std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
    const std::vector<std::uint32_t>& assignment) {
  std::vector<double> strength(n, 0.0);
  std::map<std::uint32_t, double> exit_w, module_strength;
  double two_w = 0.0;
  for (const auto& [u, v, w] : edges) {
    strength[u] += w;
    strength[v] += w;
    two_w += 2.0 * w;
    if (assignment[u] != assignment[v]) {
      exit_w[assignment[u]] += w;
      exit_w[assignment[v]] += w;
    }
  }
  if (two_w == 0.0) return 0.0;
  for (std::size_t i = 0; i < n; ++i) module_strength[assignment[i]] += strength[i];

  const auto h = [](const std::vector<double>& probs) {
    double sum = 0.0;
    for (double p : probs) sum += p;
    double ent = 0.0;
    for (double p : probs) {
      if (p > 0.0) ent -= (p / sum) * std::log2(p / sum);
    }
    return ent;
  };

  double q_total = 0.0;
  std::vector<double> exits;
  for (const auto& [m, s] : module_strength) {
    const double q_m = (exit_w.count(m) ? exit_w.at(m) : 0.0) / two_w;
    q_total += q_m;
    exits.push_back(q_m);
  }
  double codelength = 0.0;
  if (q_total > 0.0) codelength += q_total * h(exits);
  for (const auto& [m, s] : module_strength) {
    const double q_m = (exit_w.count(m) ? exit_w.at(m) : 0.0) / two_w;
    std::vector<double> probs{q_m};
    for (std::size_t i = 0; i < n; ++i) {
      if (assignment[i] == m) probs.push_back(strength[i] / two_w);
    }
    codelength += (q_m + module_strength.at(m) / two_w) * h(probs);
  }
  return codelength;
}

// Enumerates every set partition of n nodes (restricted growth strings) and
// returns the best score under the given objective.
template <typename Score>
double best_partition_score(std::size_t n, Score score, bool maximize) {
  std::vector<std::uint32_t> rgs(n, 0);
  double best = score(rgs);
  for (;;) {
    // Next restricted growth string: rightmost position that can still grow.
    bool advanced = false;
    for (std::size_t i = n; i-- > 1;) {
      std::uint32_t max_prefix = 0;
      for (std::size_t j = 0; j < i; ++j) max_prefix = std::max(max_prefix, rgs[j]);
      if (rgs[i] <= max_prefix) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        advanced = true;
        break;
      }
      rgs[i] = 0;
    }
    if (!advanced) break;
    const double s = score(rgs);
    if (maximize ? (s > best) : (s < best)) best = s;
  }
  return best;
}

// Left-continuous step quantile of equally weighted values: the smallest
// sorted value whose rank fraction reaches q.
inline double plain_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (static_cast<double>(i + 1) / n >= q - 1e-12) return values[i];
  }
  return values.back();
}

}  // namespace oracles
