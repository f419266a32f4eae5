#include "homonet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "homonet/rng.hpp"

namespace homonet {

ClusteringComparison compare_partitions(const IdentityPartition& truth,
                                        const IdentityPartition& empirical) {
  std::map<std::string, std::size_t> true_of;
  for (std::size_t j = 0; j < truth.identities.size(); ++j) {
    for (const std::string& id : truth.identities[j]) {
      if (!true_of.emplace(id, j).second)
        throw Error("article listed twice in true partition: " + id);
    }
  }

  ClusteringComparison cmp;
  cmp.true_sizes.resize(truth.identities.size());
  for (std::size_t j = 0; j < truth.identities.size(); ++j) {
    cmp.true_sizes[j] = truth.identities[j].size();
  }
  cmp.empirical_sizes.resize(empirical.identities.size());

  std::size_t covered = 0;
  for (std::size_t i = 0; i < empirical.identities.size(); ++i) {
    cmp.empirical_sizes[i] = empirical.identities[i].size();
    for (const std::string& id : empirical.identities[i]) {
      auto it = true_of.find(id);
      if (it == true_of.end())
        throw Error("partitions cover different article sets at: " + id);
      cmp.overlap[{i, it->second}] += 1;
      ++covered;
    }
  }
  if (covered != true_of.size())
    throw Error("partitions cover different article sets");
  cmp.total_articles = covered;
  return cmp;
}

KScore k_score(const ClusteringComparison& cmp) {
  if (cmp.total_articles == 0) throw Error("cannot score an empty article set");
  const double n = static_cast<double>(cmp.total_articles);
  double acp = 0.0, aap = 0.0;
  for (const auto& [cell, count] : cmp.overlap) {
    const double sq = static_cast<double>(count) * static_cast<double>(count);
    acp += sq / static_cast<double>(cmp.empirical_sizes[cell.first]);
    aap += sq / static_cast<double>(cmp.true_sizes[cell.second]);
  }
  KScore score;
  score.acp = acp / n;
  score.aap = aap / n;
  score.k = std::sqrt(score.acp * score.aap);
  return score;
}

const char* error_type_name(ErrorType t) {
  switch (t) {
    case ErrorType::correct: return "Correct";
    case ErrorType::split: return "Split";
    case ErrorType::reduce: return "Reduce";
    case ErrorType::delete_: return "Delete";
  }
  return "Correct";
}

ErrorType classify_error(const std::vector<std::size_t>& true_identity_sizes) {
  if (true_identity_sizes.empty()) throw Error("cannot classify an empty partition");
  if (true_identity_sizes.size() == 1) return ErrorType::correct;
  std::size_t multi = 0;
  for (std::size_t s : true_identity_sizes) {
    if (s >= 2) ++multi;
  }
  if (multi >= 2) return ErrorType::split;
  if (multi == 1) return ErrorType::reduce;
  return ErrorType::delete_;
}

ErrorType classify_error(const IdentityPartition& truth) {
  std::vector<std::size_t> sizes;
  sizes.reserve(truth.identities.size());
  for (const auto& ids : truth.identities) sizes.push_back(ids.size());
  return classify_error(sizes);
}

double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double q) {
  if (value_weight.empty()) throw Error("weighted quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level outside [0, 1]");
  double total = 0.0;
  for (const auto& [v, w] : value_weight) {
    if (!(w > 0.0)) throw Error("weighted quantile needs positive weights");
    total += w;
  }
  std::sort(value_weight.begin(), value_weight.end());
  double cum = 0.0;
  for (const auto& [v, w] : value_weight) {
    cum += w;
    if (cum >= q * total - 1e-9 * total) return v;
  }
  return value_weight.back().first;
}

namespace {

QuantileRow quantile_row(const std::vector<std::pair<double, double>>& value_weight) {
  QuantileRow row;
  row.names = value_weight.size();
  if (value_weight.empty()) return row;
  row.median = weighted_quantile(value_weight, 0.5);
  row.q25 = weighted_quantile(value_weight, 0.25);
  row.minimum = value_weight.front().first;
  for (const auto& [v, w] : value_weight) {
    row.minimum = std::min(row.minimum, v);
    row.weight += w;
  }
  return row;
}

}  // namespace

EvaluationReport evaluate(const GroundTruth& truth,
                          const std::map<NameKey, IdentityPartition>& empirical,
                          const std::map<std::string, Role>* node_roles) {
  EvaluationReport report;
  for (ErrorType t : {ErrorType::correct, ErrorType::split, ErrorType::reduce,
                      ErrorType::delete_}) {
    report.error_counts[t] = 0;
  }

  std::vector<std::pair<double, double>> overall;
  std::map<Role, std::vector<std::pair<double, double>>> role_values;

  for (const auto& [key, true_partition] : truth) {
    auto emp_it = empirical.find(key);
    if (emp_it == empirical.end())
      throw Error("no empirical partition for name: " + key.display());
    ClusteringComparison cmp = compare_partitions(true_partition, emp_it->second);

    NameEvaluation ne;
    ne.key = key;
    ne.score = k_score(cmp);
    ne.articles = cmp.total_articles;
    ne.true_identities = cmp.true_sizes.size();
    ne.empirical_identities = cmp.empirical_sizes.size();

    std::vector<std::size_t> empirical_spread(cmp.true_sizes.size(), 0);
    std::vector<std::size_t> true_spread(cmp.empirical_sizes.size(), 0);
    for (const auto& [cell, count] : cmp.overlap) {
      true_spread[cell.first] += 1;
      empirical_spread[cell.second] += 1;
    }
    ne.over_split =
        std::any_of(empirical_spread.begin(), empirical_spread.end(),
                    [](std::size_t spread) { return spread >= 2; });
    ne.over_merged = std::any_of(true_spread.begin(), true_spread.end(),
                                 [](std::size_t spread) { return spread >= 2; });

    report.error_counts[classify_error(true_partition)] += 1;
    report.remaining.names += 1;
    if (ne.over_split && ne.over_merged)
      report.remaining.both += 1;
    else if (ne.over_split)
      report.remaining.over_split += 1;
    else if (ne.over_merged)
      report.remaining.over_merged += 1;
    else
      report.remaining.correct += 1;

    const double weight = static_cast<double>(ne.articles);
    overall.emplace_back(ne.score.k, weight);

    if (node_roles && !emp_it->second.identities.empty()) {
      auto role_it = node_roles->find(identity_label(key, 1));
      if (role_it != node_roles->end() && role_it->second != Role::unclassifiable) {
        role_values[role_it->second].emplace_back(ne.score.k, weight);
        auto& table = report.errors_by_role[role_it->second];
        table[classify_error(true_partition)] += 1;
      }
    }

    report.names.push_back(std::move(ne));
  }

  report.overall = quantile_row(overall);
  for (const auto& [role, values] : role_values) {
    report.by_role[role] = quantile_row(values);
  }
  return report;
}

CutoffResult learn_cutoff(const Corpus& corpus, const GroundTruth& truth,
                          const RedundancyTable& table, const CutoffSearch& search,
                          std::size_t threads) {
  if (truth.empty()) throw Error("cutoff learning needs a nonempty training set");
  if (search.min_cutoff > search.max_cutoff) throw Error("empty cutoff range");

  struct Candidate {
    int cutoff = 0;
    double objective = 0.0;
    double tie = 0.0;
  };
  const std::size_t count = static_cast<std::size_t>(search.max_cutoff - search.min_cutoff + 1);
  std::vector<Candidate> slots(count);

  auto score_cutoff = [&](std::size_t slot) {
    const int c = search.min_cutoff + static_cast<int>(slot);
    DisambigConfig config;
    config.low_redundancy_cutoff = c;
    config.use_self_citation = false;

    std::vector<std::pair<double, double>> values;
    values.reserve(truth.size());
    for (const auto& [key, true_partition] : truth) {
      IdentityPartition resolved = resolve_name(corpus, table, key, config);
      KScore score = k_score(compare_partitions(true_partition, resolved));
      values.emplace_back(score.k, static_cast<double>(corpus.articles_of(key).size()));
    }

    Candidate& out = slots[slot];
    out.cutoff = c;
    switch (search.objective) {
      case CutoffObjective::median:
        out.objective = weighted_quantile(values, 0.5);
        out.tie = weighted_quantile(values, 0.25);
        break;
      case CutoffObjective::q25:
        out.objective = weighted_quantile(values, 0.25);
        out.tie = weighted_quantile(values, 0.5);
        break;
      case CutoffObjective::mean: {
        double num = 0.0, den = 0.0;
        for (const auto& [v, w] : values) {
          num += v * w;
          den += w;
        }
        out.objective = num / den;
        out.tie = weighted_quantile(values, 0.25);
        break;
      }
    }
  };

  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) score_cutoff(i);
  } else {
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) score_cutoff(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  CutoffResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < count; ++i) {
    result.trace.emplace_back(slots[i].cutoff, slots[i].objective, slots[i].tie);
    // Ascending scan: equal (objective, tie) keeps the smaller cutoff.
    if (i > 0 && (slots[i].objective > slots[best].objective ||
                  (slots[i].objective == slots[best].objective &&
                   slots[i].tie > slots[best].tie))) {
      best = i;
    }
  }
  result.cutoff = slots[best].cutoff;
  result.objective_value = slots[best].objective;
  return result;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error("KS statistic needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

DistortionReport distortion_analysis(const CoauthorNetwork& net,
                                     const std::vector<NodeRoleMetrics>& metrics,
                                     const RedundancyTable& table) {
  if (metrics.size() != net.node_count()) throw Error("role metrics do not cover the network");

  DistortionReport report;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].role == Role::unclassifiable) continue;
    const std::string& label = net.nodes()[i].label;
    auto parsed = parse_identity_label(label);
    if (!parsed) throw Error("node label does not parse as an identity: " + label);
    report.raw_by_role[metrics[i].role].push_back(table.raw(parsed->first.last));
  }

  const Role all[] = {Role::R1, Role::R2, Role::R3, Role::R4, Role::R5, Role::R6, Role::R7};
  for (Role r : all) {
    if (!report.raw_by_role.count(r)) report.omitted.push_back(r);
  }
  for (auto ita = report.raw_by_role.begin(); ita != report.raw_by_role.end(); ++ita) {
    for (auto itb = std::next(ita); itb != report.raw_by_role.end(); ++itb) {
      std::vector<double> a(ita->second.begin(), ita->second.end());
      std::vector<double> b(itb->second.begin(), itb->second.end());
      double d = ks_statistic(std::move(a), std::move(b));
      report.ks[{ita->first, itb->first}] = d;
      report.score = std::max(report.score, d);
    }
  }
  return report;
}

std::map<Role, std::vector<std::string>> stratified_sample(
    const std::map<Role, std::vector<std::string>>& strata,
    const std::map<Role, std::size_t>& sizes, std::uint64_t seed) {
  std::map<Role, std::vector<std::string>> out;
  for (const auto& [role, want] : sizes) {
    std::vector<std::string> population =
        strata.count(role) ? strata.at(role) : std::vector<std::string>{};
    if (want > population.size())
      throw Error(std::string("sample size exceeds population for role ") + role_name(role));
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(role) * 0x9e37UL + 17));
    // Partial Fisher-Yates: the first `want` slots become the sample.
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_below(population.size() - i));
      std::swap(population[i], population[j]);
    }
    std::vector<std::string> sample(population.begin(),
                                    population.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(sample.begin(), sample.end());
    out.emplace(role, std::move(sample));
  }
  return out;
}

std::map<Role, std::vector<std::string>> stratified_sample(
    const CoauthorNetwork& net, const std::vector<NodeRoleMetrics>& metrics,
    const std::map<Role, std::size_t>& sizes, std::uint64_t seed) {
  if (metrics.size() != net.node_count()) throw Error("role metrics do not cover the network");

  std::map<Role, std::vector<std::string>> strata;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].role == Role::unclassifiable) continue;
    strata[metrics[i].role].push_back(net.nodes()[i].label);
  }
  return stratified_sample(strata, sizes, seed);
}

std::map<Role, std::size_t> reference_strata_sizes() {
  return {{Role::R1, 102}, {Role::R2, 102}, {Role::R3, 102}, {Role::R4, 89},
          {Role::R5, 72},  {Role::R6, 77},  {Role::R7, 28}};
}

std::size_t sample_size_for_proportion(std::size_t population, double margin, double z,
                                       double p) {
  if (population == 0) return 0;
  if (!(margin > 0.0) || !(z > 0.0) || !(p >= 0.0 && p <= 1.0))
    throw Error("invalid sample size parameters");
  const double big_n = static_cast<double>(population);
  const double zsq_pq = z * z * p * (1.0 - p);
  const double n = zsq_pq * big_n / ((big_n - 1.0) * margin * margin + zsq_pq);
  return static_cast<std::size_t>(std::ceil(n - 1e-12));
}

}  // namespace homonet
