#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "homonet/community.hpp"
#include "homonet/corpus.hpp"
#include "homonet/disambig.hpp"
#include "homonet/redundancy.hpp"

namespace homonet {

using GroundTruth = std::map<NameKey, IdentityPartition>;

// Overlap structure between a true and an empirical partition of the same
// article set for one name key.
struct ClusteringComparison {
  std::size_t total_articles = 0;
  std::vector<std::size_t> true_sizes;
  std::vector<std::size_t> empirical_sizes;
  // (empirical index, true index) -> shared article count; zero cells absent.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> overlap;
};

// Throws Error unless both partitions cover exactly the same article set.
ClusteringComparison compare_partitions(const IdentityPartition& truth,
                                        const IdentityPartition& empirical);

struct KScore {
  double acp = 0.0;  // average cluster purity
  double aap = 0.0;  // average author purity
  double k = 0.0;    // sqrt(acp * aap)
};

KScore k_score(const ClusteringComparison& cmp);

// What the undisambiguated one-node view of a name needs according to its
// true partition: nothing (correct), splitting into several multi-paper
// authors, shrinking to one multi-paper author, or removal (every true
// identity would fall to the one-paper filter).
enum class ErrorType {
  correct,
  split,   // >= 2 true identities hold >= 2 articles each
  reduce,  // exactly one true identity holds >= 2 articles, others exist
  delete_, // >= 2 true identities, none with >= 2 articles
};

const char* error_type_name(ErrorType t);

// Takes the true identity sizes of one name. Throws Error on empty input.
ErrorType classify_error(const std::vector<std::size_t>& true_identity_sizes);
ErrorType classify_error(const IdentityPartition& truth);

// Disjoint per-name counts: a name lands in exactly one bucket, so the four
// counts sum to names.
struct RemainingError {
  std::size_t over_split = 0;   // only defect: a true identity spread over >= 2 empirical
  std::size_t over_merged = 0;  // only defect: an empirical identity spanning >= 2 true
  std::size_t both = 0;
  std::size_t correct = 0;
  std::size_t names = 0;
};

struct NameEvaluation {
  NameKey key;
  KScore score;
  std::size_t articles = 0;
  std::size_t true_identities = 0;
  std::size_t empirical_identities = 0;
  bool over_split = false;
  bool over_merged = false;
};

struct QuantileRow {
  double median = 0.0;
  double q25 = 0.0;
  double minimum = 0.0;
  std::size_t names = 0;
  double weight = 0.0;
};

struct EvaluationReport {
  std::vector<NameEvaluation> names;  // sorted by key
  QuantileRow overall;                // article-count-weighted K quantiles
  std::map<ErrorType, std::size_t> error_counts;
  RemainingError remaining;
  // Per-role breakdown when node roles are supplied; the role of a name is
  // the role of its largest empirical identity's node, names without a
  // classified node skipped.
  std::map<Role, QuantileRow> by_role;
  std::map<Role, std::map<ErrorType, std::size_t>> errors_by_role;
};

// Evaluates an empirical identity map against ground truth. Every truth key
// needs an empirical partition (extra empirical keys are ignored); a missing
// one raises Error naming the key. node_roles maps network node label to
// role; pass nullptr to skip the per-role breakdown.
EvaluationReport evaluate(const GroundTruth& truth,
                          const std::map<NameKey, IdentityPartition>& empirical,
                          const std::map<std::string, Role>* node_roles = nullptr);

// Left-continuous weighted step quantile: smallest value whose cumulative
// normalized weight reaches q. Throws Error on empty input, q outside [0, 1],
// or a non-positive weight.
double weighted_quantile(std::vector<std::pair<double, double>> value_weight,
                         double q);

enum class CutoffObjective { median, q25, mean };

struct CutoffSearch {
  int min_cutoff = 0;
  int max_cutoff = 10;
  CutoffObjective objective = CutoffObjective::median;
};

struct CutoffResult {
  int cutoff = 0;
  double objective_value = 0.0;
  // Per-candidate (cutoff, objective, tie-break quartile) rows.
  std::vector<std::tuple<int, double, double>> trace;
};

// Learns the low-redundancy cutoff on a training corpus with ground truth.
// Candidate resolution uses co-author overlap only; per-name weights are the
// pre-disambiguation article counts. Ties prefer the higher 25% quantile,
// then the smaller cutoff.
CutoffResult learn_cutoff(const Corpus& corpus, const GroundTruth& truth,
                          const RedundancyTable& table,
                          const CutoffSearch& search = {},
                          std::size_t threads = 1);

// Two-sample Kolmogorov-Smirnov statistic between empirical distributions.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct DistortionReport {
  // Raw redundancy samples of the classified nodes, one vector per role.
  std::map<Role, std::vector<int>> raw_by_role;
  // Pairwise KS statistics over roles with nonempty samples.
  std::map<std::pair<Role, Role>, double> ks;
  double score = 0.0;  // max pairwise KS; 0 when < 2 roles have samples
  std::vector<Role> omitted;  // roles with no samples
};

// Compares the redundancy mix across node roles: a structurally unbiased
// network shows similar last-name redundancy in every role.
DistortionReport distortion_analysis(const CoauthorNetwork& net,
                                     const std::vector<NodeRoleMetrics>& metrics,
                                     const RedundancyTable& table);

// Uniform per-stratum sampling without replacement; deterministic under seed,
// sampled labels returned sorted. A request exceeding a stratum's population
// raises Error naming the role.
std::map<Role, std::vector<std::string>> stratified_sample(
    const std::map<Role, std::vector<std::string>>& strata,
    const std::map<Role, std::size_t>& sizes, std::uint64_t seed);

// Strata taken from the classified nodes of a network.
std::map<Role, std::vector<std::string>> stratified_sample(
    const CoauthorNetwork& net, const std::vector<NodeRoleMetrics>& metrics,
    const std::map<Role, std::size_t>& sizes, std::uint64_t seed);

// Stratum sizes used in the reference survey (R1..R7).
std::map<Role, std::size_t> reference_strata_sizes();

// Finite-population sample size (Rea-Parker): smallest n whose margin of
// error at the given confidence reaches C for a proportion p.
std::size_t sample_size_for_proportion(std::size_t population, double margin = 0.10,
                                       double z = 1.96, double p = 0.5);

}  // namespace homonet
