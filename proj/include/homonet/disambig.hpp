#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homonet/corpus.hpp"
#include "homonet/redundancy.hpp"

namespace homonet {

enum class Evidence : unsigned {
  coauthor_overlap = 1,
  self_citation = 2,
  both = 3,
};

struct DisambigConfig {
  int low_redundancy_cutoff = 3;
  bool use_self_citation = true;
  bool use_coauthor_overlap = true;
  // Overlap normally matches co-authors by last name alone; this requires the
  // full (last, initials) key to match instead.
  bool strict_namekey_match = false;
};

// Evidence graph over the articles of one name key. An overlap edge links two
// articles sharing at least one co-author last name other than the focal key's
// own last name; a self-citation edge links two articles where either cites
// the other.
struct ArticleGraph {
  NameKey key;
  std::vector<std::string> nodes;  // sorted article ids
  std::map<std::pair<std::size_t, std::size_t>, Evidence> edges;  // (i, j), i < j
};

// Disjoint article groups, one per resolved individual. Canonical order:
// identities by (size descending, smallest article id ascending), ids sorted
// within each identity.
struct IdentityPartition {
  NameKey key;
  std::vector<std::vector<std::string>> identities;

  void canonicalize();
  std::size_t article_count() const;
  bool operator==(const IdentityPartition&) const = default;
};

// "WANG_CH#2"; index is 1-based and follows the canonical identity order.
std::string identity_label(const NameKey& key, std::size_t index);
std::optional<std::pair<NameKey, std::size_t>> parse_identity_label(std::string_view label);

ArticleGraph build_article_graph(const Corpus& corpus, const NameKey& key,
                                 const DisambigConfig& config = {});

// Names whose last-name raw redundancy is at or below the cutoff resolve to a
// single identity without looking at evidence; all others resolve to the
// connected components of their article graph.
IdentityPartition resolve_name(const Corpus& corpus, const RedundancyTable& table,
                               const NameKey& key, const DisambigConfig& config = {});

// One partition per distinct name key. Blocks are independent; with
// threads > 1 they are processed in parallel with deterministic output.
std::map<NameKey, IdentityPartition> resolve_corpus(const Corpus& corpus,
                                                    const RedundancyTable& table,
                                                    const DisambigConfig& config = {},
                                                    unsigned threads = 1);

// The undisambiguated view: every key's articles as one identity.
std::map<NameKey, IdentityPartition> trivial_identities(const Corpus& corpus);

// JSONL, one line per key: {"last":..., "initials":..., "identities":[[ids]...]}.
// Identities appear in canonical order, so line position k corresponds to
// identity_label(key, k+1). The same format serves as the ground-truth format.
void serialize_identities(const std::map<NameKey, IdentityPartition>& identities,
                          std::ostream& out);
void serialize_identities_file(const std::map<NameKey, IdentityPartition>& identities,
                               const std::string& path);
std::map<NameKey, IdentityPartition> parse_identities(std::istream& in);
std::map<NameKey, IdentityPartition> parse_identities_file(const std::string& path);

}  // namespace homonet
