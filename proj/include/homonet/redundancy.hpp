#pragma once

#include <map>
#include <string>
#include <vector>

#include "homonet/corpus.hpp"

namespace homonet {

struct RedundancyOptions {
  // Weight the raw-redundancy CDF by author instances (one per record/author
  // occurrence) instead of once per distinct last name.
  bool occurrence_weighted = false;
  // Article redundancy multiplies s over distinct last names of a record;
  // set false to multiply once per author instead.
  bool distinct_last_names = true;
};

// Last-name commonality statistics. raw(L) counts the distinct initials
// variants seen with last name L; s(L) = Pr[X <= raw(L)] where X is the raw
// redundancy of a last name drawn from the corpus population. Common last
// names score near 1, rare ones near 0. Immutable after build.
class RedundancyTable {
 public:
  int raw(const std::string& last) const;  // throws Error on unknown last name
  double s(const std::string& last) const;
  bool contains(const std::string& last) const;

  // Empirical Pr[X <= r]; 0 below the smallest observed raw redundancy.
  double cdf(int r) const;

  const std::map<std::string, int>& raw_counts() const { return raw_; }
  // (r, Pr[X <= r]) at each observed r, ascending.
  const std::vector<std::pair<int, double>>& cdf_steps() const { return cdf_; }
  int max_raw() const;

 private:
  friend RedundancyTable build_redundancy_table(const Corpus&, const RedundancyOptions&);
  std::map<std::string, int> raw_;
  std::map<std::string, double> s_;
  std::vector<std::pair<int, double>> cdf_;
};

// Throws Error on an empty corpus.
RedundancyTable build_redundancy_table(const Corpus& corpus, const RedundancyOptions& opts = {});

// Product of s over the record's last names; in (0, 1]. Throws Error when a
// last name is missing from the table (table/corpus mismatch).
double article_redundancy(const RedundancyTable& table, const PublicationRecord& record,
                          const RedundancyOptions& opts = {});

// Mean article redundancy over articles_of(corpus, key). Throws Error for an
// unseen key.
double average_article_redundancy(const RedundancyTable& table, const Corpus& corpus,
                                  const NameKey& key, const RedundancyOptions& opts = {});

}  // namespace homonet
