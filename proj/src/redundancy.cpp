#include "homonet/redundancy.hpp"

#include <algorithm>
#include <set>

namespace homonet {

int RedundancyTable::raw(const std::string& last) const {
  auto it = raw_.find(last);
  if (it == raw_.end()) throw Error("last name not in redundancy table: " + last);
  return it->second;
}

double RedundancyTable::s(const std::string& last) const {
  auto it = s_.find(last);
  if (it == s_.end()) throw Error("last name not in redundancy table: " + last);
  return it->second;
}

bool RedundancyTable::contains(const std::string& last) const { return raw_.count(last) != 0; }

double RedundancyTable::cdf(int r) const {
  double value = 0.0;
  for (const auto& [step, p] : cdf_) {
    if (step > r) break;
    value = p;
  }
  return value;
}

int RedundancyTable::max_raw() const { return cdf_.empty() ? 0 : cdf_.back().first; }

RedundancyTable build_redundancy_table(const Corpus& corpus, const RedundancyOptions& opts) {
  if (corpus.empty()) throw Error("cannot build redundancy table from an empty corpus");

  RedundancyTable table;
  std::map<std::string, std::set<std::string>> variants;
  for (const auto& [key, ids] : corpus.name_index()) {
    variants[key.last].insert(key.initials);
  }
  for (const auto& [last, inis] : variants) {
    table.raw_[last] = static_cast<int>(inis.size());
  }

  // Population weight per last name: 1, or its author-occurrence count.
  std::map<std::string, double> weight;
  if (opts.occurrence_weighted) {
    for (const PublicationRecord& rec : corpus.records()) {
      for (const NameKey& key : rec.authors) weight[key.last] += 1.0;
    }
  } else {
    for (const auto& [last, r] : table.raw_) weight[last] = 1.0;
  }

  std::map<int, double> mass;
  double total = 0.0;
  for (const auto& [last, w] : weight) {
    mass[table.raw_.at(last)] += w;
    total += w;
  }
  double cum = 0.0;
  for (const auto& [r, m] : mass) {
    cum += m;
    table.cdf_.emplace_back(r, cum / total);
  }
  if (!table.cdf_.empty()) table.cdf_.back().second = 1.0;

  for (const auto& [last, r] : table.raw_) {
    table.s_[last] = table.cdf(r);
  }
  return table;
}

double article_redundancy(const RedundancyTable& table, const PublicationRecord& record,
                          const RedundancyOptions& opts) {
  double product = 1.0;
  if (opts.distinct_last_names) {
    std::set<std::string> lasts;
    for (const NameKey& key : record.authors) lasts.insert(key.last);
    for (const std::string& last : lasts) product *= table.s(last);
  } else {
    for (const NameKey& key : record.authors) product *= table.s(key.last);
  }
  return product;
}

double average_article_redundancy(const RedundancyTable& table, const Corpus& corpus,
                                  const NameKey& key, const RedundancyOptions& opts) {
  std::vector<std::string> ids = corpus.articles_of(key);
  if (ids.empty()) throw Error("name key has no articles: " + key.display());
  double sum = 0.0;
  for (const std::string& id : ids) {
    sum += article_redundancy(table, corpus.at(id), opts);
  }
  return sum / static_cast<double>(ids.size());
}

}  // namespace homonet
