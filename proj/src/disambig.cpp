#include "homonet/disambig.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "homonet/union_find.hpp"

namespace homonet {

void IdentityPartition::canonicalize() {
  for (auto& ids : identities) std::sort(ids.begin(), ids.end());
  std::sort(identities.begin(), identities.end(),
            [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a.front() < b.front();
            });
}

std::size_t IdentityPartition::article_count() const {
  std::size_t n = 0;
  for (const auto& ids : identities) n += ids.size();
  return n;
}

std::string identity_label(const NameKey& key, std::size_t index) {
  return key.last + "_" + key.initials + "#" + std::to_string(index);
}

std::optional<std::pair<NameKey, std::size_t>> parse_identity_label(std::string_view label) {
  // Parsed from the right so underscores inside last names stay unambiguous.
  std::size_t hash = label.rfind('#');
  if (hash == std::string_view::npos || hash + 1 == label.size()) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t i = hash + 1; i < label.size(); ++i) {
    char c = label[i];
    if (c < '0' || c > '9') return std::nullopt;
    index = index * 10 + static_cast<std::size_t>(c - '0');
  }
  if (index == 0) return std::nullopt;
  std::size_t underscore = label.rfind('_', hash);
  if (underscore == std::string_view::npos || underscore == 0) return std::nullopt;
  NameKey key;
  key.last = std::string(label.substr(0, underscore));
  key.initials = std::string(label.substr(underscore + 1, hash - underscore - 1));
  return std::make_pair(std::move(key), index);
}

ArticleGraph build_article_graph(const Corpus& corpus, const NameKey& key,
                                 const DisambigConfig& config) {
  if (!corpus.contains_key(key))
    throw Error("name key not in corpus: " + key.display());
  ArticleGraph graph;
  graph.key = key;
  graph.nodes = corpus.articles_of(key);
  const std::size_t n = graph.nodes.size();

  auto add_edge = [&graph](std::size_t i, std::size_t j, Evidence ev) {
    if (i > j) std::swap(i, j);
    auto [it, inserted] = graph.edges.emplace(std::make_pair(i, j), ev);
    if (!inserted) {
      it->second = static_cast<Evidence>(static_cast<unsigned>(it->second) |
                                         static_cast<unsigned>(ev));
    }
  };

  if (config.use_coauthor_overlap) {
    // Co-author fingerprints; the focal key's own last name never counts as
    // evidence, so a second homonym on a paper cannot link articles.
    std::vector<std::set<std::string>> lasts(n);
    std::vector<std::set<NameKey>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const PublicationRecord& rec = corpus.at(graph.nodes[i]);
      for (const NameKey& author : rec.authors) {
        if (author.last == key.last) continue;
        if (config.strict_namekey_match)
          keys[i].insert(author);
        else
          lasts[i].insert(author.last);
      }
    }
    auto intersects = [](const auto& a, const auto& b) {
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
          ++ia;
        else if (*ib < *ia)
          ++ib;
        else
          return true;
      }
      return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        bool hit = config.strict_namekey_match ? intersects(keys[i], keys[j])
                                               : intersects(lasts[i], lasts[j]);
        if (hit) add_edge(i, j, Evidence::coauthor_overlap);
      }
    }
  }

  if (config.use_self_citation) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(graph.nodes[i], i);
    for (std::size_t i = 0; i < n; ++i) {
      for (const std::string& cited : corpus.at(graph.nodes[i]).cites) {
        auto it = index.find(cited);
        if (it != index.end() && it->second != i) {
          add_edge(i, it->second, Evidence::self_citation);
        }
      }
    }
  }

  return graph;
}

IdentityPartition resolve_name(const Corpus& corpus, const RedundancyTable& table,
                               const NameKey& key, const DisambigConfig& config) {
  IdentityPartition partition;
  partition.key = key;
  std::vector<std::string> articles = corpus.articles_of(key);
  if (articles.empty()) return partition;

  if (table.raw(key.last) <= config.low_redundancy_cutoff) {
    partition.identities.push_back(std::move(articles));
    partition.canonicalize();
    return partition;
  }

  ArticleGraph graph = build_article_graph(corpus, key, config);
  UnionFind uf(graph.nodes.size());
  for (const auto& [edge, ev] : graph.edges) uf.unite(edge.first, edge.second);

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    groups[uf.find(i)].push_back(graph.nodes[i]);
  }
  for (auto& [root, ids] : groups) partition.identities.push_back(std::move(ids));
  partition.canonicalize();
  return partition;
}

std::map<NameKey, IdentityPartition> resolve_corpus(const Corpus& corpus,
                                                    const RedundancyTable& table,
                                                    const DisambigConfig& config,
                                                    unsigned threads) {
  std::vector<NameKey> keys;
  keys.reserve(corpus.name_index().size());
  for (const auto& [key, ids] : corpus.name_index()) keys.push_back(key);

  std::vector<IdentityPartition> slots(keys.size());
  if (threads <= 1 || keys.size() < 2) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      slots[i] = resolve_name(corpus, table, keys[i], config);
    }
  } else {
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(keys.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < keys.size(); i += workers) {
            slots[i] = resolve_name(corpus, table, keys[i], config);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::map<NameKey, IdentityPartition> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out.emplace(keys[i], std::move(slots[i]));
  }
  return out;
}

std::map<NameKey, IdentityPartition> trivial_identities(const Corpus& corpus) {
  std::map<NameKey, IdentityPartition> out;
  for (const auto& [key, ids] : corpus.name_index()) {
    IdentityPartition partition;
    partition.key = key;
    partition.identities.push_back(ids);
    out.emplace(key, std::move(partition));
  }
  return out;
}

void serialize_identities(const std::map<NameKey, IdentityPartition>& identities,
                          std::ostream& out) {
  for (const auto& [key, partition] : identities) {
    nlohmann::ordered_json obj;
    obj["last"] = key.last;
    obj["initials"] = key.initials;
    obj["identities"] = partition.identities;
    out << obj.dump() << '\n';
  }
}

void serialize_identities_file(const std::map<NameKey, IdentityPartition>& identities,
                               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  serialize_identities(identities, out);
}

std::map<NameKey, IdentityPartition> parse_identities(std::istream& in) {
  using nlohmann::json;
  std::map<NameKey, IdentityPartition> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError(lineno, "invalid JSON object");
    if (!obj.contains("last") || !obj["last"].is_string())
      throw ParseError(lineno, "missing or invalid \"last\"");
    std::string initials;
    if (obj.contains("initials")) {
      if (!obj["initials"].is_string()) throw ParseError(lineno, "\"initials\" must be a string");
      initials = obj["initials"].get<std::string>();
    }
    NameKey key;
    try {
      key = NameKey::normalized(obj["last"].get<std::string>(), initials);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    if (out.count(key)) throw ParseError(lineno, "duplicate name key: " + key.display());
    if (!obj.contains("identities") || !obj["identities"].is_array())
      throw ParseError(lineno, "missing or invalid \"identities\"");
    IdentityPartition partition;
    partition.key = key;
    std::set<std::string> seen;
    for (const json& group : obj["identities"]) {
      if (!group.is_array() || group.empty())
        throw ParseError(lineno, "identities must be nonempty arrays of article ids");
      std::vector<std::string> ids;
      for (const json& id : group) {
        if (!id.is_string()) throw ParseError(lineno, "article ids must be strings");
        std::string s = id.get<std::string>();
        if (!seen.insert(s).second)
          throw ParseError(lineno, "article listed twice for one name: " + s);
        ids.push_back(std::move(s));
      }
      partition.identities.push_back(std::move(ids));
    }
    partition.canonicalize();
    out.emplace(key, std::move(partition));
  }
  return out;
}

std::map<NameKey, IdentityPartition> parse_identities_file(const std::string& path) {
  if (path == "-") return parse_identities(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  return parse_identities(in);
}

}  // namespace homonet
