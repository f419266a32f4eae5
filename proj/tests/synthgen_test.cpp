#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homonet/disambig.hpp"
#include "homonet/evaluation.hpp"
#include "homonet/io_util.hpp"
#include "homonet/redundancy.hpp"
#include "homonet/synthgen.hpp"

using namespace homonet;

namespace {

std::string corpus_bytes(const Corpus& corpus) {
  std::ostringstream out;
  serialize_corpus(corpus, out);
  return out.str();
}

// Last names of key's co-authors over the identity's articles, excluding
// key's own last name.
std::set<std::string> coauthor_lasts(const Corpus& corpus, const NameKey& key,
                                     const std::vector<std::string>& articles) {
  std::set<std::string> lasts;
  for (const std::string& id : articles) {
    for (const NameKey& author : corpus.at(id).authors) {
      if (author.last != key.last) lasts.insert(author.last);
    }
  }
  return lasts;
}

}  // namespace

TEST_CASE("truth partitions cover the corpus name index exactly") {
  SynthSpec spec;
  spec.n_identities = 80;
  spec.seed = 7;
  const SynthResult result = generate_synthetic(spec);
  REQUIRE_FALSE(result.corpus.empty());

  REQUIRE(result.truth.size() == result.corpus.name_index().size());
  for (const auto& [key, articles] : result.corpus.name_index()) {
    REQUIRE(result.truth.count(key) == 1);
    const IdentityPartition& partition = result.truth.at(key);
    std::vector<std::string> covered;
    for (const auto& identity : partition.identities) {
      covered.insert(covered.end(), identity.begin(), identity.end());
    }
    std::sort(covered.begin(), covered.end());
    CHECK(covered == articles);
  }

  // identity_articles keys match the truth labels one-to-one.
  std::size_t labels = 0;
  for (const auto& [key, partition] : result.truth) {
    for (std::size_t i = 1; i <= partition.identities.size(); ++i) {
      REQUIRE(result.identity_articles.count(identity_label(key, i)) == 1);
      CHECK(result.identity_articles.at(identity_label(key, i)) ==
            partition.identities[i - 1]);
      ++labels;
    }
  }
  CHECK(labels == result.identity_articles.size());
}

TEST_CASE("papers per identity respect the configured range") {
  SynthSpec spec;
  spec.n_identities = 60;
  spec.papers_min = 2;
  spec.papers_max = 4;
  spec.team_min = 3;
  spec.team_max = 3;
  spec.seed = 11;
  const SynthResult result = generate_synthetic(spec);
  // With full stability an identity appears on every team paper: between
  // team_size * papers_min and team_size * papers_max articles.
  for (const auto& [label, articles] : result.identity_articles) {
    CHECK(articles.size() >= 3 * 2);
    CHECK(articles.size() <= 3 * 4);
  }
}

TEST_CASE("a clean corpus is recovered exactly by the evidence pipeline") {
  SynthSpec spec;
  spec.n_identities = 60;
  spec.homonym_rate = 0.0;
  spec.coauthor_stability = 1.0;
  spec.seed = 3;
  const SynthResult result = generate_synthetic(spec);
  const RedundancyTable table = build_redundancy_table(result.corpus);
  const auto empirical = resolve_corpus(result.corpus, table);

  const EvaluationReport report = evaluate(result.truth, empirical);
  CHECK(report.overall.median == doctest::Approx(1.0));
  CHECK(report.overall.minimum == doctest::Approx(1.0));
  CHECK(report.remaining.correct == report.remaining.names);
}

TEST_CASE("a positive homonym rate plants at least one shared key") {
  SynthSpec spec;
  spec.n_identities = 100;
  spec.homonym_rate = 0.3;
  spec.seed = 5;
  const SynthResult result = generate_synthetic(spec);
  std::size_t homonym_names = 0;
  for (const auto& [key, partition] : result.truth) {
    if (partition.identities.size() >= 2) ++homonym_names;
  }
  CHECK(homonym_names >= 1);
}

TEST_CASE("unstable teams never put one key on a paper twice") {
  SynthSpec spec;
  spec.n_identities = 2000;
  spec.homonym_rate = 0.2;
  spec.coauthor_stability = 0.5;
  spec.name_model = NameModel::heavy_tailed;
  spec.disjoint_homonym_teams = true;
  spec.seed = 2;
  const SynthResult result = generate_synthetic(spec);
  for (const auto& record : result.corpus.records()) {
    std::set<NameKey> keys(record.authors.begin(), record.authors.end());
    CHECK(keys.size() == record.authors.size());
  }
  // Consequently no article can sit in two identities of one name.
  for (const auto& [key, partition] : result.truth) {
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& identity : partition.identities) {
      seen.insert(identity.begin(), identity.end());
      total += identity.size();
    }
    CHECK(seen.size() == total);
  }
}

TEST_CASE("full guest locality confines co-authorship to fields of ten teams") {
  SynthSpec spec;
  spec.n_identities = 400;
  spec.coauthor_stability = 0.5;
  spec.guest_locality = 1.0;
  spec.seed = 9;
  const SynthResult local = generate_synthetic(spec);

  // Union identities over shared articles; with guests confined to a field
  // (10 teams), no component can exceed one field's identity count.
  auto component_sizes = [](const SynthResult& result) {
    std::map<std::string, std::vector<std::string>> by_article;
    for (const auto& [label, articles] : result.identity_articles)
      for (const auto& id : articles) by_article[id].push_back(label);
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
      auto it = parent.find(x);
      if (it == parent.end() || it->second == x) return x;
      return it->second = find(it->second);
    };
    for (const auto& [label, articles] : result.identity_articles) parent[label] = label;
    for (const auto& [id, labels] : by_article)
      for (const auto& label : labels) parent[find(label)] = find(labels.front());
    std::map<std::string, std::size_t> sizes;
    for (const auto& [label, articles] : result.identity_articles) sizes[find(label)] += 1;
    std::vector<std::size_t> out;
    for (const auto& [root, size] : sizes) out.push_back(size);
    return out;
  };

  const auto local_sizes = component_sizes(local);
  const std::size_t field_bound = 10 * (spec.team_max + spec.team_min);
  CHECK(local_sizes.size() >= 2);
  for (std::size_t size : local_sizes) CHECK(size <= field_bound);

  spec.guest_locality = 0.0;
  const auto global_sizes = component_sizes(generate_synthetic(spec));
  CHECK(*std::max_element(global_sizes.begin(), global_sizes.end()) > field_bound);

  spec.guest_locality = 1.5;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);
}

TEST_CASE("disjoint homonym teams keep merged blocks separable by overlap") {
  SynthSpec spec;
  spec.n_identities = 120;
  spec.homonym_rate = 0.4;
  spec.coauthor_stability = 1.0;
  spec.disjoint_homonym_teams = true;
  spec.seed = 13;
  const SynthResult result = generate_synthetic(spec);

  std::size_t homonym_names = 0;
  for (const auto& [key, partition] : result.truth) {
    if (partition.identities.size() < 2) continue;
    ++homonym_names;
    for (std::size_t i = 0; i < partition.identities.size(); ++i) {
      for (std::size_t j = i + 1; j < partition.identities.size(); ++j) {
        const auto a = coauthor_lasts(result.corpus, key, partition.identities[i]);
        const auto b = coauthor_lasts(result.corpus, key, partition.identities[j]);
        std::vector<std::string> shared;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(shared));
        CHECK(shared.empty());
      }
    }
  }
  REQUIRE(homonym_names >= 1);

  // Forcing evidence-based resolution everywhere recovers the truth even for
  // the homonym keys.
  const RedundancyTable table = build_redundancy_table(result.corpus);
  DisambigConfig config;
  config.low_redundancy_cutoff = 0;
  const auto empirical = resolve_corpus(result.corpus, table, config);
  const EvaluationReport report = evaluate(result.truth, empirical);
  CHECK(report.overall.minimum == doctest::Approx(1.0));
}

TEST_CASE("self-citations stay inside one true identity") {
  SynthSpec spec;
  spec.n_identities = 50;
  spec.self_citation_rate = 1.0;
  spec.seed = 17;
  const SynthResult result = generate_synthetic(spec);

  std::size_t cites = 0;
  for (const PublicationRecord& rec : result.corpus.records()) {
    for (const std::string& target : rec.cites) {
      ++cites;
      bool shared_identity = false;
      for (const auto& [label, articles] : result.identity_articles) {
        const bool has_source =
            std::binary_search(articles.begin(), articles.end(), rec.id);
        const bool has_target =
            std::binary_search(articles.begin(), articles.end(), target);
        if (has_source && has_target) {
          shared_identity = true;
          break;
        }
      }
      CHECK(shared_identity);
    }
  }
  CHECK(cites > 0);
}

TEST_CASE("without citation settings the corpus has no citations") {
  SynthSpec spec;
  spec.n_identities = 40;
  spec.seed = 19;
  const SynthResult result = generate_synthetic(spec);
  for (const PublicationRecord& rec : result.corpus.records()) {
    CHECK(rec.cites.empty());
  }
}

TEST_CASE("generation is deterministic in the seed") {
  SynthSpec spec;
  spec.n_identities = 70;
  spec.homonym_rate = 0.2;
  spec.self_citation_rate = 0.3;
  spec.coauthor_stability = 0.8;
  spec.seed = 23;
  const SynthResult a = generate_synthetic(spec);
  const SynthResult b = generate_synthetic(spec);
  CHECK(corpus_bytes(a.corpus) == corpus_bytes(b.corpus));
  CHECK(a.truth == b.truth);
  CHECK(a.identity_articles == b.identity_articles);

  spec.seed = 24;
  const SynthResult c = generate_synthetic(spec);
  CHECK(corpus_bytes(a.corpus) != corpus_bytes(c.corpus));
}

TEST_CASE("infeasible specs are rejected") {
  SynthSpec spec;
  spec.n_identities = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  spec = {};
  spec.papers_min = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  spec = {};
  spec.papers_min = 5;
  spec.papers_max = 2;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  spec = {};
  spec.team_min = 4;
  spec.team_max = 2;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  spec = {};
  spec.homonym_rate = 1.5;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  spec = {};
  spec.initials_pool = 703;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);

  // A single team cannot host a homonym: adopting a teammate's key would
  // put two equal keys on every paper.
  spec = {};
  spec.n_identities = 3;
  spec.team_min = 3;
  spec.team_max = 3;
  spec.homonym_rate = 1.0;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);
}

TEST_CASE("heavy-tailed names concentrate redundancy on a few last names") {
  SynthSpec heavy_spec;
  heavy_spec.n_identities = 4000;
  heavy_spec.papers_min = 1;
  heavy_spec.papers_max = 1;
  heavy_spec.name_model = NameModel::heavy_tailed;
  heavy_spec.seed = 29;
  const SynthResult heavy = generate_synthetic(heavy_spec);

  SynthSpec uniform_spec = heavy_spec;
  uniform_spec.name_model = NameModel::uniform;
  const SynthResult uniform = generate_synthetic(uniform_spec);

  const RedundancyTable heavy_table = build_redundancy_table(heavy.corpus);
  const RedundancyTable uniform_table = build_redundancy_table(uniform.corpus);

  std::vector<int> raws;
  for (const auto& [last, raw] : heavy_table.raw_counts()) raws.push_back(raw);
  std::sort(raws.begin(), raws.end());
  const int median_raw = raws[raws.size() / 2];
  CHECK(heavy_table.max_raw() >= 3 * median_raw);
  CHECK(heavy_table.max_raw() >= 10);
  CHECK(heavy_table.max_raw() > uniform_table.max_raw());
}

TEST_CASE("emitted files parse back to the generated structures") {
  SynthSpec spec;
  spec.n_identities = 30;
  spec.homonym_rate = 0.3;
  spec.seed = 31;
  const SynthResult result = generate_synthetic(spec);

  const std::string dir = (std::filesystem::temp_directory_path() /
                           "homonet_synth_emit_test").string();
  std::filesystem::remove_all(dir);
  emit_synthetic(result, dir);

  const Corpus corpus = parse_corpus_file(dir + "/corpus.jsonl");
  CHECK(corpus == result.corpus);
  const auto truth = parse_identities_file(dir + "/truth.jsonl");
  CHECK(truth == result.truth);

  const auto obj = nlohmann::json::parse(read_text_file(dir + "/identity_articles.json"));
  REQUIRE(obj.is_object());
  CHECK(obj.size() == result.identity_articles.size());
  for (const auto& [label, articles] : result.identity_articles) {
    REQUIRE(obj.contains(label));
    CHECK(obj.at(label).get<std::vector<std::string>>() == articles);
  }
  std::filesystem::remove_all(dir);
}
