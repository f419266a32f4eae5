#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "homonet/redundancy.hpp"
#include "homonet/rng.hpp"
#include "test_support.hpp"

using namespace homonet;
using test_support::corpus_of;
using test_support::key;
using test_support::rec;

namespace {

// One single-author record per key.
Corpus corpus_with_keys(const std::vector<std::pair<const char*, const char*>>& keys) {
  std::vector<PublicationRecord> records;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    records.push_back(rec("p" + std::to_string(i + 1), 2000,
                          {{keys[i].first, keys[i].second}}));
  }
  return corpus_of(records);
}

}  // namespace

TEST_CASE("raw redundancy counts initials variants; s is its cumulative probability") {
  const Corpus corpus = corpus_with_keys({{"A", "X"},
                                          {"A", "Y"},
                                          {"B", "X"},
                                          {"C", "X"},
                                          {"C", "Y"},
                                          {"C", "Z"},
                                          {"C", "W"},
                                          {"C", "V"}});
  const RedundancyTable table = build_redundancy_table(corpus);
  CHECK(table.raw("A") == 2);
  CHECK(table.raw("B") == 1);
  CHECK(table.raw("C") == 5);
  CHECK(table.cdf(0) == doctest::Approx(0.0));
  CHECK(table.cdf(1) == doctest::Approx(1.0 / 3.0));
  CHECK(table.cdf(2) == doctest::Approx(2.0 / 3.0));
  CHECK(table.cdf(3) == doctest::Approx(2.0 / 3.0));  // no step between 2 and 5
  CHECK(table.cdf(5) == doctest::Approx(1.0));
  CHECK(table.s("A") == doctest::Approx(2.0 / 3.0));
  CHECK(table.s("B") == doctest::Approx(1.0 / 3.0));
  CHECK(table.s("C") == doctest::Approx(1.0));
  CHECK(table.max_raw() == 5);
}

TEST_CASE("a corpus of single-variant last names degenerates to s = 1 everywhere") {
  const Corpus corpus = corpus_with_keys({{"A", "X"}, {"B", "X"}, {"C", "Y"}});
  const RedundancyTable table = build_redundancy_table(corpus);
  for (const char* last : {"A", "B", "C"}) CHECK(table.s(last) == doctest::Approx(1.0));
}

TEST_CASE("an empty corpus cannot be tabulated") {
  CHECK_THROWS_AS(build_redundancy_table(Corpus{}), Error);
}

TEST_CASE("article redundancy multiplies s over distinct last names") {
  // Lasts A and B carry s = 0.5 (raws {1,1,2,3} over four lasts).
  const Corpus corpus = corpus_of({
      rec("p1", 2000, {{"A", "X"}}),
      rec("p2", 2000, {{"B", "X"}}),
      rec("p3", 2000, {{"C", "X"}}),
      rec("p4", 2000, {{"C", "Y"}}),
      rec("p5", 2000, {{"D", "X"}}),
      rec("p6", 2000, {{"D", "Y"}}),
      rec("p7", 2000, {{"D", "Z"}}),
      rec("p8", 2000, {{"A", "X"}, {"B", "X"}}),
  });
  const RedundancyTable table = build_redundancy_table(corpus);
  REQUIRE(table.s("A") == doctest::Approx(0.5));
  REQUIRE(table.s("B") == doctest::Approx(0.5));
  CHECK(article_redundancy(table, corpus.at("p8")) == doctest::Approx(0.25));
  CHECK(article_redundancy(table, corpus.at("p1")) == doctest::Approx(0.5));
}

TEST_CASE("same-last co-authors count once by default, per author behind the flag") {
  const Corpus corpus = corpus_with_keys({{"A", "X"},
                                          {"A", "Y"},
                                          {"B", "X"},
                                          {"C", "X"},
                                          {"C", "Y"},
                                          {"C", "Z"},
                                          {"C", "W"},
                                          {"C", "V"}});
  const RedundancyTable table = build_redundancy_table(corpus);
  REQUIRE(table.s("C") == doctest::Approx(1.0));
  REQUIRE(table.s("B") == doctest::Approx(1.0 / 3.0));

  const PublicationRecord team = rec("q1", 2001, {{"C", "X"}, {"C", "Y"}, {"B", "X"}});
  CHECK(article_redundancy(table, team) == doctest::Approx(1.0 / 3.0));

  RedundancyOptions per_author;
  per_author.distinct_last_names = false;
  CHECK(article_redundancy(table, team, per_author) == doctest::Approx(1.0 / 3.0));

  // With an s(C) below 1 the two conventions separate.
  const Corpus wide = corpus_of({
      rec("p1", 2000, {{"C", "X"}}),
      rec("p2", 2000, {{"C", "Y"}}),
      rec("p3", 2000, {{"D", "X"}}),
      rec("p4", 2000, {{"D", "Y"}}),
      rec("p5", 2000, {{"D", "Z"}}),
      rec("p6", 2000, {{"B", "X"}}),
  });
  const RedundancyTable wide_table = build_redundancy_table(wide);
  REQUIRE(wide_table.s("C") == doctest::Approx(2.0 / 3.0));
  REQUIRE(wide_table.s("B") == doctest::Approx(1.0 / 3.0));
  const double s_c = 2.0 / 3.0;
  const double s_b = 1.0 / 3.0;
  CHECK(article_redundancy(wide_table, team) == doctest::Approx(s_c * s_b));
  CHECK(article_redundancy(wide_table, team, per_author) == doctest::Approx(s_c * s_c * s_b));
}

TEST_CASE("unknown last names signal a table mismatch") {
  const Corpus corpus = corpus_with_keys({{"A", "X"}});
  const RedundancyTable table = build_redundancy_table(corpus);
  CHECK_THROWS_AS(article_redundancy(table, rec("q", 2000, {{"NEW", "Z"}})), Error);
  CHECK_THROWS_AS(table.raw("NEW"), Error);
}

TEST_CASE("average article redundancy is the mean over the key's articles") {
  // Key (A,X) writes p1 alone (redundancy s(A)) and p2 with B (s(A) * s(B)).
  const Corpus corpus = corpus_of({
      rec("p1", 2000, {{"A", "X"}}),
      rec("p2", 2000, {{"A", "X"}, {"B", "X"}}),
      rec("p3", 2000, {{"B", "Y"}}),
  });
  const RedundancyTable table = build_redundancy_table(corpus);
  const double expected = (article_redundancy(table, corpus.at("p1")) +
                           article_redundancy(table, corpus.at("p2"))) /
                          2.0;
  CHECK(average_article_redundancy(table, corpus, key("A", "X")) == doctest::Approx(expected));
  CHECK_THROWS_AS(average_article_redundancy(table, corpus, key("Z", "Z")), Error);
}

TEST_CASE("a key whose co-authors all carry s = 1 averages exactly 1") {
  // Every last name has one variant, so s = 1 across the board.
  const Corpus corpus = corpus_of({
      rec("p1", 2000, {{"A", "X"}, {"B", "Y"}}),
      rec("p2", 2000, {{"A", "X"}, {"C", "Z"}}),
  });
  const RedundancyTable table = build_redundancy_table(corpus);
  CHECK(average_article_redundancy(table, corpus, key("A", "X")) == doctest::Approx(1.0));
}

TEST_CASE("occurrence weighting shifts the cumulative distribution to instances") {
  // Last A (variants X, Y) appears in five records, B (one variant) in one.
  const Corpus corpus = corpus_of({
      rec("p1", 2000, {{"A", "X"}}),
      rec("p2", 2000, {{"A", "X"}}),
      rec("p3", 2000, {{"A", "X"}}),
      rec("p4", 2000, {{"A", "Y"}}),
      rec("p5", 2000, {{"A", "Y"}}),
      rec("p6", 2000, {{"B", "X"}}),
  });
  RedundancyOptions weighted;
  weighted.occurrence_weighted = true;
  const RedundancyTable table = build_redundancy_table(corpus, weighted);
  CHECK(table.s("B") == doctest::Approx(1.0 / 6.0));
  CHECK(table.s("A") == doctest::Approx(1.0));

  const RedundancyTable plain = build_redundancy_table(corpus);
  CHECK(plain.s("B") == doctest::Approx(0.5));
}

TEST_CASE("redundancy invariants hold on random corpora") {
  Rng rng(7);
  const char* lasts[] = {"L1", "L2", "L3", "L4", "L5", "L6"};
  const char* inits[] = {"A", "B", "C", "D"};
  for (int round = 0; round < 20; ++round) {
    std::vector<PublicationRecord> records;
    const std::size_t n = 5 + static_cast<std::size_t>(rng.next_below(25));
    for (std::size_t i = 0; i < n; ++i) {
      PublicationRecord r;
      r.id = "p" + std::to_string(i);
      r.year = 2000;
      const std::size_t team = 1 + static_cast<std::size_t>(rng.next_below(4));
      for (std::size_t j = 0; j < team; ++j) {
        const NameKey k = key(lasts[rng.next_below(6)], inits[rng.next_below(4)]);
        if (std::find(r.authors.begin(), r.authors.end(), k) == r.authors.end()) {
          r.authors.push_back(k);
        }
      }
      records.push_back(std::move(r));
    }
    const Corpus corpus = corpus_of(records);
    const RedundancyTable table = build_redundancy_table(corpus);

    for (const auto& [l1, r1] : table.raw_counts()) {
      CHECK(table.s(l1) > 0.0);
      CHECK(table.s(l1) <= 1.0);
      if (r1 == table.max_raw()) CHECK(table.s(l1) == doctest::Approx(1.0));
      for (const auto& [l2, r2] : table.raw_counts()) {
        if (r1 <= r2) CHECK(table.s(l1) <= table.s(l2) + 1e-12);
      }
    }
    for (const PublicationRecord& r : corpus.records()) {
      double min_s = 1.0;
      for (const NameKey& k : r.authors) min_s = std::min(min_s, table.s(k.last));
      CHECK(article_redundancy(table, r) <= min_s + 1e-12);
    }
  }
}

TEST_CASE("a new single-variant last name never shrinks existing raw counts") {
  std::vector<PublicationRecord> records = {
      rec("p1", 2000, {{"A", "X"}}),
      rec("p2", 2000, {{"A", "Y"}}),
      rec("p3", 2000, {{"B", "X"}}),
  };
  const RedundancyTable before = build_redundancy_table(corpus_of(records));
  records.push_back(rec("p4", 2000, {{"FRESH", "Q"}}));
  const RedundancyTable after = build_redundancy_table(corpus_of(records));
  for (const auto& [last, raw] : before.raw_counts()) {
    CHECK(after.raw(last) >= raw);
  }
}
