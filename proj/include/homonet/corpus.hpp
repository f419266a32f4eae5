#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace homonet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure carrying the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Author name key: uppercase last name plus uppercase initials, the unit of
// blocking. Two keys are equal iff both normalized fields are byte-equal.
struct NameKey {
  std::string last;
  std::string initials;

  // Trims, uppercases, and strips periods/inner whitespace from initials.
  // Throws Error if the last name is empty after normalization.
  static NameKey normalized(std::string_view last, std::string_view initials);

  std::string display() const;  // "WANG, CH"

  auto operator<=>(const NameKey&) const = default;
};

struct PublicationRecord {
  std::string id;
  int year = 0;
  std::vector<NameKey> authors;    // deduplicated, first-occurrence order
  std::vector<std::string> cites;  // sorted unique; may reference ids outside the corpus

  bool has_author(const NameKey& key) const;
  bool operator==(const PublicationRecord&) const = default;
};

// Immutable after construction; concurrent reads are safe.
class Corpus {
 public:
  // Throws Error on duplicate id. Authors are deduplicated by the caller
  // (parse_corpus) or must already be unique.
  void add(PublicationRecord record);

  const std::vector<PublicationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const PublicationRecord* find(std::string_view id) const;
  const PublicationRecord& at(std::string_view id) const;  // throws Error if absent

  bool contains(std::string_view id) const { return find(id) != nullptr; }
  bool contains_key(const NameKey& key) const;

  // NameKey -> sorted unique article ids. Exactly the inverse of the
  // records' author lists.
  const std::map<NameKey, std::vector<std::string>>& name_index() const { return name_index_; }

  // Ids of the articles authored by key; empty if the key is unseen.
  std::vector<std::string> articles_of(const NameKey& key) const;

  // Restriction to the given publication ids (ids absent from the corpus are
  // ignored). Citations are kept as-is; dangling ones stay legal.
  Corpus subset(const std::set<std::string>& ids) const;

  bool operator==(const Corpus& other) const { return records_ == other.records_; }

 private:
  std::vector<PublicationRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<NameKey, std::vector<std::string>> name_index_;
};

// Reads JSONL: one object per line with fields id, year, authors, cites.
// Unknown fields are ignored. Blank lines are skipped.
Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_file(const std::string& path);  // "-" reads stdin

// One record per line, keys in the order id, year, authors, cites.
void serialize_corpus(const Corpus& corpus, std::ostream& out);
void serialize_corpus_file(const Corpus& corpus, const std::string& path);

}  // namespace homonet
