#include "homonet/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace homonet {

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

NameKey NameKey::normalized(std::string_view last, std::string_view initials) {
  NameKey key;
  key.last = upper(trim(last));
  if (key.last.empty()) throw Error("empty last name");
  std::string ini = upper(trim(initials));
  for (char c : ini) {
    if (c == '.' || std::isspace(static_cast<unsigned char>(c))) continue;
    key.initials += c;
  }
  return key;
}

std::string NameKey::display() const { return last + ", " + initials; }

bool PublicationRecord::has_author(const NameKey& key) const {
  return std::find(authors.begin(), authors.end(), key) != authors.end();
}

void Corpus::add(PublicationRecord record) {
  if (by_id_.count(record.id)) throw Error("duplicate article id: " + record.id);
  by_id_.emplace(record.id, records_.size());
  for (const NameKey& key : record.authors) {
    auto& ids = name_index_[key];
    ids.insert(std::lower_bound(ids.begin(), ids.end(), record.id), record.id);
  }
  records_.push_back(std::move(record));
}

const PublicationRecord* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const PublicationRecord& Corpus::at(std::string_view id) const {
  const PublicationRecord* rec = find(id);
  if (!rec) throw Error("unknown article id: " + std::string(id));
  return *rec;
}

bool Corpus::contains_key(const NameKey& key) const { return name_index_.count(key) != 0; }

std::vector<std::string> Corpus::articles_of(const NameKey& key) const {
  auto it = name_index_.find(key);
  return it == name_index_.end() ? std::vector<std::string>{} : it->second;
}

Corpus Corpus::subset(const std::set<std::string>& ids) const {
  Corpus out;
  for (const PublicationRecord& rec : records_) {
    if (ids.count(rec.id)) out.add(rec);
  }
  return out;
}

namespace {

using nlohmann::json;

PublicationRecord record_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
  PublicationRecord rec;
  auto id_it = obj.find("id");
  if (id_it == obj.end() || !id_it->is_string() || id_it->get<std::string>().empty())
    throw ParseError(line, "missing or invalid \"id\"");
  rec.id = id_it->get<std::string>();
  auto year_it = obj.find("year");
  if (year_it != obj.end()) {
    if (!year_it->is_number_integer()) throw ParseError(line, "\"year\" must be an integer");
    rec.year = year_it->get<int>();
  }
  auto auth_it = obj.find("authors");
  if (auth_it == obj.end() || !auth_it->is_array())
    throw ParseError(line, "missing or invalid \"authors\"");
  for (const json& a : *auth_it) {
    if (!a.is_object() || !a.contains("last") || !a["last"].is_string())
      throw ParseError(line, "author entries need a string \"last\"");
    std::string initials;
    if (a.contains("initials")) {
      if (!a["initials"].is_string()) throw ParseError(line, "\"initials\" must be a string");
      initials = a["initials"].get<std::string>();
    }
    NameKey key;
    try {
      key = NameKey::normalized(a["last"].get<std::string>(), initials);
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
    if (!rec.has_author(key)) rec.authors.push_back(key);
  }
  if (rec.authors.empty()) throw ParseError(line, "record has no authors");
  auto cite_it = obj.find("cites");
  if (cite_it != obj.end()) {
    if (!cite_it->is_array()) throw ParseError(line, "\"cites\" must be an array");
    for (const json& c : *cite_it) {
      if (!c.is_string()) throw ParseError(line, "citation entries must be strings");
      rec.cites.push_back(c.get<std::string>());
    }
    std::sort(rec.cites.begin(), rec.cites.end());
    rec.cites.erase(std::unique(rec.cites.begin(), rec.cites.end()), rec.cites.end());
  }
  return rec;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw ParseError(lineno, "invalid JSON");
    try {
      corpus.add(record_from_json(obj, lineno));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return corpus;
}

Corpus parse_corpus_file(const std::string& path) {
  if (path == "-") return parse_corpus(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  return parse_corpus(in);
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const PublicationRecord& rec : corpus.records()) {
    nlohmann::ordered_json obj;
    obj["id"] = rec.id;
    obj["year"] = rec.year;
    auto authors = nlohmann::ordered_json::array();
    for (const NameKey& key : rec.authors) {
      authors.push_back({{"last", key.last}, {"initials", key.initials}});
    }
    obj["authors"] = std::move(authors);
    obj["cites"] = rec.cites;
    out << obj.dump() << '\n';
  }
}

void serialize_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  serialize_corpus(corpus, out);
}

}  // namespace homonet
