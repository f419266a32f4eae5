#include "homonet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "homonet/io_util.hpp"
#include "homonet/rng.hpp"

namespace homonet {

namespace {

std::string last_name_of(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "L%04zu", index);
  return buf;
}

std::string initials_of(std::size_t index) {
  std::string s;
  if (index < 26) {
    s += static_cast<char>('A' + index);
  } else {
    std::size_t rest = index - 26;
    s += static_cast<char>('A' + rest / 26);
    s += static_cast<char>('A' + rest % 26);
  }
  return s;
}

// Cumulative sampler over the last-name pool; heavy-tailed mode uses
// power-law weights so a few names dominate, the way real surname
// frequencies do.
class NameSampler {
 public:
  NameSampler(const SynthSpec& spec, std::size_t pool) {
    cum_.reserve(pool);
    double total = 0.0;
    for (std::size_t i = 0; i < pool; ++i) {
      double w = spec.name_model == NameModel::heavy_tailed
                     ? std::pow(static_cast<double>(i + 1), -spec.heavy_tail_exponent)
                     : 1.0;
      total += w;
      cum_.push_back(total);
    }
    for (double& c : cum_) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    double u = rng.next_unit();
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) return cum_.size() - 1;
    return static_cast<std::size_t>(it - cum_.begin());
  }

 private:
  std::vector<double> cum_;
};

struct GenState {
  std::vector<std::size_t> team_of;
  std::vector<std::vector<std::size_t>> teams;
  std::vector<NameKey> key_of;
  std::map<NameKey, std::vector<std::size_t>> holders;      // key -> identities
  std::map<std::string, std::set<NameKey>> keys_with_last;  // held keys per last
  std::vector<std::set<std::string>> team_lasts;            // last names per team
};

bool team_has_last(const GenState& st, std::size_t team, const std::string& last) {
  return st.team_lasts[team].count(last) != 0;
}

// Teams holding the key (at most one holder per team since last names are
// unique within a team).
std::set<std::size_t> holder_teams(const GenState& st, const NameKey& key) {
  std::set<std::size_t> teams;
  auto it = st.holders.find(key);
  if (it != st.holders.end()) {
    for (std::size_t ident : it->second) teams.insert(st.team_of[ident]);
  }
  return teams;
}

// Disjoint-team invariant probe: with identity `ident` moved to `candidate`,
// every pair of teams sharing any key may share no last name besides that
// key's. Only pairs involving ident's team can change, so only they are
// rechecked.
bool disjoint_ok(const GenState& st, std::size_t ident, const NameKey& candidate) {
  const std::size_t team = st.team_of[ident];
  std::set<std::string> new_lasts = st.team_lasts[team];
  new_lasts.erase(st.key_of[ident].last);
  new_lasts.insert(candidate.last);

  auto pair_ok = [&](const NameKey& shared, std::size_t other_team) {
    for (const std::string& last : new_lasts) {
      if (last == shared.last) continue;
      if (team_has_last(st, other_team, last)) return false;
    }
    return true;
  };

  for (std::size_t member : st.teams[team]) {
    const NameKey& key = member == ident ? candidate : st.key_of[member];
    for (std::size_t other : holder_teams(st, key)) {
      if (other == team) continue;
      if (member == ident && other == team) continue;
      if (!pair_ok(key, other)) return false;
    }
  }
  return true;
}

void adopt_key(GenState& st, std::size_t ident, const NameKey& key) {
  const NameKey old = st.key_of[ident];
  auto& old_holders = st.holders.at(old);
  old_holders.erase(std::find(old_holders.begin(), old_holders.end(), ident));
  if (old_holders.empty()) {
    st.holders.erase(old);
    st.keys_with_last.at(old.last).erase(old);
    if (st.keys_with_last.at(old.last).empty()) st.keys_with_last.erase(old.last);
  }
  st.team_lasts[st.team_of[ident]].erase(old.last);

  st.key_of[ident] = key;
  st.holders[key].push_back(ident);
  st.keys_with_last[key.last].insert(key);
  st.team_lasts[st.team_of[ident]].insert(key.last);
}

struct GenAttemptResult {
  SynthResult result;
  bool has_homonym = false;
};

GenAttemptResult generate_attempt(const SynthSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n_identities;
  const std::size_t pool =
      spec.last_name_pool ? spec.last_name_pool : std::max<std::size_t>(50, n / 5);
  NameSampler sampler(spec, pool);

  GenState st;
  st.team_of.resize(n);
  st.key_of.resize(n);

  // Teams partition the identities; a leftover below team_min joins the
  // previous team.
  {
    Rng rng(Rng::mix(seed, 1));
    std::size_t next = 0;
    while (next < n) {
      std::size_t want = static_cast<std::size_t>(
          rng.next_in(spec.team_min, std::max(spec.team_min, spec.team_max)));
      want = std::min(want, n - next);
      if (n - next - want < static_cast<std::size_t>(spec.team_min)) want = n - next;
      std::vector<std::size_t> team;
      for (std::size_t i = 0; i < want; ++i) team.push_back(next + i);
      for (std::size_t member : team) st.team_of[member] = st.teams.size();
      st.teams.push_back(std::move(team));
      next += want;
    }
    st.team_lasts.resize(st.teams.size());
  }

  // Fresh unique keys, last names unique within each team.
  {
    Rng rng(Rng::mix(seed, 2));
    for (std::size_t ident = 0; ident < n; ++ident) {
      const std::size_t team = st.team_of[ident];
      bool placed = false;
      for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
        std::string last = last_name_of(sampler.draw(rng));
        if (team_has_last(st, team, last)) continue;
        std::string initials =
            initials_of(static_cast<std::size_t>(rng.next_below(spec.initials_pool)));
        NameKey key{last, initials};
        if (st.holders.count(key)) continue;
        st.key_of[ident] = key;
        st.holders[key].push_back(ident);
        st.keys_with_last[key.last].insert(key);
        st.team_lasts[team].insert(key.last);
        placed = true;
      }
      if (!placed)
        throw Error("name pool too small for the requested identities and team sizes");
    }
  }

  // Homonym planting: an identity adopts an existing key whose last name is
  // drawn from the same distribution, which concentrates homonyms on common
  // names. Failed attempts leave the identity unique.
  if (spec.homonym_rate > 0.0) {
    Rng rng(Rng::mix(seed, 3));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t ident : order) {
      if (!rng.bernoulli(spec.homonym_rate)) continue;
      const std::size_t team = st.team_of[ident];
      for (int attempt = 0; attempt < 64; ++attempt) {
        std::string last = last_name_of(sampler.draw(rng));
        if (team_has_last(st, team, last) && last != st.key_of[ident].last) continue;
        auto held = st.keys_with_last.find(last);
        if (held == st.keys_with_last.end()) continue;
        std::vector<NameKey> candidates;
        for (const NameKey& key : held->second) {
          if (key == st.key_of[ident]) continue;
          candidates.push_back(key);
        }
        if (candidates.empty()) continue;
        NameKey choice =
            candidates[static_cast<std::size_t>(rng.next_below(candidates.size()))];
        if (spec.disjoint_homonym_teams && !disjoint_ok(st, ident, choice)) continue;
        adopt_key(st, ident, choice);
        break;
      }
    }
  }

  // Papers: each of an identity's papers is written with its team, every
  // teammate slot kept with probability coauthor_stability and otherwise
  // filled by an outsider. Guests avoid the hosting team's whole key set, so
  // a paper never carries one key twice even when a slot's teammate joins
  // after the guest, and a homonym's articles never leak into the other
  // holder's team papers.
  Corpus corpus;
  std::map<std::size_t, std::vector<std::string>> appearances;
  {
    // Fields are blocks of 10 consecutive teams; local guests draw from the
    // hosting field's identity pool.
    constexpr std::size_t kTeamsPerField = 10;
    std::vector<std::vector<std::size_t>> field_members;
    if (spec.guest_locality > 0.0) {
      field_members.resize(st.teams.size() / kTeamsPerField + 1);
      for (std::size_t ident = 0; ident < n; ++ident)
        field_members[st.team_of[ident] / kTeamsPerField].push_back(ident);
    }
    Rng rng(Rng::mix(seed, 4));
    std::size_t paper_no = 0;
    for (std::size_t ident = 0; ident < n; ++ident) {
      const std::size_t team = st.team_of[ident];
      std::set<NameKey> team_keys;
      for (std::size_t member : st.teams[team]) team_keys.insert(st.key_of[member]);
      const int papers = static_cast<int>(rng.next_in(spec.papers_min, spec.papers_max));
      for (int p = 0; p < papers; ++p) {
        std::vector<std::size_t> on_paper{ident};
        std::set<std::size_t> on_paper_set{ident};
        std::set<NameKey> on_paper_keys{st.key_of[ident]};
        for (std::size_t member : st.teams[team]) {
          if (member == ident) continue;
          if (rng.bernoulli(spec.coauthor_stability)) {
            on_paper.push_back(member);
            on_paper_set.insert(member);
            on_paper_keys.insert(st.key_of[member]);
            continue;
          }
          const bool local =
              spec.guest_locality > 0.0 && rng.bernoulli(spec.guest_locality);
          const std::vector<std::size_t>* local_pool =
              local ? &field_members[team / kTeamsPerField] : nullptr;
          for (int attempt = 0; attempt < 32; ++attempt) {
            std::size_t guest =
                local ? (*local_pool)[static_cast<std::size_t>(
                            rng.next_below(local_pool->size()))]
                      : static_cast<std::size_t>(rng.next_below(n));
            if (st.team_of[guest] == team) continue;
            if (on_paper_set.count(guest)) continue;
            if (team_keys.count(st.key_of[guest])) continue;
            if (on_paper_keys.count(st.key_of[guest])) continue;
            on_paper.push_back(guest);
            on_paper_set.insert(guest);
            on_paper_keys.insert(st.key_of[guest]);
            break;
          }
        }
        char id[16];
        std::snprintf(id, sizeof(id), "p%06zu", paper_no);
        PublicationRecord rec;
        rec.id = id;
        rec.year = 1987 + static_cast<int>(paper_no % 25);
        for (std::size_t author : on_paper) {
          rec.authors.push_back(st.key_of[author]);
          appearances[author].push_back(rec.id);
        }
        corpus.add(std::move(rec));
        ++paper_no;
      }
    }
  }

  // Citations are added onto the finished records via a rebuild.
  std::map<std::string, std::vector<std::string>> extra_cites;
  if (spec.self_citation_rate > 0.0) {
    Rng rng(Rng::mix(seed, 5));
    for (std::size_t ident = 0; ident < n; ++ident) {
      auto it = appearances.find(ident);
      if (it == appearances.end()) continue;
      const std::vector<std::string>& papers = it->second;
      for (std::size_t i = 1; i < papers.size(); ++i) {
        if (!rng.bernoulli(spec.self_citation_rate)) continue;
        const std::string& target =
            papers[static_cast<std::size_t>(rng.next_below(i))];
        extra_cites[papers[i]].push_back(target);
      }
    }
  }
  if (spec.cross_citation_noise > 0.0) {
    Rng rng(Rng::mix(seed, 6));
    for (const auto& [key, idents] : st.holders) {
      if (idents.size() < 2) continue;
      for (std::size_t ident : idents) {
        for (const std::string& paper : appearances.at(ident)) {
          if (!rng.bernoulli(spec.cross_citation_noise)) continue;
          std::vector<std::size_t> others;
          for (std::size_t other : idents) {
            if (other != ident) others.push_back(other);
          }
          std::size_t other = others[static_cast<std::size_t>(rng.next_below(others.size()))];
          const std::vector<std::string>& target_papers = appearances.at(other);
          extra_cites[paper].push_back(
              target_papers[static_cast<std::size_t>(rng.next_below(target_papers.size()))]);
        }
      }
    }
  }
  if (!extra_cites.empty()) {
    Corpus cited;
    for (const PublicationRecord& rec : corpus.records()) {
      PublicationRecord copy = rec;
      auto it = extra_cites.find(rec.id);
      if (it != extra_cites.end()) {
        for (const std::string& target : it->second) copy.cites.push_back(target);
        std::sort(copy.cites.begin(), copy.cites.end());
        copy.cites.erase(std::unique(copy.cites.begin(), copy.cites.end()), copy.cites.end());
      }
      cited.add(std::move(copy));
    }
    corpus = std::move(cited);
  }

  GenAttemptResult out;
  for (const auto& [key, idents] : st.holders) {
    IdentityPartition partition;
    partition.key = key;
    for (std::size_t ident : idents) {
      auto it = appearances.find(ident);
      if (it == appearances.end()) continue;
      std::vector<std::string> papers = it->second;
      std::sort(papers.begin(), papers.end());
      partition.identities.push_back(std::move(papers));
    }
    if (partition.identities.empty()) continue;
    if (partition.identities.size() >= 2) out.has_homonym = true;
    partition.canonicalize();
    for (std::size_t k = 0; k < partition.identities.size(); ++k) {
      out.result.identity_articles[identity_label(key, k + 1)] = partition.identities[k];
    }
    out.result.truth.emplace(key, std::move(partition));
  }
  out.result.corpus = std::move(corpus);
  return out;
}

}  // namespace

SynthResult generate_synthetic(const SynthSpec& spec) {
  if (spec.n_identities == 0) throw Error("n_identities must be positive");
  if (spec.papers_min < 1 || spec.papers_min > spec.papers_max)
    throw Error("invalid papers range");
  if (spec.team_min < 1 || spec.team_min > spec.team_max) throw Error("invalid team range");
  for (double rate : {spec.homonym_rate, spec.coauthor_stability, spec.self_citation_rate,
                      spec.cross_citation_noise, spec.guest_locality}) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw Error("rates must lie in [0, 1]");
  }
  if (spec.initials_pool == 0 || spec.initials_pool > 26 * 27)
    throw Error("initials pool must lie in [1, 702]");

  const int rounds = spec.homonym_rate > 0.0 ? 10 : 1;
  for (int round = 0; round < rounds; ++round) {
    GenAttemptResult attempt =
        generate_attempt(spec, Rng::mix(spec.seed, 0xabcd + static_cast<std::uint64_t>(round)));
    if (spec.homonym_rate > 0.0 && !attempt.has_homonym) continue;
    return std::move(attempt.result);
  }
  throw Error("could not realize a homonym under the given constraints");
}

void emit_synthetic(const SynthResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  serialize_corpus_file(result.corpus, (base / "corpus.jsonl").string());
  serialize_identities_file(result.truth, (base / "truth.jsonl").string());
  nlohmann::ordered_json obj;
  for (const auto& [label, ids] : result.identity_articles) obj[label] = ids;
  write_text_file((base / "identity_articles.json").string(), obj.dump(2) + "\n");
}

}  // namespace homonet
