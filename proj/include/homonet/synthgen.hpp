#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homonet/corpus.hpp"
#include "homonet/disambig.hpp"

namespace homonet {

enum class NameModel {
  uniform,       // last names drawn uniformly from the pool
  heavy_tailed,  // power-law weights, a few very common last names
};

// Parameters of the synthetic corpus generator. Identities are arranged in
// teams; each paper of an identity is written with its teammates, each slot
// kept with probability coauthor_stability and otherwise filled by a random
// outsider. With coauthor_stability = 1 and homonym_rate = 0 every name block
// is a single overlap component, so the evidence pipeline recovers the truth
// exactly.
struct SynthSpec {
  std::size_t n_identities = 1000;
  double homonym_rate = 0.0;      // chance an identity reuses an existing key
  int papers_min = 2;
  int papers_max = 6;
  int team_min = 3;
  int team_max = 6;
  double coauthor_stability = 1.0;
  double self_citation_rate = 0.0;   // per paper beyond the first
  double cross_citation_noise = 0.0; // cites between same-key identities
  NameModel name_model = NameModel::uniform;
  double heavy_tail_exponent = 1.5;
  std::size_t last_name_pool = 0;  // 0: max(50, n_identities / 5)
  std::size_t initials_pool = 260;
  // Requires the two teams holding a homonym key to share no other last name,
  // so merged blocks stay separable by co-author evidence.
  bool disjoint_homonym_teams = false;
  // Chance an outsider guest comes from the hosting team's own field (a block
  // of 10 consecutive teams) instead of the whole corpus. Zero keeps guests
  // fully uniform; values near one wire fields densely while keeping
  // cross-field co-authorships rare.
  double guest_locality = 0.0;
  std::uint64_t seed = 1;
};

struct SynthResult {
  Corpus corpus;
  std::map<NameKey, IdentityPartition> truth;
  // Article ids per true identity, keyed by its canonical label.
  std::map<std::string, std::vector<std::string>> identity_articles;
};

// Generates a corpus with known identity structure. Throws Error when the
// spec is infeasible (for example a positive homonym_rate that cannot be
// realized under the team constraints).
SynthResult generate_synthetic(const SynthSpec& spec);

// Writes corpus.jsonl, truth.jsonl and identity_articles.json into dir.
void emit_synthetic(const SynthResult& result, const std::string& dir);

}  // namespace homonet
