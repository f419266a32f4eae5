#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "homonet/community.hpp"
#include "homonet/corpus.hpp"
#include "homonet/disambig.hpp"
#include "homonet/evaluation.hpp"
#include "homonet/io_util.hpp"
#include "homonet/network.hpp"
#include "homonet/pipeline.hpp"
#include "homonet/redundancy.hpp"
#include "homonet/synthgen.hpp"

namespace {

using namespace homonet;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = ".";
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_dir_opt = nullptr;
};

// Stage defaults come from --config when given; explicit flags still win.
PipelineConfig effective_config(const CommonArgs& common) {
  PipelineConfig cfg;
  if (!common.config_path.empty())
    cfg = PipelineConfig::from_json(read_text_file(common.config_path));
  if (common.seed_opt->count()) cfg.seed = common.seed;
  if (common.threads_opt->count()) cfg.threads = common.threads;
  if (common.out_dir_opt->count() || cfg.out_dir.empty()) cfg.out_dir = common.out_dir;
  return cfg;
}

std::string report_dir(const CommonArgs& common) {
  const std::string dir = effective_config(common).out_dir;
  fs::create_directories(dir);
  return dir;
}

std::map<NameKey, IdentityPartition> load_identities(const Corpus& corpus,
                                                     const std::string& path) {
  if (path.empty()) return trivial_identities(corpus);
  return parse_identities_file(path);
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

Role role_from_name(const std::string& name) {
  for (Role r : {Role::R1, Role::R2, Role::R3, Role::R4, Role::R5, Role::R6, Role::R7,
                 Role::unclassifiable}) {
    if (name == role_name(r)) return r;
  }
  throw Error("unknown role name: " + name);
}

// Reads a roles.csv written by the roles subcommand or the pipeline bundle.
std::map<std::string, Role> read_roles_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("empty roles file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = parse_csv_line(line);
  std::size_t label_col = header.size();
  std::size_t role_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "label") label_col = i;
    if (header[i] == "role") role_col = i;
  }
  if (label_col == header.size() || role_col == header.size())
    throw Error("roles file lacks label/role columns: " + path);

  std::map<std::string, Role> roles;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = parse_csv_line(line);
    if (fields.size() <= std::max(label_col, role_col))
      throw Error("short row in roles file: " + path);
    roles[fields[label_col]] = role_from_name(fields[role_col]);
  }
  return roles;
}

ClusterMethod method_from_flag(const std::string& name) {
  if (name == "map-equation") return ClusterMethod::map_equation;
  if (name == "modularity") return ClusterMethod::modularity;
  throw Error("unknown clustering method: " + name);
}

struct RoleChain {
  CoauthorNetwork giant;
  Clustering clustering;
  std::vector<NodeRoleMetrics> metrics;
};

RoleChain run_role_chain(const Corpus& corpus,
                         const std::map<NameKey, IdentityPartition>& identities,
                         const PipelineConfig& cfg) {
  CoauthorNetwork net = build_network(corpus, identities, cfg.filter);
  if (net.empty()) throw Error("network is empty after filtering");
  RoleChain chain;
  chain.giant = giant_component(net);
  chain.clustering = cluster_network(chain.giant, cfg.seed, cfg.clustering);
  chain.metrics = classify_roles(chain.giant, chain.clustering, cfg.roles);
  return chain;
}

void write_clustering_json(const std::string& dir, const Clustering& clustering) {
  ordered_json obj;
  obj["method"] =
      clustering.method == ClusterMethod::map_equation ? "map_equation" : "modularity";
  obj["cluster_count"] = clustering.cluster_count;
  obj["quality"] = clustering.quality;
  write_text_file((fs::path(dir) / "clustering.json").string(), obj.dump(2) + "\n");
}

void setup_ingest(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("ingest", "Parse, validate and canonicalize a corpus");
  sub->fallthrough();
  auto input = std::make_shared<std::string>("-");
  sub->add_option("input", *input, "Corpus JSONL path, - for stdin");
  sub->callback([&common, input] {
    const Corpus corpus = parse_corpus_file(*input);
    const std::string dir = report_dir(common);
    serialize_corpus_file(corpus, (fs::path(dir) / "corpus.jsonl").string());

    std::size_t author_instances = 0;
    std::set<std::string> lasts;
    std::optional<int> year_min, year_max;
    for (const PublicationRecord& rec : corpus.records()) {
      author_instances += rec.authors.size();
      for (const NameKey& key : rec.authors) lasts.insert(key.last);
      year_min = year_min ? std::min(*year_min, rec.year) : rec.year;
      year_max = year_max ? std::max(*year_max, rec.year) : rec.year;
    }
    ordered_json obj;
    obj["publications"] = corpus.size();
    obj["name_keys"] = corpus.name_index().size();
    obj["author_instances"] = author_instances;
    obj["distinct_last_names"] = lasts.size();
    if (year_min) {
      obj["year_min"] = *year_min;
      obj["year_max"] = *year_max;
    }
    write_text_file((fs::path(dir) / "ingest_summary.json").string(), obj.dump(2) + "\n");
    std::cout << "publications: " << corpus.size()
              << ", name keys: " << corpus.name_index().size() << "\n";
  });
}

void setup_redundancy(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("redundancy", "Name redundancy tables and division-point split");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    bool occurrence_weighted = false;
    bool per_author = false;
    double division = 0.85;
    CLI::Option* occ_opt = nullptr;
    CLI::Option* pa_opt = nullptr;
    CLI::Option* div_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  a->occ_opt = sub->add_flag("--occurrence-weighted", a->occurrence_weighted,
                             "Weight the redundancy CDF by author instances");
  a->pa_opt = sub->add_flag("--per-author", a->per_author,
                            "Multiply article redundancy once per author, not per last name");
  a->div_opt = sub->add_option("--division-point", a->division,
                               "Average-article-redundancy split point");
  sub->callback([&common, a] {
    const PipelineConfig cfg = effective_config(common);
    RedundancyOptions opts = cfg.redundancy;
    if (a->occ_opt->count()) opts.occurrence_weighted = true;
    if (a->pa_opt->count()) opts.distinct_last_names = false;
    const double division = a->div_opt->count() ? a->division : cfg.division_point;

    const Corpus corpus = parse_corpus_file(a->corpus);
    const RedundancyTable table = build_redundancy_table(corpus, opts);
    const std::string dir = report_dir(common);

    CsvWriter names((fs::path(dir) / "names.csv").string());
    names.row({"last", "raw", "s"});
    std::map<int, std::size_t> histogram;
    for (const auto& [last, raw] : table.raw_counts()) {
      names.row({last, std::to_string(raw), format_double(table.s(last))});
      histogram[raw] += 1;
    }

    CsvWriter hist((fs::path(dir) / "redundancy_histogram.csv").string());
    hist.row({"raw", "last_names", "cum_fraction"});
    for (const auto& [raw, cum] : table.cdf_steps()) {
      hist.row({std::to_string(raw), std::to_string(histogram.at(raw)), format_double(cum)});
    }

    CsvWriter keys((fs::path(dir) / "name_keys.csv").string());
    keys.row({"last", "initials", "articles", "avg_article_redundancy", "below_division"});
    std::size_t below = 0;
    const auto& index = corpus.name_index();
    for (const auto& [key, ids] : index) {
      const double avg = average_article_redundancy(table, corpus, key, opts);
      const bool is_below = avg < division;
      below += is_below ? 1 : 0;
      keys.row({key.last, key.initials, std::to_string(ids.size()), format_double(avg),
                is_below ? "1" : "0"});
    }

    CsvWriter articles((fs::path(dir) / "articles.csv").string());
    articles.row({"id", "article_redundancy"});
    for (const PublicationRecord& rec : corpus.records()) {
      articles.row({rec.id, format_double(article_redundancy(table, rec, opts))});
    }

    ordered_json obj;
    obj["last_names"] = table.raw_counts().size();
    obj["name_keys"] = index.size();
    obj["publications"] = corpus.size();
    obj["max_raw"] = table.max_raw();
    obj["division_point"] = division;
    obj["keys_below_division"] = below;
    obj["keys_above_division"] = index.size() - below;
    write_text_file((fs::path(dir) / "redundancy_summary.json").string(), obj.dump(2) + "\n");
    std::cout << "last names: " << table.raw_counts().size() << ", name keys: " << index.size()
              << ", below division: " << below << "\n";
  });
}

void setup_disambiguate(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("disambiguate", "Resolve name keys into author identities");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    int cutoff = 3;
    bool no_self_citation = false;
    bool no_coauthor_overlap = false;
    bool strict = false;
    bool occurrence_weighted = false;
    CLI::Option* cutoff_opt = nullptr;
    CLI::Option* nsc_opt = nullptr;
    CLI::Option* nco_opt = nullptr;
    CLI::Option* strict_opt = nullptr;
    CLI::Option* occ_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  a->cutoff_opt = sub->add_option("--cutoff", a->cutoff, "Low-redundancy cutoff");
  a->nsc_opt = sub->add_flag("--no-self-citation", a->no_self_citation,
                             "Drop self-citation evidence");
  a->nco_opt = sub->add_flag("--no-coauthor-overlap", a->no_coauthor_overlap,
                             "Drop co-author overlap evidence");
  a->strict_opt = sub->add_flag("--strict-namekey", a->strict,
                                "Match co-authors by full name key, not last name");
  a->occ_opt = sub->add_flag("--occurrence-weighted", a->occurrence_weighted,
                             "Weight the redundancy CDF by author instances");
  sub->callback([&common, a] {
    PipelineConfig cfg = effective_config(common);
    if (a->cutoff_opt->count()) cfg.disambig.low_redundancy_cutoff = a->cutoff;
    if (a->nsc_opt->count()) cfg.disambig.use_self_citation = false;
    if (a->nco_opt->count()) cfg.disambig.use_coauthor_overlap = false;
    if (a->strict_opt->count()) cfg.disambig.strict_namekey_match = true;
    if (a->occ_opt->count()) cfg.redundancy.occurrence_weighted = true;

    const Corpus corpus = parse_corpus_file(a->corpus);
    const RedundancyTable table = build_redundancy_table(corpus, cfg.redundancy);
    const auto resolved = resolve_corpus(corpus, table, cfg.disambig, cfg.threads);
    const std::string dir = report_dir(common);
    serialize_identities_file(resolved, (fs::path(dir) / "identities.jsonl").string());

    std::size_t identities = 0;
    std::size_t low_redundancy = 0;
    for (const auto& [key, partition] : resolved) {
      identities += partition.identities.size();
      if (table.raw(key.last) <= cfg.disambig.low_redundancy_cutoff) ++low_redundancy;
    }
    ordered_json obj;
    obj["name_keys"] = resolved.size();
    obj["identities"] = identities;
    obj["low_redundancy_names"] = low_redundancy;
    obj["cutoff"] = cfg.disambig.low_redundancy_cutoff;
    write_text_file((fs::path(dir) / "disambiguate_summary.json").string(), obj.dump(2) + "\n");
    std::cout << "resolved " << resolved.size() << " name keys into " << identities
              << " identities\n";
  });
}

void setup_learn_cutoff(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("learn-cutoff", "Sweep the low-redundancy cutoff on labeled data");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    std::string truth;
    int min_cutoff = 0;
    int max_cutoff = 10;
    std::string objective = "median";
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  sub->add_option("truth", a->truth, "Ground-truth identities JSONL path")->required();
  sub->add_option("--min-cutoff", a->min_cutoff, "Smallest candidate cutoff");
  sub->add_option("--max-cutoff", a->max_cutoff, "Largest candidate cutoff");
  sub->add_option("--objective", a->objective, "Weighted K statistic: median, q25 or mean");
  sub->callback([&common, a] {
    const PipelineConfig cfg = effective_config(common);
    CutoffSearch search;
    search.min_cutoff = a->min_cutoff;
    search.max_cutoff = a->max_cutoff;
    if (a->objective == "median") {
      search.objective = CutoffObjective::median;
    } else if (a->objective == "q25") {
      search.objective = CutoffObjective::q25;
    } else if (a->objective == "mean") {
      search.objective = CutoffObjective::mean;
    } else {
      throw Error("unknown objective: " + a->objective);
    }

    const Corpus corpus = parse_corpus_file(a->corpus);
    const GroundTruth truth = parse_identities_file(a->truth);
    const RedundancyTable table = build_redundancy_table(corpus, cfg.redundancy);
    const CutoffResult result = learn_cutoff(corpus, truth, table, search, cfg.threads);

    const std::string dir = report_dir(common);
    CsvWriter trace((fs::path(dir) / "cutoff_trace.csv").string());
    trace.row({"cutoff", "objective_value", "tiebreak_value"});
    for (const auto& [c, primary, secondary] : result.trace) {
      trace.row({std::to_string(c), format_double(primary), format_double(secondary)});
    }
    ordered_json obj;
    obj["cutoff"] = result.cutoff;
    obj["objective"] = a->objective;
    obj["objective_value"] = result.objective_value;
    write_text_file((fs::path(dir) / "cutoff.json").string(), obj.dump(2) + "\n");
    std::cout << "best cutoff: " << result.cutoff << " (" << a->objective << " K = "
              << format_double(result.objective_value) << ")\n";
  });
}

void setup_network(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("network", "Build the filtered co-author network");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    std::string identities;
    bool to_fixpoint = false;
    CLI::Option* fix_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  sub->add_option("identities", a->identities,
                  "Identities JSONL; omitted: one identity per name key");
  a->fix_opt = sub->add_flag("--to-fixpoint", a->to_fixpoint,
                             "Repeat the two filter steps until stable");
  sub->callback([&common, a] {
    PipelineConfig cfg = effective_config(common);
    if (a->fix_opt->count()) cfg.filter.to_fixpoint = true;

    const Corpus corpus = parse_corpus_file(a->corpus);
    const auto identities = load_identities(corpus, a->identities);
    const CoauthorNetwork net = build_network(corpus, identities, cfg.filter);
    const std::string dir = report_dir(common);
    write_network_reports(dir, net);
    const std::size_t giant = net.empty() ? 0 : net.component_size(0);
    std::cout << "nodes: " << net.node_count() << ", edges: " << net.edge_count()
              << ", components: " << net.component_count() << ", giant: " << giant << "\n";
  });
}

void setup_roles(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("roles", "Cluster the giant component and classify node roles");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    std::string identities;
    bool to_fixpoint = false;
    std::string method = "map-equation";
    bool weighted_degree = false;
    CLI::Option* fix_opt = nullptr;
    CLI::Option* method_opt = nullptr;
    CLI::Option* wd_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  sub->add_option("identities", a->identities,
                  "Identities JSONL; omitted: one identity per name key");
  a->fix_opt = sub->add_flag("--to-fixpoint", a->to_fixpoint,
                             "Repeat the two filter steps until stable");
  a->method_opt =
      sub->add_option("--method", a->method, "Clustering method: map-equation or modularity");
  a->wd_opt = sub->add_flag("--weighted-degree", a->weighted_degree,
                            "Use edge weights for the role metrics");
  sub->callback([&common, a] {
    PipelineConfig cfg = effective_config(common);
    if (a->fix_opt->count()) cfg.filter.to_fixpoint = true;
    if (a->method_opt->count()) cfg.clustering.method = method_from_flag(a->method);
    if (a->wd_opt->count()) cfg.roles.weighted_degree = true;

    const Corpus corpus = parse_corpus_file(a->corpus);
    const auto identities = load_identities(corpus, a->identities);
    const RoleChain chain = run_role_chain(corpus, identities, cfg);
    const std::string dir = report_dir(common);
    write_clustering_json(dir, chain.clustering);
    write_role_reports(dir, chain.giant, chain.clustering, chain.metrics);
    std::cout << "giant nodes: " << chain.giant.node_count()
              << ", clusters: " << chain.clustering.cluster_count
              << ", quality: " << format_double(chain.clustering.quality) << "\n";
  });
}

void setup_evaluate(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("evaluate", "Score identities against ground truth");
  sub->fallthrough();
  struct Args {
    std::string truth;
    std::string empirical;
    std::string roles_csv;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("truth", a->truth, "Ground-truth identities JSONL path")->required();
  sub->add_option("empirical", a->empirical, "Empirical identities JSONL path")->required();
  sub->add_option("--roles-csv", a->roles_csv, "roles.csv for the per-role breakdown");
  sub->callback([&common, a] {
    const GroundTruth truth = parse_identities_file(a->truth);
    const auto empirical = parse_identities_file(a->empirical);
    std::map<std::string, Role> roles;
    if (!a->roles_csv.empty()) roles = read_roles_csv(a->roles_csv);
    const EvaluationReport report =
        evaluate(truth, empirical, roles.empty() ? nullptr : &roles);
    const std::string dir = report_dir(common);
    write_evaluation_report(dir, report);
    std::cout << "names: " << report.names.size()
              << ", weighted median K: " << format_double(report.overall.median) << "\n";
  });
}

void setup_distortion(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("distortion", "Per-role redundancy mix of the giant component");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    std::string identities;
    bool to_fixpoint = false;
    std::string method = "map-equation";
    CLI::Option* fix_opt = nullptr;
    CLI::Option* method_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("corpus", a->corpus, "Corpus JSONL path")->required();
  sub->add_option("identities", a->identities,
                  "Identities JSONL; omitted: one identity per name key");
  a->fix_opt = sub->add_flag("--to-fixpoint", a->to_fixpoint,
                             "Repeat the two filter steps until stable");
  a->method_opt =
      sub->add_option("--method", a->method, "Clustering method: map-equation or modularity");
  sub->callback([&common, a] {
    PipelineConfig cfg = effective_config(common);
    if (a->fix_opt->count()) cfg.filter.to_fixpoint = true;
    if (a->method_opt->count()) cfg.clustering.method = method_from_flag(a->method);

    const Corpus corpus = parse_corpus_file(a->corpus);
    const RedundancyTable table = build_redundancy_table(corpus, cfg.redundancy);
    const auto identities = load_identities(corpus, a->identities);
    const RoleChain chain = run_role_chain(corpus, identities, cfg);
    const DistortionReport report = distortion_analysis(chain.giant, chain.metrics, table);
    const std::string dir = report_dir(common);
    write_distortion_report(dir, report);
    std::cout << "distortion score: " << format_double(report.score) << "\n";
  });
}

void setup_sample(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("sample", "Stratified node sample from a roles table");
  sub->fallthrough();
  struct Args {
    std::string roles_csv;
    std::string sizes;
    bool reference = false;
    double margin = 0.0;
  };
  auto a = std::make_shared<Args>();
  sub->add_option("roles", a->roles_csv, "roles.csv path")->required();
  sub->add_option("--sizes", a->sizes, "Per-role sample sizes, e.g. R1=10,R5=4");
  sub->add_flag("--reference", a->reference, "Use the reference survey strata sizes");
  sub->add_option("--margin", a->margin,
                  "Derive sizes from each stratum's population at this margin of error");
  sub->callback([&common, a] {
    const PipelineConfig cfg = effective_config(common);
    const std::map<std::string, Role> roles = read_roles_csv(a->roles_csv);
    std::map<Role, std::vector<std::string>> strata;
    for (const auto& [label, role] : roles) {
      if (role == Role::unclassifiable) continue;
      strata[role].push_back(label);
    }

    const int modes = (!a->sizes.empty() ? 1 : 0) + (a->reference ? 1 : 0) +
                      (a->margin > 0.0 ? 1 : 0);
    if (modes != 1) throw Error("choose exactly one of --sizes, --reference, --margin");

    std::map<Role, std::size_t> sizes;
    if (a->reference) {
      sizes = reference_strata_sizes();
    } else if (a->margin > 0.0) {
      for (const auto& [role, labels] : strata) {
        sizes[role] = sample_size_for_proportion(labels.size(), a->margin);
      }
    } else {
      std::istringstream in(a->sizes);
      std::string token;
      while (std::getline(in, token, ',')) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos) throw Error("bad --sizes entry: " + token);
        sizes[role_from_name(token.substr(0, eq))] =
            static_cast<std::size_t>(std::stoull(token.substr(eq + 1)));
      }
    }

    const auto sample = stratified_sample(strata, sizes, cfg.seed);
    const std::string dir = report_dir(common);
    CsvWriter out((fs::path(dir) / "sample.csv").string());
    out.row({"role", "label"});
    std::size_t total = 0;
    for (const auto& [role, labels] : sample) {
      for (const std::string& label : labels) out.row({role_name(role), label});
      total += labels.size();
    }
    ordered_json obj;
    for (const auto& [role, labels] : sample) {
      obj[role_name(role)] = {{"population", strata.count(role) ? strata.at(role).size() : 0},
                              {"sampled", labels.size()}};
    }
    write_text_file((fs::path(dir) / "sample_summary.json").string(), obj.dump(2) + "\n");
    std::cout << "sampled " << total << " nodes across " << sample.size() << " roles\n";
  });
}

void setup_synth(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic corpus with known identities");
  sub->fallthrough();
  auto spec = std::make_shared<SynthSpec>();
  auto model = std::make_shared<std::string>("uniform");
  sub->add_option("--identities", spec->n_identities, "True author identities");
  sub->add_option("--homonym-rate", spec->homonym_rate, "Chance an identity reuses a name key");
  sub->add_option("--papers-min", spec->papers_min, "Fewest papers per identity");
  sub->add_option("--papers-max", spec->papers_max, "Most papers per identity");
  sub->add_option("--team-min", spec->team_min, "Smallest team");
  sub->add_option("--team-max", spec->team_max, "Largest team");
  sub->add_option("--stability", spec->coauthor_stability,
                  "Chance a teammate slot keeps the teammate");
  sub->add_option("--self-cite-rate", spec->self_citation_rate,
                  "Chance a later paper cites an earlier one of the same identity");
  sub->add_option("--cross-noise", spec->cross_citation_noise,
                  "Chance of a citation between same-key identities");
  sub->add_option("--name-model", *model, "Last-name distribution: uniform or heavy-tailed");
  sub->add_option("--tail-exponent", spec->heavy_tail_exponent,
                  "Power-law exponent for heavy-tailed names");
  sub->add_option("--last-pool", spec->last_name_pool, "Last-name pool size, 0 for automatic");
  sub->add_option("--initials-pool", spec->initials_pool, "Initials pool size");
  sub->add_flag("--disjoint-teams", spec->disjoint_homonym_teams,
                "Teams sharing a homonym key share no other last name");
  sub->add_option("--guest-locality", spec->guest_locality,
                  "Chance a guest comes from the hosting team's field");
  sub->callback([&common, spec, model] {
    const PipelineConfig cfg = effective_config(common);
    spec->seed = cfg.seed;
    if (*model == "uniform") {
      spec->name_model = NameModel::uniform;
    } else if (*model == "heavy-tailed") {
      spec->name_model = NameModel::heavy_tailed;
    } else {
      throw Error("unknown name model: " + *model);
    }

    const SynthResult result = generate_synthetic(*spec);
    const std::string dir = report_dir(common);
    emit_synthetic(result, dir);

    std::size_t homonym_names = 0;
    for (const auto& [key, partition] : result.truth) {
      if (partition.identities.size() >= 2) ++homonym_names;
    }
    ordered_json obj;
    obj["identities"] = spec->n_identities;
    obj["publications"] = result.corpus.size();
    obj["name_keys"] = result.truth.size();
    obj["homonym_names"] = homonym_names;
    obj["seed"] = spec->seed;
    write_text_file((fs::path(dir) / "synth_summary.json").string(), obj.dump(2) + "\n");
    std::cout << "generated " << result.corpus.size() << " publications, "
              << result.truth.size() << " name keys, " << homonym_names
              << " homonym names\n";
  });
}

void setup_pipeline(CLI::App& app, const CommonArgs& common) {
  auto* sub = app.add_subcommand("pipeline", "Full before/after analysis bundle");
  sub->fallthrough();
  struct Args {
    std::string corpus;
    std::string truth;
    int cutoff = 3;
    bool no_self_citation = false;
    bool no_coauthor_overlap = false;
    bool strict = false;
    bool occurrence_weighted = false;
    bool to_fixpoint = false;
    std::string method = "map-equation";
    bool weighted_degree = false;
    double division = 0.85;
    bool no_cache = false;
    CLI::Option* corpus_opt = nullptr;
    CLI::Option* truth_opt = nullptr;
    CLI::Option* cutoff_opt = nullptr;
    CLI::Option* nsc_opt = nullptr;
    CLI::Option* nco_opt = nullptr;
    CLI::Option* strict_opt = nullptr;
    CLI::Option* occ_opt = nullptr;
    CLI::Option* fix_opt = nullptr;
    CLI::Option* method_opt = nullptr;
    CLI::Option* wd_opt = nullptr;
    CLI::Option* div_opt = nullptr;
  };
  auto a = std::make_shared<Args>();
  a->corpus_opt = sub->add_option("--corpus", a->corpus, "Corpus JSONL path");
  a->truth_opt = sub->add_option("--truth", a->truth, "Ground-truth identities JSONL path");
  a->cutoff_opt = sub->add_option("--cutoff", a->cutoff, "Low-redundancy cutoff");
  a->nsc_opt = sub->add_flag("--no-self-citation", a->no_self_citation,
                             "Drop self-citation evidence");
  a->nco_opt = sub->add_flag("--no-coauthor-overlap", a->no_coauthor_overlap,
                             "Drop co-author overlap evidence");
  a->strict_opt = sub->add_flag("--strict-namekey", a->strict,
                                "Match co-authors by full name key, not last name");
  a->occ_opt = sub->add_flag("--occurrence-weighted", a->occurrence_weighted,
                             "Weight the redundancy CDF by author instances");
  a->fix_opt = sub->add_flag("--to-fixpoint", a->to_fixpoint,
                             "Repeat the two filter steps until stable");
  a->method_opt =
      sub->add_option("--method", a->method, "Clustering method: map-equation or modularity");
  a->wd_opt = sub->add_flag("--weighted-degree", a->weighted_degree,
                            "Use edge weights for the role metrics");
  a->div_opt = sub->add_option("--division-point", a->division,
                               "Average-article-redundancy split point");
  sub->add_flag("--no-cache", a->no_cache, "Disable the stage cache");
  sub->callback([&common, a] {
    PipelineConfig cfg = effective_config(common);
    if (a->corpus_opt->count()) cfg.corpus_path = a->corpus;
    if (a->truth_opt->count()) cfg.truth_path = a->truth;
    if (a->cutoff_opt->count()) cfg.disambig.low_redundancy_cutoff = a->cutoff;
    if (a->nsc_opt->count()) cfg.disambig.use_self_citation = false;
    if (a->nco_opt->count()) cfg.disambig.use_coauthor_overlap = false;
    if (a->strict_opt->count()) cfg.disambig.strict_namekey_match = true;
    if (a->occ_opt->count()) cfg.redundancy.occurrence_weighted = true;
    if (a->fix_opt->count()) cfg.filter.to_fixpoint = true;
    if (a->method_opt->count()) cfg.clustering.method = method_from_flag(a->method);
    if (a->wd_opt->count()) cfg.roles.weighted_degree = true;
    if (a->div_opt->count()) cfg.division_point = a->division;
    if (a->no_cache) cfg.cache = false;
    if (cfg.corpus_path.empty()) throw Error("pipeline needs --corpus or a config file");

    const PipelineSummary summary = run_pipeline(cfg);
    std::cout << "publications: " << summary.publications
              << ", name keys: " << summary.name_keys << "\n"
              << "identities before: " << summary.identities_before
              << ", after: " << summary.identities_after << "\n"
              << "giant component before: " << summary.giant_before << " ("
              << format_double(summary.giant_fraction_before)
              << "), after: " << summary.giant_after << " ("
              << format_double(summary.giant_fraction_after) << ")\n"
              << "distortion before: " << format_double(summary.distortion_before)
              << ", after: " << format_double(summary.distortion_after) << "\n";
    if (summary.median_k) {
      std::cout << "weighted median K: " << format_double(*summary.median_k) << "\n";
    }
    std::cout << "reports: " << summary.out_dir << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author name disambiguation and co-author network analysis"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "Pipeline config JSON with stage defaults");
  common.seed_opt = app.add_option("--seed", common.seed, "RNG seed");
  common.threads_opt = app.add_option("--threads", common.threads, "Worker cap");
  common.out_dir_opt = app.add_option("--out-dir", common.out_dir, "Output directory");

  setup_ingest(app, common);
  setup_redundancy(app, common);
  setup_disambiguate(app, common);
  setup_learn_cutoff(app, common);
  setup_network(app, common);
  setup_roles(app, common);
  setup_evaluate(app, common);
  setup_distortion(app, common);
  setup_sample(app, common);
  setup_synth(app, common);
  setup_pipeline(app, common);

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
