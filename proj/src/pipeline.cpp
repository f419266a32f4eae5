#include "homonet/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "homonet/io_util.hpp"

namespace homonet {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* method_name(ClusterMethod m) {
  return m == ClusterMethod::map_equation ? "map_equation" : "modularity";
}

ClusterMethod method_from_name(const std::string& name) {
  if (name == "map_equation") return ClusterMethod::map_equation;
  if (name == "modularity") return ClusterMethod::modularity;
  throw Error("unknown clustering method: " + name);
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string hex_key(std::uint64_t key) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(key));
  return buf;
}

std::string serialize_assignment(const Clustering& clustering) {
  ordered_json obj;
  obj["method"] = method_name(clustering.method);
  obj["cluster_count"] = clustering.cluster_count;
  obj["quality"] = clustering.quality;
  obj["assignment"] = clustering.assignment;
  return obj.dump();
}

Clustering parse_assignment(const std::string& text, std::size_t expected_nodes) {
  nlohmann::json obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded()) throw Error("corrupt clustering cache entry");
  Clustering clustering;
  clustering.method = method_from_name(obj.at("method").get<std::string>());
  clustering.cluster_count = obj.at("cluster_count").get<std::uint32_t>();
  clustering.quality = obj.at("quality").get<double>();
  clustering.assignment = obj.at("assignment").get<std::vector<std::uint32_t>>();
  if (clustering.assignment.size() != expected_nodes)
    throw Error("clustering cache entry does not match the network");
  return clustering;
}

// Content key of the clustering input: the giant component's edge structure
// plus every knob that steers the optimizer.
std::uint64_t clustering_cache_key(const CoauthorNetwork& giant, const PipelineConfig& config) {
  std::ostringstream input;
  input << "cluster-v1|" << method_name(config.clustering.method) << '|'
        << config.clustering.max_passes << '|' << format_double(config.clustering.min_gain)
        << '|' << config.seed << '|' << giant.node_count() << '|';
  for (const AuthorNode& node : giant.nodes()) input << node.label << ';';
  for (const NetworkEdge& e : giant.edges()) {
    input << e.u << ',' << e.v << ',' << e.weight << ';';
  }
  return fnv1a64(input.str());
}

struct VariantOutputs {
  std::size_t identities = 0;
  std::size_t network_nodes = 0;
  std::size_t giant_nodes = 0;
  double giant_fraction = 0.0;
  double distortion = 0.0;
  std::optional<double> median_k;
};

VariantOutputs run_variant(const fs::path& dir, const Corpus& corpus,
                           const std::map<NameKey, IdentityPartition>& identities,
                           const RedundancyTable& table, const GroundTruth* truth,
                           const PipelineConfig& config, const fs::path& cache_read,
                           const fs::path& cache_write) {
  fs::create_directories(dir);
  VariantOutputs out;
  for (const auto& [key, partition] : identities) out.identities += partition.identities.size();

  CoauthorNetwork net = build_network(corpus, identities, config.filter);
  write_network_reports(dir.string(), net);
  out.network_nodes = net.node_count();

  std::map<std::string, Role> role_of_label;
  if (!net.empty()) {
    CoauthorNetwork giant = giant_component(net);
    out.giant_nodes = giant.node_count();
    out.giant_fraction =
        static_cast<double>(giant.node_count()) / static_cast<double>(net.node_count());

    Clustering clustering;
    const std::string cache_name =
        "cluster-" + hex_key(clustering_cache_key(giant, config)) + ".json";
    if (config.cache && fs::exists(cache_read / cache_name)) {
      clustering = parse_assignment(read_text_file((cache_read / cache_name).string()),
                                    giant.node_count());
    } else {
      clustering = cluster_network(giant, config.seed, config.clustering);
    }
    if (config.cache) {
      fs::create_directories(cache_write);
      write_text_file((cache_write / cache_name).string(), serialize_assignment(clustering));
    }

    ordered_json cluster_json;
    cluster_json["method"] = method_name(clustering.method);
    cluster_json["cluster_count"] = clustering.cluster_count;
    cluster_json["quality"] = clustering.quality;
    write_text_file((dir / "clustering.json").string(), cluster_json.dump(2) + "\n");

    std::vector<NodeRoleMetrics> metrics = classify_roles(giant, clustering, config.roles);
    write_role_reports(dir.string(), giant, clustering, metrics);

    DistortionReport distortion = distortion_analysis(giant, metrics, table);
    out.distortion = distortion.score;
    write_distortion_report(dir.string(), distortion);

    for (std::size_t i = 0; i < giant.node_count(); ++i) {
      role_of_label.emplace(giant.nodes()[i].label, metrics[i].role);
    }
  } else {
    write_distortion_report(dir.string(), DistortionReport{});
  }

  if (truth) {
    EvaluationReport report =
        evaluate(*truth, identities, role_of_label.empty() ? nullptr : &role_of_label);
    out.median_k = report.overall.median;
    write_evaluation_report(dir.string(), report);
  }
  return out;
}

}  // namespace

void write_network_reports(const std::string& dir, const CoauthorNetwork& net) {
  const fs::path base(dir);

  CsvWriter nodes((base / "nodes.csv").string());
  nodes.row({"label", "paper_count"});
  std::size_t single_paper = 0;
  for (const AuthorNode& node : net.nodes()) {
    nodes.row({node.label, std::to_string(node.paper_ids.size())});
    if (node.paper_ids.size() == 1) ++single_paper;
  }

  CsvWriter edges((base / "edges.csv").string());
  edges.row({"u", "v", "weight"});
  for (const NetworkEdge& e : net.edges()) {
    edges.row({net.nodes()[e.u].label, net.nodes()[e.v].label, std::to_string(e.weight)});
  }

  const std::size_t giant = net.empty() ? 0 : net.component_size(0);
  ordered_json obj;
  obj["node_count"] = net.node_count();
  obj["edge_count"] = net.edge_count();
  obj["component_count"] = net.component_count();
  obj["giant_nodes"] = giant;
  obj["giant_fraction"] =
      net.empty() ? 0.0
                  : static_cast<double>(giant) / static_cast<double>(net.node_count());
  obj["single_paper_fraction"] =
      net.empty() ? 0.0
                  : static_cast<double>(single_paper) / static_cast<double>(net.node_count());
  write_text_file((base / "network_summary.json").string(), obj.dump(2) + "\n");
}

void write_role_reports(const std::string& dir, const CoauthorNetwork& net,
                        const Clustering& clustering,
                        const std::vector<NodeRoleMetrics>& metrics) {
  const fs::path base(dir);

  CsvWriter nodes((base / "roles.csv").string());
  nodes.row({"label", "cluster", "z", "participation", "role"});
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    nodes.row({net.nodes()[i].label, std::to_string(clustering.assignment[i]),
               format_double(metrics[i].z), format_double(metrics[i].participation),
               role_name(metrics[i].role)});
  }

  RoleDistribution dist = role_distribution(metrics);
  CsvWriter table((base / "role_distribution.csv").string());
  table.row({"role", "count", "fraction"});
  for (const auto& [role, count] : dist.counts) {
    auto fraction = dist.fraction(role);
    table.row({role_name(role), std::to_string(count),
               fraction ? format_double(*fraction) : std::string()});
  }
}

void write_distortion_report(const std::string& dir, const DistortionReport& report) {
  const fs::path base(dir);

  CsvWriter cdf((base / "redundancy_by_role.csv").string());
  cdf.row({"role", "raw", "cum_fraction"});
  for (const auto& [role, samples] : report.raw_by_role) {
    std::map<int, std::size_t> counts;
    for (int raw : samples) counts[raw] += 1;
    std::size_t cum = 0;
    for (const auto& [raw, count] : counts) {
      cum += count;
      cdf.row({role_name(role), std::to_string(raw),
               format_double(static_cast<double>(cum) / static_cast<double>(samples.size()))});
    }
  }

  ordered_json obj;
  obj["score"] = report.score;
  auto pairs = ordered_json::array();
  for (const auto& [roles, d] : report.ks) {
    pairs.push_back({{"a", role_name(roles.first)}, {"b", role_name(roles.second)}, {"ks", d}});
  }
  obj["pairs"] = std::move(pairs);
  auto omitted = ordered_json::array();
  for (Role r : report.omitted) omitted.push_back(role_name(r));
  obj["omitted_roles"] = std::move(omitted);
  write_text_file((base / "distortion.json").string(), obj.dump(2) + "\n");
}

void write_evaluation_report(const std::string& dir, const EvaluationReport& report) {
  const fs::path base(dir);

  CsvWriter names((base / "evaluation.csv").string());
  names.row({"last", "initials", "articles", "true_identities", "empirical_identities", "acp",
             "aap", "k", "over_split", "over_merged"});
  for (const NameEvaluation& ne : report.names) {
    names.row({ne.key.last, ne.key.initials, std::to_string(ne.articles),
               std::to_string(ne.true_identities), std::to_string(ne.empirical_identities),
               format_double(ne.score.acp), format_double(ne.score.aap),
               format_double(ne.score.k), ne.over_split ? "1" : "0",
               ne.over_merged ? "1" : "0"});
  }

  auto row_json = [](const QuantileRow& row) {
    return ordered_json{{"median", row.median},
                        {"q25", row.q25},
                        {"minimum", row.minimum},
                        {"names", row.names},
                        {"weight", row.weight}};
  };
  ordered_json obj;
  obj["overall"] = row_json(report.overall);
  ordered_json errors;
  for (const auto& [type, count] : report.error_counts) errors[error_type_name(type)] = count;
  obj["error_counts"] = std::move(errors);
  obj["remaining"] = {{"names", report.remaining.names},
                      {"correct", report.remaining.correct},
                      {"over_split", report.remaining.over_split},
                      {"over_merged", report.remaining.over_merged},
                      {"both", report.remaining.both}};
  ordered_json by_role;
  for (const auto& [role, row] : report.by_role) by_role[role_name(role)] = row_json(row);
  obj["by_role"] = std::move(by_role);
  ordered_json errors_by_role;
  for (const auto& [role, table] : report.errors_by_role) {
    ordered_json row;
    for (const auto& [type, count] : table) row[error_type_name(type)] = count;
    errors_by_role[role_name(role)] = std::move(row);
  }
  obj["errors_by_role"] = std::move(errors_by_role);
  write_text_file((base / "evaluation_summary.json").string(), obj.dump(2) + "\n");
}

std::string PipelineConfig::to_json() const {
  // Execution-only settings (out_dir, threads, cache) are left out: the
  // bundle's config.json describes what was computed, and must stay
  // byte-identical across runs that differ only in where or how fast.
  ordered_json obj;
  obj["corpus"] = corpus_path;
  obj["truth"] = truth_path;
  obj["disambig"] = {{"cutoff", disambig.low_redundancy_cutoff},
                     {"self_citation", disambig.use_self_citation},
                     {"coauthor_overlap", disambig.use_coauthor_overlap},
                     {"strict_namekey_match", disambig.strict_namekey_match}};
  obj["redundancy"] = {{"occurrence_weighted", redundancy.occurrence_weighted},
                       {"distinct_last_names", redundancy.distinct_last_names}};
  obj["clustering"] = {{"method", method_name(clustering.method)},
                       {"max_passes", clustering.max_passes},
                       {"min_gain", clustering.min_gain}};
  obj["roles"] = {{"z_hub", roles.z_hub},         {"nonhub_p1", roles.nonhub_p1},
                  {"nonhub_p2", roles.nonhub_p2}, {"nonhub_p3", roles.nonhub_p3},
                  {"hub_p1", roles.hub_p1},       {"hub_p2", roles.hub_p2},
                  {"weighted_degree", roles.weighted_degree}};
  obj["filter"] = {{"to_fixpoint", filter.to_fixpoint}};
  obj["division_point"] = division_point;
  obj["seed"] = seed;
  return obj.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  nlohmann::json obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error("invalid pipeline config JSON");
  PipelineConfig config;
  config.corpus_path = obj.value("corpus", std::string());
  config.truth_path = obj.value("truth", std::string());
  config.out_dir = obj.value("out_dir", std::string());
  if (obj.contains("disambig")) {
    const auto& d = obj.at("disambig");
    config.disambig.low_redundancy_cutoff =
        d.value("cutoff", config.disambig.low_redundancy_cutoff);
    config.disambig.use_self_citation =
        d.value("self_citation", config.disambig.use_self_citation);
    config.disambig.use_coauthor_overlap =
        d.value("coauthor_overlap", config.disambig.use_coauthor_overlap);
    config.disambig.strict_namekey_match =
        d.value("strict_namekey_match", config.disambig.strict_namekey_match);
  }
  if (obj.contains("redundancy")) {
    const auto& r = obj.at("redundancy");
    config.redundancy.occurrence_weighted =
        r.value("occurrence_weighted", config.redundancy.occurrence_weighted);
    config.redundancy.distinct_last_names =
        r.value("distinct_last_names", config.redundancy.distinct_last_names);
  }
  if (obj.contains("clustering")) {
    const auto& c = obj.at("clustering");
    config.clustering.method =
        method_from_name(c.value("method", std::string(method_name(config.clustering.method))));
    config.clustering.max_passes = c.value("max_passes", config.clustering.max_passes);
    config.clustering.min_gain = c.value("min_gain", config.clustering.min_gain);
  }
  if (obj.contains("roles")) {
    const auto& r = obj.at("roles");
    config.roles.z_hub = r.value("z_hub", config.roles.z_hub);
    config.roles.nonhub_p1 = r.value("nonhub_p1", config.roles.nonhub_p1);
    config.roles.nonhub_p2 = r.value("nonhub_p2", config.roles.nonhub_p2);
    config.roles.nonhub_p3 = r.value("nonhub_p3", config.roles.nonhub_p3);
    config.roles.hub_p1 = r.value("hub_p1", config.roles.hub_p1);
    config.roles.hub_p2 = r.value("hub_p2", config.roles.hub_p2);
    config.roles.weighted_degree = r.value("weighted_degree", config.roles.weighted_degree);
  }
  if (obj.contains("filter")) {
    config.filter.to_fixpoint = obj.at("filter").value("to_fixpoint", config.filter.to_fixpoint);
  }
  config.division_point = obj.value("division_point", config.division_point);
  config.seed = obj.value("seed", config.seed);
  config.threads = obj.value("threads", config.threads);
  config.cache = obj.value("cache", config.cache);
  return config;
}

PipelineSummary run_pipeline(const PipelineConfig& config) {
  if (config.out_dir.empty()) throw Error("pipeline needs an output directory");
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = timestamp_utc();

  const fs::path out_dir(config.out_dir);
  const fs::path staging = out_dir.string() + ".staging";
  const fs::path cache_read = out_dir / "cache";
  const fs::path cache_write = staging / "cache";
  std::error_code ec;
  fs::remove_all(staging, ec);

  try {
    fs::create_directories(staging);

    Corpus corpus = parse_corpus_file(config.corpus_path);
    if (corpus.empty()) throw Error("ingest: corpus is empty");
    std::optional<GroundTruth> truth;
    if (!config.truth_path.empty()) {
      truth = parse_identities_file(config.truth_path);
    }

    RedundancyTable table = build_redundancy_table(corpus, config.redundancy);

    std::string corpus_bytes;
    {
      std::ostringstream buf;
      serialize_corpus(corpus, buf);
      corpus_bytes = buf.str();
    }

    // Disambiguation, cached on a content key of the corpus plus the knobs
    // that shape the result.
    std::map<NameKey, IdentityPartition> resolved;
    bool disambig_cache_hit = false;
    {
      std::ostringstream key_input;
      key_input << "disambig-v1|" << config.disambig.low_redundancy_cutoff << '|'
                << config.disambig.use_self_citation << '|'
                << config.disambig.use_coauthor_overlap << '|'
                << config.disambig.strict_namekey_match << '|'
                << config.redundancy.occurrence_weighted << '|' << corpus_bytes;
      const std::string cache_name = "disambig-" + hex_key(fnv1a64(key_input.str())) + ".jsonl";
      if (config.cache && fs::exists(cache_read / cache_name)) {
        resolved = parse_identities_file((cache_read / cache_name).string());
        disambig_cache_hit = true;
      } else {
        resolved = resolve_corpus(corpus, table, config.disambig, config.threads);
      }
      if (config.cache) {
        fs::create_directories(cache_write);
        serialize_identities_file(resolved, (cache_write / cache_name).string());
      }
      std::ostringstream buf;
      serialize_identities(resolved, buf);
      write_text_file((staging / "identities.jsonl").string(), buf.str());
    }

    write_text_file((staging / "config.json").string(), config.to_json());

    std::map<NameKey, IdentityPartition> before = trivial_identities(corpus);
    VariantOutputs before_out =
        run_variant(staging / "before", corpus, before, table, truth ? &*truth : nullptr,
                    config, cache_read, cache_write);
    VariantOutputs after_out =
        run_variant(staging / "after", corpus, resolved, table, truth ? &*truth : nullptr,
                    config, cache_read, cache_write);

    PipelineSummary summary;
    summary.publications = corpus.size();
    summary.name_keys = corpus.name_index().size();
    summary.identities_before = before_out.identities;
    summary.identities_after = after_out.identities;
    summary.giant_before = before_out.giant_nodes;
    summary.giant_after = after_out.giant_nodes;
    summary.giant_fraction_before = before_out.giant_fraction;
    summary.giant_fraction_after = after_out.giant_fraction;
    summary.distortion_before = before_out.distortion;
    summary.distortion_after = after_out.distortion;
    summary.median_k = after_out.median_k;
    summary.out_dir = config.out_dir;
    summary.cache_hit = disambig_cache_hit;

    // Name keys split by average article redundancy at the division point.
    std::size_t keys_below = 0;
    for (const auto& [key, ids] : corpus.name_index()) {
      if (average_article_redundancy(table, corpus, key, config.redundancy) <
          config.division_point)
        ++keys_below;
    }

    ordered_json obj;
    obj["publications"] = summary.publications;
    obj["name_keys"] = summary.name_keys;
    obj["identities_before"] = summary.identities_before;
    obj["identities_after"] = summary.identities_after;
    obj["giant_before"] = summary.giant_before;
    obj["giant_after"] = summary.giant_after;
    obj["giant_fraction_before"] = summary.giant_fraction_before;
    obj["giant_fraction_after"] = summary.giant_fraction_after;
    obj["distortion_before"] = summary.distortion_before;
    obj["distortion_after"] = summary.distortion_after;
    if (summary.median_k) obj["median_k"] = *summary.median_k;
    obj["division_point"] = config.division_point;
    obj["keys_below_division"] = keys_below;
    obj["keys_above_division"] = summary.name_keys - keys_below;
    write_text_file((staging / "summary.json").string(), obj.dump(2) + "\n");

    const auto finished = std::chrono::steady_clock::now();
    ordered_json meta;
    meta["started"] = started_at;
    meta["finished"] = timestamp_utc();
    meta["elapsed_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(finished - started).count();
    write_text_file((staging / "run_meta.json").string(), meta.dump(2) + "\n");

    fs::remove_all(out_dir);
    fs::rename(staging, out_dir);
    return summary;
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace homonet
