#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homonet/community.hpp"
#include "homonet/disambig.hpp"
#include "homonet/evaluation.hpp"
#include "homonet/network.hpp"
#include "homonet/redundancy.hpp"

namespace homonet {

struct PipelineConfig {
  std::string corpus_path;
  std::string truth_path;  // optional; enables K reports and error tables
  std::string out_dir;

  DisambigConfig disambig;
  RedundancyOptions redundancy;
  ClusterOptions clustering;
  RoleThresholds roles;
  NetworkFilterOptions filter;
  double division_point = 0.85;  // article-redundancy regime split in reports

  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool cache = true;

  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
};

struct PipelineSummary {
  std::size_t publications = 0;
  std::size_t name_keys = 0;
  // Before/after disambiguation.
  std::size_t identities_before = 0;
  std::size_t identities_after = 0;
  std::size_t giant_before = 0;
  std::size_t giant_after = 0;
  double giant_fraction_before = 0.0;
  double giant_fraction_after = 0.0;
  double distortion_before = 0.0;
  double distortion_after = 0.0;
  std::optional<double> median_k;  // present when ground truth was supplied

  std::string out_dir;  // bundle location
  bool cache_hit = false;
};

// Runs the full pipeline and writes a report bundle into config.out_dir:
// config.json, summary.json, and per-variant (before/, after/) network
// summaries, role distributions, per-role redundancy CDFs and distortion
// scores, plus evaluation tables when ground truth is given. The bundle is
// assembled in a staging directory and moved into place on success, so a
// failed run leaves no partial outputs. run_meta.json holds the only
// timestamps; everything else is byte-deterministic for a fixed config.
PipelineSummary run_pipeline(const PipelineConfig& config);

// Report emitters shared by the pipeline bundle and the CLI subcommands.
// Each writes fixed-name CSV/JSON files into dir (which must exist).
void write_network_reports(const std::string& dir, const CoauthorNetwork& net);
void write_role_reports(const std::string& dir, const CoauthorNetwork& net,
                        const Clustering& clustering,
                        const std::vector<NodeRoleMetrics>& metrics);
void write_distortion_report(const std::string& dir, const DistortionReport& report);
void write_evaluation_report(const std::string& dir, const EvaluationReport& report);

}  // namespace homonet
