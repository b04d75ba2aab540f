#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "btl/classifier.hpp"
#include "btl/cocycle.hpp"
#include "btl/conservativeness.hpp"
#include "btl/maharam.hpp"
#include "btl/scenario.hpp"

namespace btl {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct NonsingularityStage {
  NonsingularityVerdict verdict = NonsingularityVerdict::Unknown;
  NonatomicityVerdict nonatomicity = NonatomicityVerdict::Unknown;
  std::vector<CocycleReport> cocycles;
  EvidenceTrail evidence;
};

struct MonteCarloStage {
  LatticeFit fit;
  std::vector<RnSample> samples;
  std::optional<LatticeOrDense> classifier_lattice;
  // Fitted spacing against the classifier's lattice; absent when nothing to compare.
  std::optional<bool> agrees;
  std::string comparison;
};

struct RunReport {
  std::string tool_version{kToolVersion};
  std::string scenario_name;
  std::string scenario_origin;
  std::string scenario_hash;
  std::optional<std::uint64_t> seed;
  std::string group;
  std::string group_model;
  std::string profile;
  std::vector<std::string> stages;

  std::optional<NonsingularityStage> nonsingularity;
  std::optional<ConservativenessVerdict> conservativeness;
  std::optional<TypeVerdict> type;
  std::optional<MonteCarloStage> mc;

  // Set by a budget overrun; later stages are skipped and listed in issues.
  bool incomplete = false;
  std::vector<std::string> issues;
  std::vector<StageTiming> timing;

  // Verdict of the last executed stage is Unknown.
  bool unknown() const;
};

// Stages in dependency order; a requested stage also runs the stages it consumes.
RunReport run(const Scenario& scenario);

// Canonical JSON, keys sorted. Without timing the text is reproducible for a fixed scenario, seed and version.
std::string to_json(const RunReport& report, bool include_timing = true, int indent = 2);

// report.json plus samples.csv (g, log_rn, truncated, seed) and histogram.csv when MC ran.
std::vector<std::filesystem::path> write_report(const RunReport& report, const std::filesystem::path& dir,
                                                 const GroupModel& group);

// Short human readable name of the group model.
std::string group_label(const GroupModel& group);

// Plain text summary, one line per stage.
std::string summary(const RunReport& report);

}  // namespace btl
