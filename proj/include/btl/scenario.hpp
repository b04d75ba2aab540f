#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btl/classifier.hpp"
#include "btl/conservativeness.hpp"
#include "btl/error.hpp"
#include "btl/maharam.hpp"
#include "btl/profile.hpp"

namespace btl {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Stage { Nonsingularity, Conservativeness, Classification, MonteCarlo };

std::string to_string(Stage s);
std::vector<Stage> all_stages();

// Every offending field of a rejected scenario, one entry per field.
class ScenarioError : public ValidationError {
 public:
  explicit ScenarioError(std::vector<std::string> fields);
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

// Command-line values that replace the corresponding scenario fields before validation.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> radius;
  std::optional<std::size_t> mc_samples;
  // Replaces the requested stages; an empty list loads the group block alone.
  std::optional<std::vector<Stage>> stages;
};

struct Scenario {
  std::string name;
  std::string origin;
  // Canonical TOML of the scenario after overrides; the scenario hash is taken over it.
  std::string canonical;
  std::string hash;

  GroupPtr group;
  std::optional<MarginalProfile> profile;
  std::string profile_builtin;

  std::vector<Stage> stages;
  std::optional<std::uint64_t> seed;

  int cocycle_radius = 4;
  std::vector<Element> cocycle_elements;
  ConservativenessOptions conservativeness;
  ClassifyOptions classification;
  SamplingOptions mc;
  bool mc_allow_truncated = false;

  bool wants(Stage s) const;
  bool has_profile() const { return profile.has_value(); }
  const MarginalProfile& marginals() const { return *profile; }
};

// Throws ScenarioError listing every invalid field; BudgetError when group or profile data exceed the budget.
Scenario parse_scenario(std::string_view toml_text, std::string origin = "<string>",
                        const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace btl
