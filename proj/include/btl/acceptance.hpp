#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "btl/cocycle.hpp"
#include "btl/group.hpp"
#include "btl/profile.hpp"

namespace btl {

// The closed formulas the acceptance rows check against their oracles; mutants replace one of them.
struct Formulas {
  std::function<std::uint64_t(const GroupModel&, int)> sphere_count;
  std::function<double(const MarginalProfile&, double, const ConfigurationWindow&, const ConfigurationWindow&)>
      gamma_rho;
  std::function<double(double)> kappa0;
};

Formulas reference_formulas();

enum class Mutant { SphereOffByOne, GammaDropsRho, Kappa0DeltaSquared };

std::string to_string(Mutant m);
std::vector<Mutant> all_mutants();
Formulas mutant_formulas(Mutant m);

struct AcceptanceRow {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string expected;
  std::string note;
  double seconds = 0.0;
  double time_limit = 0.0;
};

struct AcceptanceOptions {
  Formulas formulas = reference_formulas();
  std::filesystem::path scenario_dir;
  std::size_t mc_samples = 100000;
  // Row 10 reruns the formula-dependent rows under every mutant.
  bool mutation_row = true;
  std::vector<int> only;
};

inline constexpr double kRnTol = 1e-10;
inline constexpr double kLambdaTol = 1e-9;
inline constexpr double kSpacingTol = 1e-6;
inline constexpr double kArithmeticTol = 1e-12;

std::vector<AcceptanceRow> run_acceptance(const AcceptanceOptions& options);

// Rows whose check is known to disagree with the stated target, with the reason; see README.
struct KnownDeviation {
  int row;
  std::string reason;
};
std::vector<KnownDeviation> known_deviations();

}  // namespace btl
