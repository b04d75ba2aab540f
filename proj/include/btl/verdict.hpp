#pragma once

#include <string>
#include <vector>

namespace btl {

enum class SeriesVerdict { Converges, Diverges, Unknown };

inline std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Converges:
      return "Converges";
    case SeriesVerdict::Diverges:
      return "Diverges";
    default:
      return "Unknown";
  }
}

// A partial sum over a finite ball together with the verdict on the full series.
struct SeriesEstimate {
  double partial = 0.0;
  int radius = 0;
  SeriesVerdict verdict = SeriesVerdict::Unknown;
  std::string reason;
};

// One step of a decision trail: which criterion fired, on what inputs, with what outcome.
struct Evidence {
  std::string criterion;
  std::string inputs;
  std::string outcome;
};

using EvidenceTrail = std::vector<Evidence>;

}  // namespace btl
