#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "greedy/config.hpp"
#include "greedy/expansion.hpp"

namespace greedy {

// One completed iteration m >= 1.
struct IterationRecord {
  std::size_t m = 0;
  std::optional<std::size_t> atom;  // empty for a stationary no-op
  double lambda = 0.0;
  std::optional<double> w;  // free-relaxation algorithms only
  double value = 0.0;       // E(G_m)
  double delta = 0.0;       // scheduled slack delta_{m-1}
  double injected_error = 0.0;
  double certified_gap = 0.0;
  bool stationary = false;
  Expansion snapshot;
};

// Where the reference value b came from.
enum class ReferenceSource { kNone, kAnalytic, kBruteForce, kSupplied };

inline const char* to_string(ReferenceSource s) {
  switch (s) {
    case ReferenceSource::kNone: return "none";
    case ReferenceSource::kAnalytic: return "analytic";
    case ReferenceSource::kBruteForce: return "brute-force";
    case ReferenceSource::kSupplied: return "supplied";
  }
  return "?";
}

struct Reference {
  double value = 0.0;
  ReferenceSource source = ReferenceSource::kSupplied;
  std::string note;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::kWRGA;
  std::string objective;
  std::optional<Reference> reference;
  double initial_value = 0.0;  // E(G_0) = E(0)
  std::vector<IterationRecord> records;
  bool aborted = false;
  std::string abort_reason;

  std::size_t iterations() const noexcept { return records.size(); }

  // E(G_m), m = 0..iterations()
  std::vector<double> values() const {
    std::vector<double> v{initial_value};
    for (const auto& r : records) v.push_back(r.value);
    return v;
  }

  // a_m = E(G_m) - b; requires a reference.
  std::vector<double> excess() const {
    if (!reference) throw InvalidArgument("trace has no reference value b");
    std::vector<double> v = values();
    for (double& x : v) x -= reference->value;
    return v;
  }
};

}  // namespace greedy
