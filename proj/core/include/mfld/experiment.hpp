#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfld/config.hpp"

namespace mfld {

const char* version_string();

struct OutputArtifact {
  std::string file;  // name relative to the output directory
  std::string hash;  // fnv1a-64 of the bytes, 16 hex digits
};

// Provenance shell around one subcommand run. Written to record.json in the
// output directory on every exit path; wall-clock timings live here and
// nowhere else, so the data files stay byte-reproducible.
struct ExperimentRecord {
  std::string version;
  std::string subcommand;
  std::string config_text;  // canonical serialization of the run's config
  std::vector<OutputArtifact> outputs;
  std::vector<std::pair<std::string, double>> timings;      // stage -> seconds
  std::vector<std::pair<std::string, std::string>> diagnostics;
  bool success = false;
  std::string error;
};

void write_record(const ExperimentRecord& rec, const std::string& directory);

ExperimentRecord run_hartree(const ExperimentConfig& c);
ExperimentRecord run_fluctuation(const ExperimentConfig& c);
ExperimentRecord run_oracle(const ExperimentConfig& c);
ExperimentRecord run_compare(const ExperimentConfig& c);

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfTestResult {
  std::vector<SelfTestCheck> checks;
  double elapsed_seconds = 0;

  int failures() const;
  bool passed() const { return failures() == 0; }
};

// Reduced-size invariant battery, sequential, well under a minute.
// inject_k2_defect corrupts one K2 entry before the symmetry check and is
// the hook for the negative self-test.
SelfTestResult self_test(std::uint64_t seed, bool inject_k2_defect = false);

}  // namespace mfld
