#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace nf {

// One end-to-end acceptance criterion of the release checklist. Tolerances
// are pinned in the implementation; `detail` carries the measured numbers.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the ten release criteria in order, printing one PASS/FAIL line per
// criterion to `log`. Scratch files (determinism byte-compare) go under
// `scratch_dir`. Thread count changes runtime only, never results.
std::vector<CriterionResult> run_acceptance(int threads,
                                            const std::filesystem::path& scratch_dir,
                                            std::ostream& log);

bool all_pass(const std::vector<CriterionResult>& results);

// {"pass": bool, "criteria": [{index, name, pass, detail, seconds}, ...]}
void write_verdict_json(const std::filesystem::path& path,
                        const std::vector<CriterionResult>& results);

}  // namespace nf
