// Release acceptance runner: executes the ten end-to-end criteria and writes
// verdict.json into the scratch directory. Exit 0 only if every criterion
// passes. Usage: nf_acceptance [scratch-dir]; NF_ACCEPT_THREADS overrides the
// worker count (results are identical for any value).
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "nf/acceptance.hpp"

int main(int argc, char** argv) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, 8);
  if (const char* env = std::getenv("NF_ACCEPT_THREADS"))
    threads = std::max(1, std::atoi(env));

  const std::filesystem::path scratch =
      argc > 1 ? std::filesystem::path(argv[1])
               : std::filesystem::temp_directory_path() / "nf_acceptance";

  try {
    const auto results = nf::run_acceptance(threads, scratch, std::cout);
    nf::write_verdict_json(scratch / "verdict.json", results);
    const bool ok = nf::all_pass(results);
    std::cout << "acceptance: " << (ok ? "PASS" : "FAIL") << " (verdict at "
              << (scratch / "verdict.json").string() << ")\n";
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "acceptance runner error: " << e.what() << "\n";
    return 1;
  }
}
