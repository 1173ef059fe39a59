#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcsma::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::filesystem::path out_dir = "qcsma-validate";
  unsigned threads = 0;
  std::ostream* progress = nullptr;  // one line per finished criterion
};

// Criteria 1..10; each writes its data files into `dir`.
std::vector<CriterionResult> run_statistical_criteria(std::uint64_t seed, const std::filesystem::path& dir,
                                                      unsigned threads, std::ostream* progress);

// The full suite: 1..10 into out_dir/run-a, again into out_dir/run-b, then the
// byte comparison of both trees as criterion 11. Writes out_dir/validate_report.txt.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

// Sorted relative paths whose contents differ (or exist on one side only).
std::vector<std::string> diff_trees(const std::filesystem::path& a, const std::filesystem::path& b);

std::string format_result(const CriterionResult& r, bool color);

}  // namespace qcsma::cli
