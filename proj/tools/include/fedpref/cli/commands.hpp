#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedpref::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
};

// Log level from the FEDPREF_LOG environment variable (trace, debug, info,
// warn, err, off); warn when unset.
void configure_logging();

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
  std::size_t threads = 1;
};

// Executes one run, or every algorithm × seed of a campaign, writing
// manifest.json, rounds.jsonl, solutions.csv and metrics.json per run. A
// campaign also writes reference_front.csv (the Pareto front of all runs)
// and campaign.json. Diagnostics go to `err`.
int run(const RunOptions& options, std::ostream& err);

// Mean and population standard deviation per algorithm over the given run
// directories (a campaign directory expands to its runs).
int summarize(std::span<const std::filesystem::path> dirs,
              const std::optional<std::filesystem::path>& json_out, std::ostream& out,
              std::ostream& err);

int metrics(const std::filesystem::path& solutions, std::span<const double> ref_point,
            const std::optional<std::filesystem::path>& ref_front, std::ostream& out,
            std::ostream& err);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population convention (divide by n)
};
MeanStd mean_std(std::span<const double> values);

}  // namespace fedpref::cli
