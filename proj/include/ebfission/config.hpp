#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebfission/harness.hpp"
#include "ebfission/model.hpp"

namespace ebfission {

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mc_reps;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
};

/// A parsed experiment file: one ExperimentConfig per listed likelihood,
/// all sharing prior, n, mc_reps, estimators, seed, and threads.
struct CliConfig {
  std::vector<ExperimentConfig> experiments;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

/// Parses TOML text of the form
///
///   seed = 7
///   n = 1000
///   mc_reps = 100
///   threads = 0            # optional
///   out = "results"        # optional
///   [prior]
///   atoms = [1.0, 4.0, 7.0]
///   weights = [...]        # optional, uniform when omitted
///   [[likelihood]]
///   kind = "gaussian"
///   variance = 1.0
///   [[estimator]]
///   kind = "aurora"        # mle | npmle | aurora | oracle_bayes
///   g_split = 0.04
///   fission_reps = 100
///
/// applies overrides, and validates every experiment. Throws ConfigError
/// with `source` in the message on any problem.
CliConfig parse_cli_config(std::string_view toml_text, const CliOverrides& overrides = {},
                           std::string_view source = "<string>");

/// Reads and parses a config file; a missing file is a ConfigError naming the path.
CliConfig load_cli_config(const std::filesystem::path& path, const CliOverrides& overrides = {});

/// Lossless TOML round trip of the model types ([prior] / [likelihood] tables).
std::string prior_to_toml(const PriorSpec& prior);
PriorSpec prior_from_toml(std::string_view toml_text);
std::string likelihood_to_toml(const LikelihoodModel& lik);
LikelihoodModel likelihood_from_toml(std::string_view toml_text);

/// The full n = 1000 benchmark for both likelihoods.
std::string benchmark_defaults_toml(std::uint64_t seed = 20231016);

}  // namespace ebfission
