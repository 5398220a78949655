#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgap/sigma.hpp"

namespace mgap {

// Schema violations, with one "path: message" entry per issue.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> issues_in);
  std::vector<std::string> issues;
};

enum class Task { kValidate, kGap, kBounds, kLemmas, kSigma };

std::string to_string(Task t);

struct ExperimentConfig {
  explicit ExperimentConfig(TracialAlgebra algebra_in)
      : algebra(std::move(algebra_in)) {}

  TracialAlgebra algebra;
  std::optional<MarkovMap> channel;
  std::string channel_id;  // short label for report rows
  std::optional<Subalgebra> subalgebra_a;
  std::optional<Subalgebra> subalgebra_b;
  std::optional<double> c2_literal;  // bounds task without a channel
  std::vector<double> p_grid;
  std::vector<Task> tasks;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int restarts = 20;
  int max_iters = 5000;
  double tol = 1e-10;
  int lemma_count = 1000;
  int threads = 1;
  std::string out_path;
  std::string format = "csv";  // csv | json
};

// Parses and validates a JSON configuration document. Channel construction
// happens eagerly; Markov-validation failures are data (the channel carries
// its reason), schema failures throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Built-in default experiment (used by the CLI when --config is omitted).
std::string default_config_json();

// Element <-> JSON codec shared by configs and witness reports. Matrices are
// nested arrays of [re, im] pairs; multi-block elements wrap them in
// {"blocks": [...]}.
std::string element_to_json(const AlgebraElement& x);
AlgebraElement element_from_json(const TracialAlgebra& algebra,
                                 const std::string& text);

}  // namespace mgap
