#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hsagg/netsim.hpp"

namespace hsagg {

// Resolved experiment parameters. p, when absent, defaults to
// next_prime_above(K*(q-1)) and may be escalated to the next prime if the
// randomized constructions fail; an explicit p is never overridden.
struct ExperimentConfig {
  std::uint32_t K = 5;
  std::uint32_t d = 3;
  std::uint32_t s = 1;
  std::uint32_t q = 3;
  std::optional<std::uint32_t> p;
  std::uint32_t L = 2;
  std::uint64_t seed = 1;
  std::string drop = "exhaustive";  // "exhaustive" | "bernoulli:P1,P2" | "fixed:r2s=..;c2r=.."
  std::uint32_t trials = 1;
  std::optional<std::uint64_t> budget;
  std::string vectors = "data/example_k5.json";
  std::string out;  // report path; empty = stdout
};

// Flat key=value text (# comments) or a JSON object; unknown keys rejected.
ExperimentConfig parse_config_file(const std::string& path);

DropModel parse_drop_spec(const std::string& spec, std::uint64_t seed);

// Exit codes: 0 ok, 1 verification mismatch, 2 invalid config,
// 3 construction failure.
int cmd_verify_example(const ExperimentConfig& cfg);
int cmd_run(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_audit(const ExperimentConfig& cfg);

}  // namespace hsagg
