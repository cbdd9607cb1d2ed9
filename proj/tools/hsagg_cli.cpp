#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsagg/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint32_t> K, d, s, q, p, L, trials;
  std::optional<std::uint64_t> seed, budget;
  std::optional<std::string> drop, vectors, out;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "config file (key=value lines or a JSON object)");
  sub->add_option("--K", f.K, "number of clients (= relays)");
  sub->add_option("--d", f.d, "relays reachable per client");
  sub->add_option("--s", f.s, "relay dropouts tolerated by decode");
  sub->add_option("--q", f.q, "model entry alphabet size");
  sub->add_option("--p", f.p, "prime modulus override (default: smallest prime > K*(q-1))");
  sub->add_option("--L", f.L, "model length");
  sub->add_option("--seed", f.seed, "RNG seed (HSA_SEED env var wins)");
  sub->add_option("--drop", f.drop,
                  "link failures: exhaustive | bernoulli:P1,P2 | fixed[:r2s=..;c2r=k-m,..]");
  sub->add_option("--trials", f.trials, "episode count for run/audit sampling");
  sub->add_option("--vectors", f.vectors, "reference bundle path (verify-example)");
  sub->add_option("--out", f.out, "report path (default: stdout)");
  sub->add_option("--budget", f.budget,
                  "sweep episode budget / enumeration state budget for audits");
}

hsagg::ExperimentConfig resolve(const Flags& f) {
  hsagg::ExperimentConfig ec;
  if (!f.config.empty()) ec = hsagg::parse_config_file(f.config);
  if (f.K) ec.K = *f.K;
  if (f.d) ec.d = *f.d;
  if (f.s) ec.s = *f.s;
  if (f.q) ec.q = *f.q;
  if (f.p) ec.p = *f.p;
  if (f.L) ec.L = *f.L;
  if (f.seed) ec.seed = *f.seed;
  if (f.drop) ec.drop = *f.drop;
  if (f.trials) ec.trials = *f.trials;
  if (f.vectors) ec.vectors = *f.vectors;
  if (f.out) ec.out = *f.out;
  if (f.budget) ec.budget = *f.budget;
  if (const char* env = std::getenv("HSA_SEED")) {
    try {
      ec.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("HSA_SEED is not an integer");
    }
  }
  return ec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dropout-resilient two-hop secure aggregation over a prime field"};
  app.require_subcommand(1);

  Flags f;
  CLI::App* verify = app.add_subcommand(
      "verify-example", "check the bundled reference scheme against its expected displays");
  CLI::App* run = app.add_subcommand("run", "construct a scheme and run drop-model episodes");
  CLI::App* sweep =
      app.add_subcommand("sweep", "exhaustive link-failure sweep with decode and audit checks");
  CLI::App* audit =
      app.add_subcommand("audit", "leakage rank audit plus the enumeration oracle where feasible");
  for (CLI::App* sub : {verify, run, sweep, audit}) add_common(sub, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hsagg::ExperimentConfig ec;
  try {
    ec = resolve(f);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }

  if (app.got_subcommand(verify)) return hsagg::cmd_verify_example(ec);
  if (app.got_subcommand(run)) return hsagg::cmd_run(ec);
  if (app.got_subcommand(sweep)) return hsagg::cmd_sweep(ec);
  return hsagg::cmd_audit(ec);
}
