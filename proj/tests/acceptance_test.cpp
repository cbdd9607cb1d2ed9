// Acceptance gate: seven end-to-end criteria, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hsagg/errors.hpp"
#include "hsagg/field.hpp"
#include "hsagg/keygen.hpp"
#include "hsagg/metrics.hpp"
#include "hsagg/netsim.hpp"
#include "hsagg/protocol.hpp"
#include "hsagg/rng.hpp"
#include "hsagg/runner.hpp"
#include "hsagg/security.hpp"
#include "hsagg/vectors.hpp"

using namespace hsagg;

namespace {

struct Instance {
  FieldConfig cfg;
  Topology topo;
  KeySchedule sched;
  GcCode code;
  Layout lay;
};

// Builds a full scheme, escalating the auto-chosen modulus past construction
// failures the same way the command layer does.
Instance make_instance(std::uint32_t K, std::uint32_t d, std::uint32_t s, std::uint32_t q,
                       std::optional<std::uint32_t> p, std::uint32_t L, std::uint64_t seed) {
  std::uint32_t prime = p ? *p : next_prime_above(std::uint64_t(K) * (q - 1));
  for (std::uint32_t tries = 0;; ++tries) {
    try {
      FieldConfig cfg(prime, q, K);
      Topology topo = build_topology(K, d);
      auto [code, gs] = build_masked_pair(cfg, topo, s, d, seed, mix_seed(seed, 1));
      Layout lay = make_layout(K, L, code.segment_len, seed_len(K, d));
      KeySchedule sched = expand_keys(gs, draw_source(cfg, d, lay.L_X, mix_seed(seed, 2)), lay.L_X);
      return Instance{cfg, topo, std::move(sched), std::move(code), lay};
    } catch (const ConstructionFailed&) {
      if (p || tries >= 8) throw;
      prime = next_prime_above(prime);
    }
  }
}

std::vector<LocalModel> draw_models(const Instance& in, std::uint32_t L, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<LocalModel> models;
  for (std::uint32_t k = 1; k <= in.cfg.K; ++k) {
    LocalModel m;
    m.owner = k;
    for (std::uint32_t l = 0; l < L; ++l) m.entries.push_back(rand_below(gen, in.cfg.q));
    models.push_back(std::move(m));
  }
  return models;
}

// All size-j subsets of {1..K} for j = 0..cap, ascending in size then lex.
std::vector<std::vector<std::uint32_t>> subsets_up_to(std::uint32_t K, std::uint32_t cap) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t j = 0; j <= cap; ++j)
    for (auto& pat : all_patterns(K, j)) out.push_back(pat);
  return out;
}

struct GridPoint {
  std::uint32_t K, d, s;
};

// K in 3..7, 2 <= d <= K-1, 0 <= s <= d-1.
std::vector<GridPoint> full_grid() {
  std::vector<GridPoint> grid;
  for (std::uint32_t K = 3; K <= 7; ++K)
    for (std::uint32_t d = 2; d <= K - 1; ++d)
      for (std::uint32_t s = 0; s < d; ++s) grid.push_back({K, d, s});
  return grid;
}

struct Outcome {
  bool ok = true;
  std::string detail;
  double seconds = 0.0;

  void fail(const std::string& msg) {
    if (ok) detail = msg;  // keep the first failure
    ok = false;
  }
};

Outcome run_criterion(const std::function<void(Outcome&)>& body) {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. The bundled reference file reproduces every displayed message, relay
//    output, the key-mixing matrix, all five single-dropout decode identities,
//    and the stated rates, exactly, in under a second.
void criterion_golden(Outcome& out) {
  VectorFile vf = load_vector_file(std::string(HSAGG_DATA_DIR) + "/example_k5.json");
  if (vf.expected_messages.size() != 15) out.fail("expected 15 displayed messages");
  if (vf.expected_relays.size() != 5) out.fail("expected 5 relay displays");
  if (vf.expected_decodes != std::vector<std::uint32_t>{1, 2, 3, 4, 5})
    out.fail("expected all five single dropouts listed");
  if (!(vf.rate_R1 == Rat(3, 2)) || !(vf.rate_R2 == Rat(1, 2)) || !(vf.rate_RSsum == Rat(3, 2)))
    out.fail("stated rates are not (3/2, 1/2, ., 3/2)");
  for (const auto& c : verify_example(vf))
    if (!c.ok) out.fail(c.name + ": " + c.detail);
}

// 2. Across the whole shape grid, with q = 3 and L = 2(d-s), twenty random
//    model draws each: every surviving-relay set of size >= K-s decodes the
//    exact integer sum of the models.
void criterion_correctness(Outcome& out) {
  for (const auto& g : full_grid()) {
    const std::uint32_t L = 2 * (g.d - g.s);
    Instance in = make_instance(g.K, g.d, g.s, 3, std::nullopt, L, mix_seed(2026, g.K * 100 + g.d * 10 + g.s));
    auto failures = subsets_up_to(g.K, g.s);
    for (std::uint32_t draw = 0; draw < 20; ++draw) {
      auto models = draw_models(in, L, mix_seed(g.K * 100 + g.d * 10 + g.s, draw));
      auto oracle = plain_integer_sum(models);
      std::vector<std::vector<ClientMessage>> inbox(g.K + 1);
      for (auto& m : models)
        for (auto& msg : client_encode(m, in.sched, in.code, in.topo, in.cfg))
          inbox[msg.to].push_back(std::move(msg));
      std::vector<RelayMessage> all_relays;
      for (std::uint32_t m = 1; m <= g.K; ++m) {
        auto y = relay_aggregate(m, inbox[m], in.topo, in.lay, in.cfg.p);
        if (!y) {
          out.fail("relay with complete inbox stayed silent");
          return;
        }
        all_relays.push_back(std::move(*y));
      }
      for (const auto& dead : failures) {
        std::vector<RelayMessage> received;
        for (const auto& y : all_relays)
          if (std::find(dead.begin(), dead.end(), y.from) == dead.end()) received.push_back(y);
        auto res = server_decode(received, in.code, in.cfg, L);
        if (!res || res->integer_sum != oracle) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "K=%u d=%u s=%u draw=%u: wrong or missing sum", g.K,
                        g.d, g.s, draw);
          out.fail(buf);
          return;
        }
      }
    }
  }
}

// 3. Same grid: zero leaked dimensions at every relay for every possible
//    arrival subset, and zero at the server beyond the sum for every
//    surviving set (exhaustive for K <= 6, 1000 sampled episodes for K = 7).
void criterion_security(Outcome& out) {
  for (const auto& g : full_grid()) {
    const std::uint32_t L = 2 * (g.d - g.s);
    Instance in = make_instance(g.K, g.d, g.s, 3, std::nullopt, L, mix_seed(3026, g.K * 100 + g.d * 10 + g.s));
    auto models = draw_models(in, L, mix_seed(777, g.K * 100 + g.d * 10 + g.s));
    char where[64];
    std::snprintf(where, sizeof where, "K=%u d=%u s=%u", g.K, g.d, g.s);

    if (g.K <= 6) {
      std::vector<std::vector<ClientMessage>> inbox(g.K + 1);
      for (auto& m : models)
        for (auto& msg : client_encode(m, in.sched, in.code, in.topo, in.cfg))
          inbox[msg.to].push_back(std::move(msg));
      for (std::uint32_t m = 1; m <= g.K; ++m) {
        const auto& full = inbox[m];
        for (std::uint32_t mask = 0; mask < (1u << full.size()); ++mask) {
          std::vector<ClientMessage> part;
          for (std::size_t i = 0; i < full.size(); ++i)
            if (mask & (1u << i)) part.push_back(full[i]);
          auto obs = observe_client_messages(part, in.lay, "relay");
          if (relay_leakage(obs) != 0) {
            out.fail(std::string(where) + ": relay view leaks");
            return;
          }
        }
      }
      std::vector<RelayMessage> all_relays;
      for (std::uint32_t m = 1; m <= g.K; ++m)
        all_relays.push_back(*relay_aggregate(m, inbox[m], in.topo, in.lay, in.cfg.p));
      FieldMatrix targets = sum_target_rows(in.lay, in.cfg.p);
      for (std::uint32_t mask = 0; mask < (1u << g.K); ++mask) {
        std::vector<RelayMessage> part;
        for (std::uint32_t m = 1; m <= g.K; ++m)
          if (mask & (1u << (m - 1))) part.push_back(all_relays[m - 1]);
        auto obs = observe_relay_messages(part, in.lay, "server");
        if (server_leakage(obs, targets) != 0) {
          out.fail(std::string(where) + ": server view leaks beyond the sum");
          return;
        }
      }
    } else {
      DropModel dm;
      dm.kind = DropModel::Kind::bernoulli;
      dm.p_c2r = 0.25;
      dm.p_r2s = 0.25;
      dm.seed = mix_seed(4026, g.d * 10 + g.s);
      for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        auto ep = run_episode(in.cfg, in.topo, in.sched, in.code, models,
                              realize_links(dm, in.topo, trial));
        for (auto leak : ep.relay_leaks)
          if (leak != 0) {
            out.fail(std::string(where) + ": sampled relay view leaks");
            return;
          }
        if (ep.server_leak != 0) {
          out.fail(std::string(where) + ": sampled server view leaks");
          return;
        }
      }
    }
  }
}

// 4. On every K=3, d=2, s in {0,1}, q=2, p=5, L in {1,2} instance the
//    exhaustive-enumeration oracle and the rank audit agree (both zero); after
//    deliberately stripping one message's mask, both are strictly positive.
void criterion_oracle(Outcome& out) {
  for (std::uint32_t s : {0u, 1u}) {
    for (std::uint32_t L : {1u, 2u}) {
      Instance in = make_instance(3, 2, s, 2, 5, L, mix_seed(5026, s * 10 + L));
      auto models = draw_models(in, L, mix_seed(888, s * 10 + L));
      std::vector<std::vector<ClientMessage>> inbox(4);
      for (auto& m : models)
        for (auto& msg : client_encode(m, in.sched, in.code, in.topo, in.cfg))
          inbox[msg.to].push_back(std::move(msg));
      char where[48];
      std::snprintf(where, sizeof where, "s=%u L=%u", s, L);

      for (std::uint32_t m = 1; m <= 3; ++m) {
        auto obs = observe_client_messages(inbox[m], in.lay, "relay");
        bool rank_zero = relay_leakage(obs) == 0;
        MiResult mi = brute_force_mi(obs, in.cfg, in.cfg.q, std::nullopt);
        if (!rank_zero || !mi.zero) {
          out.fail(std::string(where) + ": relay verdicts not both zero");
          return;
        }
      }
      std::vector<RelayMessage> all_relays;
      for (std::uint32_t m = 1; m <= 3; ++m)
        all_relays.push_back(*relay_aggregate(m, inbox[m], in.topo, in.lay, in.cfg.p));
      FieldMatrix targets = sum_target_rows(in.lay, in.cfg.p);
      auto sobs = observe_relay_messages(all_relays, in.lay, "server");
      bool srank_zero = server_leakage(sobs, targets) == 0;
      MiResult smi = brute_force_mi(sobs, in.cfg, in.cfg.q, targets);
      if (!srank_zero || !smi.zero) {
        out.fail(std::string(where) + ": server verdicts not both zero");
        return;
      }

      // Strip the mask from client 1's message to its first relay.
      std::uint32_t target = in.topo.relays_of(1)[0];
      std::vector<ClientMessage> tampered;
      for (auto& msg : client_encode(models[0], in.sched, in.code, in.topo, in.cfg, target))
        if (msg.to == target) tampered.push_back(std::move(msg));
      for (const auto& msg : inbox[target])
        if (msg.from != 1) tampered.push_back(msg);
      auto tobs = observe_client_messages(tampered, in.lay, "relay");
      MiResult tmi = brute_force_mi(tobs, in.cfg, in.cfg.q, std::nullopt);
      if (relay_leakage(tobs) == 0 || tmi.zero || !(tmi.nats() > 0.0)) {
        out.fail(std::string(where) + ": stripped mask not flagged by both oracles");
        return;
      }
    }
  }
}

// 5. Every grid point with 1 <= s < d: all four measured rates equal their
//    lower bounds as exact rationals (with matching units).
void criterion_rates(Outcome& out) {
  for (const auto& g : full_grid()) {
    if (g.s < 1) continue;
    const std::uint32_t L = 2 * (g.d - g.s);
    Instance in = make_instance(g.K, g.d, g.s, 3, std::nullopt, L, mix_seed(6026, g.K * 100 + g.d * 10 + g.s));
    RateReport r = measured_rates(in.sched, in.code, in.cfg, in.topo);
    for (std::size_t i = 0; i < 4; ++i)
      if (!r.achieves_optimum[i]) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "K=%u d=%u s=%u: rate %zu off its bound", g.K, g.d, g.s, i);
        out.fail(buf);
        return;
      }
  }
}

// 6. Every grid point: one relay short of the threshold never decodes and
//    still audits to zero leakage; decoded sums never exceed K*(q-1) per
//    entry; stripping one mask coefficient trips the relay audit.
void criterion_negative(Outcome& out) {
  for (const auto& g : full_grid()) {
    const std::uint32_t L = 2 * (g.d - g.s);
    Instance in = make_instance(g.K, g.d, g.s, 3, std::nullopt, L, mix_seed(7026, g.K * 100 + g.d * 10 + g.s));
    auto models = draw_models(in, L, mix_seed(999, g.K * 100 + g.d * 10 + g.s));
    char where[64];
    std::snprintf(where, sizeof where, "K=%u d=%u s=%u", g.K, g.d, g.s);

    for (auto& dead : all_patterns(g.K, g.s + 1)) {
      DropModel dm;
      dm.kind = DropModel::Kind::fixed;
      dm.failed_r2s.insert(dead.begin(), dead.end());
      auto ep = run_episode(in.cfg, in.topo, in.sched, in.code, models,
                            realize_links(dm, in.topo, 0));
      if (ep.outcome) {
        out.fail(std::string(where) + ": decoded below the survivor threshold");
        return;
      }
      for (auto leak : ep.relay_leaks)
        if (leak != 0) {
          out.fail(std::string(where) + ": leakage in a failed round");
          return;
        }
      if (ep.server_leak != 0) {
        out.fail(std::string(where) + ": server leakage in a failed round");
        return;
      }
    }

    DropModel none;
    none.kind = DropModel::Kind::fixed;
    auto full = run_episode(in.cfg, in.topo, in.sched, in.code, models,
                            realize_links(none, in.topo, 0));
    if (!full.outcome || !full.sum_matches_oracle) {
      out.fail(std::string(where) + ": full delivery failed to decode");
      return;
    }
    for (auto v : full.outcome->integer_sum)
      if (v > g.K * 2) {  // q = 3, so entries stay within K*(q-1)
        out.fail(std::string(where) + ": lifted entry above the attainable maximum");
        return;
      }

    std::uint32_t target = in.topo.relays_of(1)[0];
    std::vector<ClientMessage> tampered;
    for (auto& msg : client_encode(models[0], in.sched, in.code, in.topo, in.cfg, target))
      if (msg.to == target) tampered.push_back(std::move(msg));
    for (std::uint32_t k = 2; k <= g.K; ++k)
      if (in.topo.sends_to(k, target))
        for (auto& msg : client_encode(models[k - 1], in.sched, in.code, in.topo, in.cfg))
          if (msg.to == target) tampered.push_back(std::move(msg));
    auto tobs = observe_client_messages(tampered, in.lay, "relay");
    if (relay_leakage(tobs) == 0) {
      out.fail(std::string(where) + ": stripped mask escaped the relay audit");
      return;
    }
  }
}

// 7. Two runs of the run command with an identical configuration produce
//    byte-identical reports.
void criterion_determinism(Outcome& out) {
  ExperimentConfig ec;
  ec.K = 5;
  ec.d = 3;
  ec.s = 1;
  ec.q = 3;
  ec.L = 4;
  ec.seed = 33;
  ec.drop = "bernoulli:0.2,0.25";
  ec.trials = 40;
  ec.out = "/tmp/acceptance_det.json";
  if (cmd_run(ec) != 0) {
    out.fail("first run exited nonzero");
    return;
  }
  std::string first = slurp(ec.out);
  if (cmd_run(ec) != 0) {
    out.fail("second run exited nonzero");
    return;
  }
  std::string second = slurp(ec.out);
  std::remove(ec.out.c_str());
  if (first.empty()) out.fail("empty report");
  if (first != second) out.fail("reports differ between identical runs");
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> body;
  double time_limit;  // seconds; 0 = no stated limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"golden reproduction", criterion_golden, 1.0},
      {"correctness sweep", criterion_correctness, 300.0},
      {"security sweep", criterion_security, 0.0},
      {"oracle agreement", criterion_oracle, 30.0},
      {"rate optimality", criterion_rates, 0.0},
      {"negative behavior", criterion_negative, 0.0},
      {"determinism", criterion_determinism, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r = run_criterion(criteria[i].body);
    if (r.ok && criteria[i].time_limit > 0.0 && r.seconds >= criteria[i].time_limit) {
      r.ok = false;
      r.detail = "over the time limit";
    }
    std::printf("[%s] %zu %s (%.2f s)%s%s\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                r.seconds, r.detail.empty() ? "" : ": ", r.detail.c_str());
    if (!r.ok) ++failures;
  }
  return failures;
}
