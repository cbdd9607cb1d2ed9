#include "hsagg/runner.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hsagg/digest.hpp"
#include "hsagg/errors.hpp"
#include "hsagg/rng.hpp"
#include "hsagg/security.hpp"
#include "hsagg/vectors.hpp"

namespace hsagg {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + v);
  }
}

void apply_kv(ExperimentConfig& ec, const std::string& key, const std::string& value) {
  if (key == "K") ec.K = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "d") ec.d = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "s") ec.s = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "q") ec.q = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "p") ec.p = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "L") ec.L = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "seed") ec.seed = parse_u64(value, key);
  else if (key == "drop") ec.drop = value;
  else if (key == "trials") ec.trials = static_cast<std::uint32_t>(parse_u64(value, key));
  else if (key == "budget") ec.budget = parse_u64(value, key);
  else if (key == "vectors") ec.vectors = value;
  else if (key == "out") ec.out = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  ExperimentConfig ec;
  std::string lead = trim(text);
  if (!lead.empty() && lead[0] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    for (const auto& [key, v] : j.items()) {
      if (v.is_string()) apply_kv(ec, key, v.get<std::string>());
      else if (v.is_number_unsigned() || v.is_number_integer())
        apply_kv(ec, key, std::to_string(v.get<std::uint64_t>()));
      else throw std::invalid_argument("config key " + key + ": unsupported value type");
    }
    return ec;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key=value: " + line);
    apply_kv(ec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return ec;
}

DropModel parse_drop_spec(const std::string& spec, std::uint64_t seed) {
  DropModel dm;
  dm.seed = seed;
  if (spec == "exhaustive") {
    dm.kind = DropModel::Kind::exhaustive;
    return dm;
  }
  if (spec == "fixed") {
    dm.kind = DropModel::Kind::fixed;
    return dm;
  }
  if (spec.rfind("bernoulli:", 0) == 0) {
    dm.kind = DropModel::Kind::bernoulli;
    std::string rest = spec.substr(10);
    std::size_t comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("drop spec: bernoulli needs two probabilities: " + spec);
    try {
      dm.p_c2r = std::stod(trim(rest.substr(0, comma)));
      dm.p_r2s = std::stod(trim(rest.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("drop spec: bad probability in: " + spec);
    }
    if (dm.p_c2r < 0 || dm.p_c2r > 1 || dm.p_r2s < 0 || dm.p_r2s > 1)
      throw std::invalid_argument("drop spec: probabilities must lie in [0, 1]");
    return dm;
  }
  if (spec.rfind("fixed:", 0) == 0) {
    dm.kind = DropModel::Kind::fixed;
    std::istringstream parts(spec.substr(6));
    std::string part;
    while (std::getline(parts, part, ';')) {
      part = trim(part);
      if (part.empty()) continue;
      if (part.rfind("r2s=", 0) == 0) {
        std::istringstream items(part.substr(4));
        std::string item;
        while (std::getline(items, item, ','))
          dm.failed_r2s.insert(static_cast<std::uint32_t>(parse_u64(trim(item), "r2s")));
      } else if (part.rfind("c2r=", 0) == 0) {
        std::istringstream items(part.substr(4));
        std::string item;
        while (std::getline(items, item, ',')) {
          item = trim(item);
          std::size_t dash = item.find('-');
          if (dash == std::string::npos)
            throw std::invalid_argument("drop spec: c2r link must be client-relay: " + item);
          dm.failed_c2r.insert(
              {static_cast<std::uint32_t>(parse_u64(item.substr(0, dash), "c2r")),
               static_cast<std::uint32_t>(parse_u64(item.substr(dash + 1), "c2r"))});
        }
      } else {
        throw std::invalid_argument("drop spec: unknown fixed component: " + part);
      }
    }
    return dm;
  }
  throw std::invalid_argument("unknown drop spec: " + spec);
}

namespace {

struct Scheme {
  FieldConfig fc;
  Topology topo;
  KeySchedule sched;
  GcCode code;
  Layout lay;
  std::uint32_t escalations = 0;
};

// Resolves p (defaulting just above the lift range), builds generator, code
// and keys; a default p escalates to the next prime on construction failure,
// an explicit p never does.
Scheme build_scheme(const ExperimentConfig& ec) {
  if (ec.L < 1) throw std::invalid_argument("L must be >= 1");
  if (ec.q < 2) throw std::invalid_argument("q must be >= 2");
  if (ec.K < 2) throw std::invalid_argument("K must be >= 2");
  if (ec.d < 1 || ec.d > ec.K - 1) throw std::invalid_argument("d must satisfy 1 <= d <= K-1");
  if (ec.s >= ec.d) throw std::invalid_argument("s must satisfy 0 <= s < d");
  std::uint32_t p = ec.p ? *ec.p : next_prime_above(ec.K * (ec.q - 1));
  for (std::uint32_t attempt = 0;; ++attempt) {
    try {
      FieldConfig fc(p, ec.q, ec.K);
      Topology topo = build_topology(ec.K, ec.d);
      auto [code, gs] = build_masked_pair(fc, topo, ec.s, ec.d, ec.seed, ec.seed);
      Layout lay = make_layout(ec.K, ec.L, code.segment_len,
                               static_cast<std::uint32_t>(gs.cols()));
      SourceRandomness src = draw_source(fc, ec.d, lay.L_X, ec.seed);
      KeySchedule sched = expand_keys(gs, src, lay.L_X);
      return Scheme{fc, topo, std::move(sched), std::move(code), lay, attempt};
    } catch (const ConstructionFailed&) {
      if (ec.p || attempt >= 8) throw;
      p = next_prime_above(p);
    }
  }
}

std::vector<LocalModel> draw_models(const ExperimentConfig& ec, std::uint64_t trial) {
  std::mt19937_64 gen(mix_seed(mix_seed(ec.seed, trial), 0xd0d0ull));
  std::vector<LocalModel> models;
  for (std::uint32_t k = 1; k <= ec.K; ++k) {
    LocalModel lm{k, FieldVector(ec.L)};
    for (auto& e : lm.entries) e = static_cast<std::uint32_t>(rand_below(gen, ec.q));
    models.push_back(std::move(lm));
  }
  return models;
}

json config_json(const ExperimentConfig& ec, std::uint32_t resolved_p) {
  json c;
  c["K"] = ec.K;
  c["d"] = ec.d;
  c["s"] = ec.s;
  c["q"] = ec.q;
  c["p"] = resolved_p;
  c["L"] = ec.L;
  c["seed"] = ec.seed;
  c["drop"] = ec.drop;
  c["trials"] = ec.trials;
  c["budget"] = ec.budget ? json(*ec.budget) : json(nullptr);
  c["vectors"] = ec.vectors;
  c["out"] = ec.out;
  return c;
}

json scheme_json(const Scheme& sc) {
  json s;
  s["p"] = sc.fc.p;
  s["seed_len"] = sc.sched.G_S.cols();
  s["segment_len"] = sc.code.segment_len;
  s["L_pad"] = sc.lay.L_pad;
  s["L_X"] = sc.lay.L_X;
  s["mask_coord"] = sc.code.mask_coord;
  s["gs_digest"] = digest_matrix(sc.sched.G_S);
  s["code_digest"] = digest_code(sc.code);
  s["p_escalations"] = sc.escalations;
  return s;
}

json rate_json(const RateValue& rv) {
  return json{{"num", rv.value.num}, {"den", rv.value.den}, {"unit", rv.has_unit}};
}

json rates_json(const RateReport& rr) {
  json r;
  r["R1"] = rate_json(rr.R1);
  r["R2"] = rate_json(rr.R2);
  r["RS"] = rate_json(rr.RS);
  r["RSsum"] = rate_json(rr.RSsum);
  json b = json::array();
  for (const auto& rv : rr.bounds) b.push_back(rate_json(rv));
  r["bounds"] = b;
  r["achieves_optimum"] = rr.achieves_optimum;
  r["p"] = rr.p;
  r["q"] = rr.q;
  return r;
}

json episode_json(std::uint64_t trial, const EpisodeResult& ep) {
  json e;
  e["trial"] = trial;
  json fc2r = json::array();
  for (const auto& [k, m] : ep.realization.failed_c2r) fc2r.push_back(json::array({k, m}));
  e["failed_c2r"] = fc2r;
  e["failed_r2s"] = ep.realization.failed_r2s;
  e["V1"] = ep.realization.V1;
  e["V2"] = ep.realization.V2;
  e["decoded"] = static_cast<bool>(ep.outcome);
  e["sum_matches"] = ep.outcome ? json(ep.sum_matches_oracle) : json(nullptr);
  e["relay_leaks"] = ep.relay_leaks;
  e["server_leak"] = ep.server_leak;
  e["used_pattern"] = ep.outcome ? json(ep.outcome->used_pattern) : json(nullptr);
  return e;
}

struct EpisodeRollup {
  bool decodes_consistent = true;
  bool audits_zero = true;
  std::uint32_t max_relay_leak = 0;
  std::uint32_t max_server_leak = 0;
  std::uint64_t decoded = 0;
  std::uint64_t total = 0;
};

void roll_episode(EpisodeRollup& roll, const EpisodeResult& ep, std::uint32_t K,
                  std::uint32_t s) {
  ++roll.total;
  bool enough = ep.realization.V2.size() >= std::size_t(K - s);
  if (enough != static_cast<bool>(ep.outcome)) roll.decodes_consistent = false;
  if (ep.outcome) {
    ++roll.decoded;
    if (!ep.sum_matches_oracle) roll.decodes_consistent = false;
  }
  for (std::uint32_t v : ep.relay_leaks) {
    roll.max_relay_leak = std::max(roll.max_relay_leak, v);
    if (v) roll.audits_zero = false;
  }
  roll.max_server_leak = std::max(roll.max_server_leak, ep.server_leak);
  if (ep.server_leak) roll.audits_zero = false;
}

void emit_report(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write report: " + out_path);
  out << report.dump(2) << "\n";
}

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConstructionFailed& e) {
    std::cerr << "construction failure: " << e.what() << "\n";
    return 3;
  } catch (const BudgetExceeded& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  }
}

// Shared by run and sweep: one report over a list of episodes.
int finish_report(const ExperimentConfig& ec, const Scheme& sc, const json& episodes,
                  const EpisodeRollup& roll, json audit) {
  RateReport rr = measured_rates(sc.sched, sc.code, sc.fc, sc.topo);
  bool rates_ok = rr.achieves_optimum[0] && rr.achieves_optimum[1] && rr.achieves_optimum[2] &&
                  rr.achieves_optimum[3];
  audit["max_relay_leakage"] = roll.max_relay_leak;
  audit["max_server_leakage"] = roll.max_server_leak;
  audit["all_zero"] = roll.audits_zero;
  json verdicts;
  verdicts["decodes_consistent"] = roll.decodes_consistent;
  verdicts["audits_zero"] = roll.audits_zero;
  verdicts["rates_optimal"] = rates_ok;
  bool ok = roll.decodes_consistent && roll.audits_zero && rates_ok;
  if (audit.contains("mi_agreement") && audit["mi_agreement"] == "disagreement") ok = false;
  verdicts["ok"] = ok;

  json report;
  report["config"] = config_json(ec, sc.fc.p);
  report["scheme"] = scheme_json(sc);
  report["episodes"] = episodes;
  report["audit"] = audit;
  report["rates"] = rates_json(rr);
  report["verdicts"] = verdicts;
  emit_report(report, ec.out);
  return ok ? 0 : 1;
}

}  // namespace

int cmd_verify_example(const ExperimentConfig& cfg) {
  return guard([&]() -> int {
    VectorFile vf;
    try {
      vf = load_vector_file(cfg.vectors);
    } catch (const std::exception& e) {
      std::cerr << "invalid config: " << e.what() << "\n";
      return 2;
    }
    auto checks = verify_example(vf);
    bool all_ok = true;
    for (const auto& c : checks) {
      std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
      all_ok = all_ok && c.ok;
    }
    if (!cfg.out.empty()) {
      json report;
      json c;
      c["p"] = vf.p;
      c["K"] = vf.K;
      c["d"] = vf.d;
      c["s"] = vf.s;
      c["q"] = vf.q;
      c["L"] = vf.L;
      c["vectors"] = cfg.vectors;
      report["config"] = c;
      report["scheme"] = json{{"gs_digest", digest_matrix(vf.G_S)},
                              {"code_digest", digest_code(vf.code)}};
      report["episodes"] = json::array();
      json checks_json = json::array();
      for (const auto& ck : checks)
        checks_json.push_back(json{{"name", ck.name}, {"ok", ck.ok}, {"detail", ck.detail}});
      report["audit"] = json{{"checks", checks_json}};
      report["rates"] = json{{"R1", json{{"num", vf.rate_R1.num}, {"den", vf.rate_R1.den}}},
                             {"R2", json{{"num", vf.rate_R2.num}, {"den", vf.rate_R2.den}}},
                             {"RS", json{{"num", vf.rate_RS.num}, {"den", vf.rate_RS.den}}},
                             {"RSsum", json{{"num", vf.rate_RSsum.num},
                                            {"den", vf.rate_RSsum.den}}}};
      report["verdicts"] = json{{"ok", all_ok}};
      emit_report(report, cfg.out);
    }
    return all_ok ? 0 : 1;
  });
}

int cmd_run(const ExperimentConfig& cfg) {
  return guard([&]() -> int {
    Scheme sc = build_scheme(cfg);
    DropModel dm = parse_drop_spec(cfg.drop, cfg.seed);
    std::uint64_t n = cfg.trials;
    if (dm.kind == DropModel::Kind::exhaustive)
      n = std::min<std::uint64_t>(n, exhaustive_count(sc.topo, dm.depth));
    json episodes = json::array();
    EpisodeRollup roll;
    for (std::uint64_t t = 0; t < n; ++t) {
      auto models = draw_models(cfg, t);
      EpisodeResult ep = run_episode(sc.fc, sc.topo, sc.sched, sc.code, models,
                                     realize_links(dm, sc.topo, t));
      episodes.push_back(episode_json(t, ep));
      roll_episode(roll, ep, cfg.K, cfg.s);
    }
    json audit;
    audit["brute_force"] = "skipped";
    audit["episodes_decoded"] = roll.decoded;
    audit["episodes_total"] = roll.total;
    return finish_report(cfg, sc, episodes, roll, audit);
  });
}

int cmd_sweep(const ExperimentConfig& cfg) {
  return guard([&]() -> int {
    Scheme sc = build_scheme(cfg);
    auto models = draw_models(cfg, 0);
    auto eps = sweep_patterns(sc.fc, sc.topo, sc.sched, sc.code, models, cfg.budget, 2);
    json episodes = json::array();
    EpisodeRollup roll;
    for (std::size_t t = 0; t < eps.size(); ++t) {
      episodes.push_back(episode_json(t, eps[t]));
      roll_episode(roll, eps[t], cfg.K, cfg.s);
    }
    json audit;
    audit["brute_force"] = "skipped";
    audit["episodes_decoded"] = roll.decoded;
    audit["episodes_total"] = roll.total;
    return finish_report(cfg, sc, episodes, roll, audit);
  });
}

int cmd_audit(const ExperimentConfig& cfg) {
  return guard([&]() -> int {
    Scheme sc = build_scheme(cfg);
    auto models = draw_models(cfg, 0);

    // Leakage over link realizations: exhaustive when the enumeration is
    // desk-scale, sampled otherwise.
    json episodes = json::array();
    EpisodeRollup roll;
    if (cfg.K <= 6) {
      auto eps = sweep_patterns(sc.fc, sc.topo, sc.sched, sc.code, models, std::nullopt, 2);
      for (std::size_t t = 0; t < eps.size(); ++t) {
        episodes.push_back(episode_json(t, eps[t]));
        roll_episode(roll, eps[t], cfg.K, cfg.s);
      }
    } else {
      DropModel dm = cfg.drop.rfind("bernoulli:", 0) == 0
                         ? parse_drop_spec(cfg.drop, cfg.seed)
                         : parse_drop_spec("bernoulli:0.15,0.3", cfg.seed);
      for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        EpisodeResult ep = run_episode(sc.fc, sc.topo, sc.sched, sc.code, draw_models(cfg, t),
                                       realize_links(dm, sc.topo, t));
        episodes.push_back(episode_json(t, ep));
        roll_episode(roll, ep, cfg.K, cfg.s);
      }
    }

    // Enumeration oracle on the no-failure observations, where the budget
    // allows; rank verdicts must agree with it.
    const std::uint64_t mi_budget = cfg.budget.value_or(10000000ull);
    std::vector<std::vector<ClientMessage>> inbox(cfg.K);
    for (std::uint32_t k = 1; k <= cfg.K; ++k)
      for (auto& msg : client_encode(models[k - 1], sc.sched, sc.code, sc.topo, sc.fc))
        inbox[msg.to - 1].push_back(std::move(msg));
    std::vector<RelayMessage> forwarded;
    for (std::uint32_t m = 1; m <= cfg.K; ++m) {
      auto y = relay_aggregate(m, inbox[m - 1], sc.topo, sc.lay, sc.fc.p);
      if (y) forwarded.push_back(std::move(*y));
    }

    bool any_skipped = false, any_disagreement = false;
    auto mi_check = [&](const LinearObservation& obs, std::uint32_t rank_leak,
                        const std::optional<FieldMatrix>& cond) -> json {
      json r;
      r["rank_leakage"] = rank_leak;
      try {
        MiResult mi = brute_force_mi(obs, sc.fc, sc.fc.p, cond, mi_budget);
        r["status"] = mi.zero ? "zero" : "positive";
        if (!mi.zero) {
          json terms = json::array();
          for (const auto& [prime, coeff] : mi.log_terms)
            terms.push_back(json{{"prime", prime}, {"num", coeff.num}, {"den", coeff.den}});
          r["terms"] = terms;
        }
        bool agree = mi.zero == (rank_leak == 0);
        r["agreement"] = agree;
        if (!agree) any_disagreement = true;
      } catch (const TooLarge& e) {
        r["status"] = "skipped";
        r["reason"] = e.what();
        any_skipped = true;
      }
      return r;
    };

    json audit;
    json relays = json::array();
    for (std::uint32_t m = 1; m <= cfg.K; ++m) {
      LinearObservation obs =
          observe_client_messages(inbox[m - 1], sc.lay, "relay " + std::to_string(m));
      json r = mi_check(obs, relay_leakage(obs), std::nullopt);
      r["m"] = m;
      relays.push_back(r);
    }
    audit["relays"] = relays;
    {
      LinearObservation obs = observe_relay_messages(forwarded, sc.lay, "server");
      FieldMatrix targets = sum_target_rows(sc.lay, sc.fc.p);
      audit["server"] = mi_check(obs, server_leakage(obs, targets), targets);
    }
    audit["mi_budget"] = mi_budget;
    audit["mi_agreement"] = any_disagreement ? "disagreement"
                            : any_skipped    ? "skipped"
                                             : "agreement";
    audit["episodes_decoded"] = roll.decoded;
    audit["episodes_total"] = roll.total;
    return finish_report(cfg, sc, episodes, roll, audit);
  });
}

}  // namespace hsagg
