#include "hsagg/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hsagg/errors.hpp"
#include "hsagg/rng.hpp"
#include "hsagg/security.hpp"

namespace hsagg {

namespace {

// Canonical link order: clients ascending, relays in R_k order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> all_c2r_links(const Topology& topo) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;
  links.reserve(std::size_t(topo.K) * topo.d);
  for (std::uint32_t k = 1; k <= topo.K; ++k)
    for (std::uint32_t m : topo.relays_of(k)) links.emplace_back(k, m);
  return links;
}

void derive_views(LinkRealization& r, const Topology& topo) {
  r.V1.clear();
  r.V2.clear();
  for (std::uint32_t m = 1; m <= topo.K; ++m) {
    bool complete = true;
    for (std::uint32_t k : topo.clients_of(m))
      if (r.failed_c2r.count({k, m})) {
        complete = false;
        break;
      }
    if (!complete) continue;
    r.V1.push_back(m);
    if (!r.failed_r2s.count(m)) r.V2.push_back(m);
  }
}

// Lexicographic unranking of a size-j index combination out of n links.
std::vector<std::size_t> unrank_combination(std::uint64_t rank, std::size_t n, std::uint32_t j) {
  std::vector<std::size_t> out;
  out.reserve(j);
  std::size_t next = 0;
  for (std::uint32_t picked = 0; picked < j; ++picked) {
    for (std::size_t cand = next;; ++cand) {
      std::uint64_t block =
          binomial(static_cast<std::uint32_t>(n - cand - 1), j - picked - 1);
      if (rank < block) {
        out.push_back(cand);
        next = cand + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

}  // namespace

LinkRealization realize_links(const DropModel& model, const Topology& topo,
                              std::uint64_t trial) {
  LinkRealization r;
  switch (model.kind) {
    case DropModel::Kind::fixed: {
      for (const auto& [k, m] : model.failed_c2r)
        if (k < 1 || k > topo.K || !topo.sends_to(k, m))
          throw std::invalid_argument("realize_links: fixed pattern names a link that does not exist");
      for (std::uint32_t m : model.failed_r2s)
        if (m < 1 || m > topo.K)
          throw std::invalid_argument("realize_links: fixed pattern names an invalid relay");
      r.failed_c2r = model.failed_c2r;
      r.failed_r2s = model.failed_r2s;
      break;
    }
    case DropModel::Kind::bernoulli: {
      if (model.p_c2r < 0 || model.p_c2r > 1 || model.p_r2s < 0 || model.p_r2s > 1)
        throw std::invalid_argument("realize_links: probabilities must lie in [0, 1]");
      std::mt19937_64 gen(mix_seed(model.seed, trial));
      // Microprobability thresholding keeps draws bit-reproducible across
      // platforms.
      const std::uint64_t grain = 1000000;
      auto drop = [&](double prob) {
        auto threshold = static_cast<std::uint64_t>(std::llround(prob * double(grain)));
        return rand_below(gen, grain) < threshold;
      };
      for (const auto& [k, m] : all_c2r_links(topo))
        if (drop(model.p_c2r)) r.failed_c2r.insert({k, m});
      for (std::uint32_t m = 1; m <= topo.K; ++m)
        if (drop(model.p_r2s)) r.failed_r2s.insert(m);
      break;
    }
    case DropModel::Kind::exhaustive: {
      const std::uint64_t r2s_total = std::uint64_t(1) << topo.K;
      if (trial < r2s_total) {
        for (std::uint32_t m = 1; m <= topo.K; ++m)
          if (trial >> (m - 1) & 1) r.failed_r2s.insert(m);
        break;
      }
      std::uint64_t rank = trial - r2s_total;
      auto links = all_c2r_links(topo);
      for (std::uint32_t j = 1; j <= model.depth; ++j) {
        std::uint64_t block = binomial(static_cast<std::uint32_t>(links.size()), j);
        if (rank < block) {
          for (std::size_t idx : unrank_combination(rank, links.size(), j))
            r.failed_c2r.insert(links[idx]);
          derive_views(r, topo);
          return r;
        }
        rank -= block;
      }
      throw OutOfRange("realize_links: exhaustive trial index out of range");
    }
  }
  derive_views(r, topo);
  return r;
}

std::uint64_t exhaustive_count(const Topology& topo, std::uint32_t depth) {
  std::uint64_t total = std::uint64_t(1) << topo.K;
  std::uint32_t links = topo.K * topo.d;
  for (std::uint32_t j = 1; j <= depth; ++j) total += binomial(links, j);
  return total;
}

EpisodeResult run_episode(const FieldConfig& cfg, const Topology& topo,
                          const KeySchedule& sched, const GcCode& code,
                          const std::vector<LocalModel>& models,
                          const LinkRealization& realization) {
  if (models.size() != topo.K)
    throw std::invalid_argument("run_episode: one model per client required");
  const auto L = static_cast<std::uint32_t>(models[0].entries.size());
  Layout lay = make_layout(topo.K, L, code.segment_len,
                           static_cast<std::uint32_t>(sched.G_S.cols()));

  // Encode, then deliver over the failing client->relay links.
  std::vector<std::vector<ClientMessage>> inbox(topo.K);
  for (std::uint32_t k = 1; k <= topo.K; ++k)
    for (auto& msg : client_encode(models[k - 1], sched, code, topo, cfg))
      if (!realization.failed_c2r.count({msg.from, msg.to}))
        inbox[msg.to - 1].push_back(std::move(msg));

  EpisodeResult ep;
  ep.realization = realization;

  // Every relay observes whatever arrived, forwarding or not.
  ep.relay_leaks.resize(topo.K, 0);
  for (std::uint32_t m = 1; m <= topo.K; ++m)
    ep.relay_leaks[m - 1] =
        relay_leakage(observe_client_messages(inbox[m - 1], lay, "relay " + std::to_string(m)));

  std::vector<RelayMessage> forwarded;
  for (std::uint32_t m : realization.V2) {
    auto y = relay_aggregate(m, inbox[m - 1], topo, lay, cfg.p);
    if (y) forwarded.push_back(std::move(*y));
  }
  ep.server_leak = server_leakage(observe_relay_messages(forwarded, lay, "server"),
                                  sum_target_rows(lay, cfg.p));

  ep.outcome = server_decode(forwarded, code, cfg, L);
  if (ep.outcome) ep.sum_matches_oracle = ep.outcome->integer_sum == plain_integer_sum(models);
  ep.measured = measured_rates(sched, code, cfg, topo);
  return ep;
}

std::vector<EpisodeResult> sweep_patterns(const FieldConfig& cfg, const Topology& topo,
                                          const KeySchedule& sched, const GcCode& code,
                                          const std::vector<LocalModel>& models,
                                          std::optional<std::uint64_t> budget,
                                          std::uint32_t depth) {
  if (budget && *budget == 0) return {};
  std::uint64_t total = exhaustive_count(topo, depth);
  if (!budget && topo.K > 6)
    throw BudgetExceeded("sweep_patterns: K > 6 requires an explicit budget");
  if (budget && *budget < total)
    throw BudgetExceeded("sweep_patterns: enumeration needs " + std::to_string(total) +
                         " episodes, budget is " + std::to_string(*budget));

  DropModel model;
  model.kind = DropModel::Kind::exhaustive;
  model.depth = depth;
  std::vector<EpisodeResult> out;
  out.reserve(total);
  for (std::uint64_t t = 0; t < total; ++t)
    out.push_back(run_episode(cfg, topo, sched, code, models, realize_links(model, topo, t)));
  return out;
}

}  // namespace hsagg
