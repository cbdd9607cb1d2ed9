#include "hsagg/vectors.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hsagg/keygen.hpp"
#include "hsagg/netsim.hpp"
#include "hsagg/protocol.hpp"
#include "hsagg/rng.hpp"
#include "hsagg/topology.hpp"

namespace hsagg {

namespace {

using nlohmann::json;

FieldMatrix json_to_matrix(const json& j, std::uint32_t p) {
  std::vector<FieldVector> rows;
  for (const auto& jr : j) rows.push_back(jr.get<FieldVector>());
  return FieldMatrix::from_rows(rows, p);
}

json matrix_to_json(const FieldMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

Rat json_to_rat(const json& j) {
  return Rat(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

json rat_to_json(const Rat& r) { return json{{"num", r.num}, {"den", r.den}}; }

std::string pattern_name(const std::vector<std::uint32_t>& pattern) {
  std::ostringstream os;
  os << "C_{";
  for (std::size_t i = 0; i < pattern.size(); ++i) os << (i ? "," : "") << pattern[i];
  os << "}";
  return os.str();
}

}  // namespace

VectorFile load_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  try {
    json j = json::parse(in);
    VectorFile vf;
    vf.p = j.at("p").get<std::uint32_t>();
    vf.K = j.at("K").get<std::uint32_t>();
    vf.d = j.at("d").get<std::uint32_t>();
    vf.s = j.at("s").get<std::uint32_t>();
    vf.q = j.at("q").get<std::uint32_t>();
    vf.L = j.at("L").get<std::uint32_t>();
    vf.G_S = json_to_matrix(j.at("G_S"), vf.p);
    vf.mask_coord = j.at("mask_coord").get<std::vector<std::uint32_t>>();

    vf.code.K = vf.K;
    vf.code.d = vf.d;
    vf.code.s = vf.s;
    vf.code.p = vf.p;
    vf.code.segment_len = vf.d - vf.s;
    vf.code.mask_coord = vf.mask_coord;
    for (const auto& jm : j.at("encoders")) {
      std::vector<FieldVector> per_client;
      for (const auto& jk : jm)
        per_client.push_back(jk.is_null() ? FieldVector{} : jk.get<FieldVector>());
      vf.code.encoders.push_back(std::move(per_client));
    }
    for (const auto& jc : j.at("combos")) {
      GcCode::Combo combo;
      combo.pattern = jc.at("pattern").get<std::vector<std::uint32_t>>();
      combo.C = json_to_matrix(jc.at("C"), vf.p);
      vf.code.combos.push_back(std::move(combo));
    }
    std::sort(vf.code.combos.begin(), vf.code.combos.end(),
              [](const auto& a, const auto& b) { return a.pattern < b.pattern; });

    for (const auto& je : j.at("expected_messages")) {
      VectorFile::ExpectedMessage em;
      em.m = je.at("m").get<std::uint32_t>();
      em.k = je.at("k").get<std::uint32_t>();
      em.theta = je.at("theta").get<FieldVector>();
      em.key = je.at("key").get<std::uint32_t>();
      vf.expected_messages.push_back(std::move(em));
    }
    for (const auto& je : j.at("expected_relays")) {
      VectorFile::ExpectedRelay er;
      er.m = je.at("m").get<std::uint32_t>();
      for (const auto& jt : je.at("theta")) er.theta.push_back(jt.get<FieldVector>());
      er.key = je.at("key").get<FieldVector>();
      vf.expected_relays.push_back(std::move(er));
    }
    vf.key_mixing = json_to_matrix(j.at("key_mixing"), vf.p);
    vf.expected_decodes = j.at("expected_decodes").get<std::vector<std::uint32_t>>();
    const json& jr = j.at("expected_rates");
    vf.rate_R1 = json_to_rat(jr.at("R1"));
    vf.rate_R2 = json_to_rat(jr.at("R2"));
    vf.rate_RS = json_to_rat(jr.at("RS"));
    vf.rate_RSsum = json_to_rat(jr.at("RSsum"));
    return vf;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed vector file " + path + ": " + e.what());
  }
}

void save_vector_file(const VectorFile& vf, const std::string& path) {
  json j;
  j["p"] = vf.p;
  j["K"] = vf.K;
  j["d"] = vf.d;
  j["s"] = vf.s;
  j["q"] = vf.q;
  j["L"] = vf.L;
  j["G_S"] = matrix_to_json(vf.G_S);
  j["mask_coord"] = vf.mask_coord;
  json encs = json::array();
  for (std::uint32_t m = 1; m <= vf.K; ++m) {
    json row = json::array();
    for (std::uint32_t k = 1; k <= vf.K; ++k) {
      const FieldVector& w = vf.code.encoders[m - 1][k - 1];
      if (w.empty()) row.push_back(nullptr);
      else row.push_back(w);
    }
    encs.push_back(row);
  }
  j["encoders"] = encs;
  json combos = json::array();
  for (const auto& combo : vf.code.combos)
    combos.push_back(json{{"pattern", combo.pattern}, {"C", matrix_to_json(combo.C)}});
  j["combos"] = combos;
  json ems = json::array();
  for (const auto& em : vf.expected_messages)
    ems.push_back(json{{"m", em.m}, {"k", em.k}, {"theta", em.theta}, {"key", em.key}});
  j["expected_messages"] = ems;
  json ers = json::array();
  for (const auto& er : vf.expected_relays)
    ers.push_back(json{{"m", er.m}, {"theta", er.theta}, {"key", er.key}});
  j["expected_relays"] = ers;
  j["key_mixing"] = matrix_to_json(vf.key_mixing);
  j["expected_decodes"] = vf.expected_decodes;
  j["expected_rates"] = json{{"R1", rat_to_json(vf.rate_R1)},
                             {"R2", rat_to_json(vf.rate_R2)},
                             {"RS", rat_to_json(vf.rate_RS)},
                             {"RSsum", rat_to_json(vf.rate_RSsum)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vector file: " + path);
  out << j.dump(2) << "\n";
}

namespace {

struct Workbench {
  FieldConfig cfg;
  Topology topo;
  Layout lay;
  std::vector<std::vector<ClientMessage>> encodes;  // [k-1], zero models
  std::vector<SymbolTrace> relay_traces;            // [m-1], complete inboxes
};

Workbench make_workbench(const VectorFile& vf, KeySchedule& sched) {
  Workbench wb{FieldConfig(vf.p, vf.q, vf.K), build_topology(vf.K, vf.d), Layout{}, {}, {}};
  wb.lay = make_layout(vf.K, vf.L, vf.code.segment_len,
                       static_cast<std::uint32_t>(vf.G_S.cols()));
  SourceRandomness src = draw_source(wb.cfg, vf.d, wb.lay.L_X, 0);
  sched = expand_keys(vf.G_S, src, wb.lay.L_X);

  std::vector<std::vector<ClientMessage>> inbox(vf.K);
  for (std::uint32_t k = 1; k <= vf.K; ++k) {
    LocalModel zero{k, std::vector<std::uint32_t>(vf.L, 0)};
    wb.encodes.push_back(client_encode(zero, sched, vf.code, wb.topo, wb.cfg));
    for (const auto& msg : wb.encodes.back()) inbox[msg.to - 1].push_back(msg);
  }
  for (std::uint32_t m = 1; m <= vf.K; ++m) {
    auto y = relay_aggregate(m, inbox[m - 1], wb.topo, wb.lay, vf.p);
    if (!y) throw std::runtime_error("complete inbox did not aggregate");
    wb.relay_traces.push_back(std::move(y->trace));
  }
  return wb;
}

}  // namespace

std::vector<CheckResult> verify_example(const VectorFile& vf) {
  std::vector<CheckResult> out;
  auto fail = [&](const std::string& name, const std::string& detail) {
    out.push_back({name, false, detail});
  };
  auto pass = [&](const std::string& name, const std::string& detail) {
    out.push_back({name, true, detail});
  };

  // Structural validity; everything later assumes it.
  try {
    FieldConfig cfg(vf.p, vf.q, vf.K);
    build_topology(vf.K, vf.d);
    if (vf.s >= vf.d) throw std::invalid_argument("need s < d");
    if (vf.L < 1) throw std::invalid_argument("need L >= 1");
    const std::uint32_t lt = vf.d - vf.s;
    if (vf.G_S.rows() != vf.K || vf.G_S.cols() != seed_len(vf.K, vf.d))
      throw std::invalid_argument("generator shape");
    if (vf.mask_coord.size() != vf.K) throw std::invalid_argument("mask_coord size");
    for (std::uint32_t mc : vf.mask_coord)
      if (mc < 1 || mc > lt) throw std::invalid_argument("mask_coord range");
    if (vf.code.encoders.size() != vf.K) throw std::invalid_argument("encoder rows");
    Topology topo = build_topology(vf.K, vf.d);
    for (std::uint32_t m = 1; m <= vf.K; ++m) {
      if (vf.code.encoders[m - 1].size() != vf.K) throw std::invalid_argument("encoder cols");
      for (std::uint32_t k = 1; k <= vf.K; ++k) {
        bool active = topo.sends_to(k, m);
        const auto& w = vf.code.encoders[m - 1][k - 1];
        if (active != !w.empty() || (active && w.size() != lt))
          throw std::invalid_argument("encoder support");
      }
    }
    if (vf.code.combos.size() != binomial(vf.K, vf.s))
      throw std::invalid_argument("combo count");
    if (vf.key_mixing.rows() != vf.K || vf.key_mixing.cols() != vf.G_S.cols())
      throw std::invalid_argument("key_mixing shape");
    pass("config", "parameters and shapes consistent");
  } catch (const std::exception& e) {
    fail("config", e.what());
    return out;
  }

  KeySchedule sched;
  Workbench wb = make_workbench(vf, sched);
  const std::uint32_t lt = vf.code.segment_len;
  const Layout& lay = wb.lay;

  if (verify_gs(vf.G_S, vf.d)) pass("generator", "zero column sums and all row subsets full rank");
  else fail("generator", "verify_gs rejects G_S");

  // Recovery identity per pattern, against the symbolic relay traces: the
  // combined rows must hit exactly the per-coordinate sums with no residual
  // randomness.
  {
    bool all_ok = verify_recovery(vf.code);
    std::string bad;
    for (const auto& combo : vf.code.combos) {
      bool ok = true;
      for (std::uint32_t m : combo.pattern)
        for (std::uint32_t l = 0; l < lt && ok; ++l)
          if (combo.C.at(l, m - 1) != 0) ok = false;
      for (std::uint32_t lx = 1; lx <= lay.L_X && ok; ++lx)
        for (std::uint32_t l = 1; l <= lt && ok; ++l) {
          FieldVector theta_row(lay.theta_cols(), 0);
          FieldVector z_row(lay.z_cols(), 0);
          for (std::uint32_t m = 1; m <= vf.K; ++m) {
            if (std::binary_search(combo.pattern.begin(), combo.pattern.end(), m)) continue;
            std::uint32_t coef = combo.C.at(l - 1, m - 1);
            if (!coef) continue;
            const SymbolTrace& tr = wb.relay_traces[m - 1];
            for (std::size_t c = 0; c < theta_row.size(); ++c)
              theta_row[c] = fp_add(theta_row[c], fp_mul(coef, tr.theta.at(lx - 1, c), vf.p), vf.p);
            for (std::size_t c = 0; c < z_row.size(); ++c)
              z_row[c] = fp_add(z_row[c], fp_mul(coef, tr.z.at(lx - 1, c), vf.p), vf.p);
          }
          for (std::size_t c = 0; c < theta_row.size(); ++c) {
            std::uint32_t expect = 0;
            std::uint32_t pos = static_cast<std::uint32_t>(c % lay.L_pad) + 1;
            if ((pos - 1) / lt + 1 == lx && (pos - 1) % lt + 1 == l) expect = 1;
            if (theta_row[c] != expect) ok = false;
          }
          for (std::uint32_t c2 : z_row)
            if (c2 != 0) ok = false;
        }
      if (!ok && bad.empty()) bad = pattern_name(combo.pattern);
    }
    if (bad.empty() && all_ok)
      pass("recovery", std::to_string(vf.code.combos.size()) + " patterns recover the sums");
    else
      fail("recovery", (bad.empty() ? std::string("verify_recovery") : bad) +
                           " fails the recovery identity");
  }

  // Per-message displays, checked on the actual encoder traces.
  {
    std::string bad;
    std::size_t expected_count = std::size_t(vf.K) * vf.d;
    if (vf.expected_messages.size() != expected_count)
      bad = "message list has " + std::to_string(vf.expected_messages.size()) + " entries, want " +
            std::to_string(expected_count);
    for (const auto& em : vf.expected_messages) {
      if (!bad.empty()) break;
      std::string name = "X_{" + std::to_string(em.m) + "," + std::to_string(em.k) + "}";
      if (!wb.topo.sends_to(em.k, em.m)) {
        bad = name + " names a non-link";
        break;
      }
      if (vf.code.encoder(em.m, em.k) != em.theta ||
          em.theta[vf.mask_coord[em.k - 1] - 1] != em.key) {
        bad = name + " disagrees with the stored encoder";
        break;
      }
      const ClientMessage* msg = nullptr;
      for (const auto& cand : wb.encodes[em.k - 1])
        if (cand.to == em.m) msg = &cand;
      if (!msg) {
        bad = name + " missing from encode output";
        break;
      }
      for (std::uint32_t lx = 1; lx <= lay.L_X && bad.empty(); ++lx) {
        for (std::size_t c = 0; c < lay.theta_cols(); ++c) {
          std::uint32_t expect = 0;
          if (c / lay.L_pad == em.k - 1) {
            std::uint32_t pos = static_cast<std::uint32_t>(c % lay.L_pad);
            if (pos / lt + 1 == lx) expect = em.theta[pos % lt];
          }
          if (msg->trace.theta.at(lx - 1, c) != expect) {
            bad = name + " theta trace mismatch";
            break;
          }
        }
        for (std::size_t c = 0; c < lay.z_cols() && bad.empty(); ++c) {
          std::uint32_t expect = 0;
          if (c / lay.L_seed == lx - 1)
            expect = fp_mul(em.key, vf.G_S.at(em.k - 1, c % lay.L_seed), vf.p);
          if (msg->trace.z.at(lx - 1, c) != expect) bad = name + " key trace mismatch";
        }
      }
    }
    if (bad.empty())
      pass("messages", std::to_string(vf.expected_messages.size()) + " client messages match");
    else fail("messages", bad);
  }

  // Per-relay displays on the aggregated traces.
  {
    std::string bad;
    if (vf.expected_relays.size() != vf.K) bad = "relay list incomplete";
    for (const auto& er : vf.expected_relays) {
      if (!bad.empty()) break;
      std::string name = "Y_" + std::to_string(er.m);
      if (er.m < 1 || er.m > vf.K || er.theta.size() != vf.K || er.key.size() != vf.K) {
        bad = name + " malformed";
        break;
      }
      for (std::uint32_t k = 1; k <= vf.K && bad.empty(); ++k) {
        bool active = wb.topo.sends_to(k, er.m);
        FieldVector want = active ? vf.code.encoder(er.m, k) : FieldVector(lt, 0);
        if (er.theta[k - 1] != want) {
          bad = name + " theta coefficients differ for client " + std::to_string(k);
          break;
        }
        std::uint32_t want_key = active ? want[vf.mask_coord[k - 1] - 1] : 0;
        if (er.key[k - 1] != want_key) {
          bad = name + " key coefficient differs for client " + std::to_string(k);
          break;
        }
      }
      const SymbolTrace& tr = wb.relay_traces[er.m - 1];
      for (std::uint32_t lx = 1; lx <= lay.L_X && bad.empty(); ++lx)
        for (std::size_t c = 0; c < lay.theta_cols(); ++c) {
          std::uint32_t k = static_cast<std::uint32_t>(c / lay.L_pad) + 1;
          std::uint32_t pos = static_cast<std::uint32_t>(c % lay.L_pad);
          std::uint32_t expect = pos / lt + 1 == lx ? er.theta[k - 1][pos % lt] : 0;
          if (tr.theta.at(lx - 1, c) != expect) {
            bad = name + " aggregated theta trace mismatch";
            break;
          }
        }
    }
    if (bad.empty()) pass("relays", std::to_string(vf.K) + " relay messages match");
    else fail("relays", bad);
  }

  // Key-mixing rows: per-relay key coefficients pushed through the generator,
  // compared against the stored matrix and the aggregated randomness traces.
  {
    std::string bad;
    for (std::uint32_t m = 1; m <= vf.K && bad.empty(); ++m) {
      FieldVector row(vf.G_S.cols(), 0);
      for (std::uint32_t k : wb.topo.clients_of(m)) {
        std::uint32_t key = vf.code.encoder(m, k)[vf.mask_coord[k - 1] - 1];
        for (std::size_t c = 0; c < row.size(); ++c)
          row[c] = fp_add(row[c], fp_mul(key, vf.G_S.at(k - 1, c), vf.p), vf.p);
      }
      for (std::size_t c = 0; c < row.size(); ++c)
        if (vf.key_mixing.at(m - 1, c) != row[c]) {
          bad = "key_mixing row " + std::to_string(m) + " disagrees with the encoders";
          break;
        }
      const SymbolTrace& tr = wb.relay_traces[m - 1];
      for (std::uint32_t lx = 1; lx <= lay.L_X && bad.empty(); ++lx)
        for (std::size_t c = 0; c < lay.z_cols(); ++c) {
          std::uint32_t expect =
              c / lay.L_seed == lx - 1u ? row[c % lay.L_seed] : 0;
          if (tr.z.at(lx - 1, c) != expect) {
            bad = "relay " + std::to_string(m) + " randomness trace disagrees with key_mixing";
            break;
          }
        }
    }
    if (bad.empty()) pass("key_mixing", "matrix matches encoders and traces");
    else fail("key_mixing", bad);
  }

  // Concrete decode runs for every listed dropout.
  {
    std::string bad;
    std::mt19937_64 gen(mix_seed(0x6f1dull, vf.K));
    for (std::uint32_t f : vf.expected_decodes) {
      if (!bad.empty()) break;
      for (int draw = 0; draw < 3 && bad.empty(); ++draw) {
        std::vector<LocalModel> models;
        for (std::uint32_t k = 1; k <= vf.K; ++k) {
          LocalModel lm{k, FieldVector(vf.L)};
          for (auto& e : lm.entries) e = static_cast<std::uint32_t>(rand_below(gen, vf.q));
          models.push_back(std::move(lm));
        }
        DropModel dm;
        dm.kind = DropModel::Kind::fixed;
        dm.failed_r2s = {f};
        EpisodeResult ep = run_episode(wb.cfg, wb.topo, sched, vf.code, models,
                                       realize_links(dm, wb.topo, 0));
        if (!ep.outcome) bad = "dropout Y_" + std::to_string(f) + " failed to decode";
        else if (!ep.sum_matches_oracle)
          bad = "dropout Y_" + std::to_string(f) + " decoded the wrong sum";
      }
    }
    if (bad.empty())
      pass("decodes", std::to_string(vf.expected_decodes.size()) +
                          " single-relay dropouts decode the exact sum");
    else fail("decodes", bad);
  }

  // Rates, exact rational comparison.
  {
    RateReport rr = measured_rates(sched, vf.code, wb.cfg, wb.topo);
    bool ok = rr.R1.value == vf.rate_R1 && rr.R2.value == vf.rate_R2 &&
              rr.RS.value == vf.rate_RS && rr.RSsum.value == vf.rate_RSsum && !rr.R1.has_unit &&
              !rr.R2.has_unit && rr.RS.has_unit && rr.RSsum.has_unit;
    bool optimal = rr.achieves_optimum[0] && rr.achieves_optimum[1] && rr.achieves_optimum[2] &&
                   rr.achieves_optimum[3];
    if (ok && optimal)
      pass("rates", "R1=" + rr.R1.value.str() + " R2=" + rr.R2.value.str() + " RS=" +
                        rr.RS.value.str() + "u RSsum=" + rr.RSsum.value.str() +
                        "u, all at the optimal bound");
    else fail("rates", ok ? "rates off the optimal bound" : "measured rates differ from expected");
  }

  return out;
}

}  // namespace hsagg
