#include "hsagg/protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hsagg/errors.hpp"

namespace hsagg {

Layout make_layout(std::uint32_t K, std::uint32_t L, std::uint32_t segment_len,
                   std::uint32_t L_seed) {
  if (L == 0 || segment_len == 0) throw std::invalid_argument("make_layout: empty shapes");
  Layout lay;
  lay.K = K;
  lay.L = L;
  lay.L_t = segment_len;
  lay.L_pad = (L + segment_len - 1) / segment_len * segment_len;
  lay.L_X = lay.L_pad / segment_len;
  lay.L_seed = L_seed;
  return lay;
}

std::vector<ClientMessage> client_encode(const LocalModel& model, const KeySchedule& sched,
                                         const GcCode& code, const Topology& topo,
                                         const FieldConfig& cfg,
                                         std::optional<std::uint32_t> unmask_to) {
  const std::uint32_t p = cfg.p;
  const std::uint32_t k = model.owner;
  if (k < 1 || k > topo.K) throw std::invalid_argument("client_encode: bad owner id");
  for (std::uint32_t v : model.entries)
    if (v >= cfg.q) throw std::invalid_argument("client_encode: model entry outside alphabet");
  Layout lay = make_layout(topo.K, static_cast<std::uint32_t>(model.entries.size()),
                           code.segment_len, static_cast<std::uint32_t>(sched.G_S.cols()));
  if (sched.keys[k - 1].size() != lay.L_X)
    throw std::invalid_argument("client_encode: key schedule has " +
                                std::to_string(sched.keys[k - 1].size()) + " segments, need " +
                                std::to_string(lay.L_X));

  const std::uint32_t l0 = code.mask_coord[k - 1];
  std::vector<ClientMessage> out;
  out.reserve(topo.d);
  for (std::uint32_t m : topo.relays_of(k)) {
    const FieldVector& w = code.encoder(m, k);
    ClientMessage msg;
    msg.from = k;
    msg.to = m;
    msg.payload.assign(lay.L_X, 0);
    msg.trace.theta = FieldMatrix(lay.L_X, lay.theta_cols(), p);
    msg.trace.z = FieldMatrix(lay.L_X, lay.z_cols(), p);
    std::uint32_t key_coeff = (unmask_to && *unmask_to == m) ? 0 : w[l0 - 1];
    for (std::uint32_t lx = 1; lx <= lay.L_X; ++lx) {
      std::uint32_t acc = 0;
      for (std::uint32_t lp = 1; lp <= lay.L_t; ++lp) {
        std::uint32_t l = (lx - 1) * lay.L_t + lp;  // padded entry index
        std::uint32_t theta = l <= lay.L ? model.entries[l - 1] % p : 0;
        acc = fp_add(acc, fp_mul(w[lp - 1], theta, p), p);
        msg.trace.theta.set(lx - 1, lay.theta_col(k, l), w[lp - 1]);
      }
      acc = fp_add(acc, fp_mul(key_coeff, sched.keys[k - 1][lx - 1], p), p);
      for (std::uint32_t j = 1; j <= lay.L_seed; ++j)
        msg.trace.z.set(lx - 1, lay.z_col(lx, j),
                        fp_mul(key_coeff, sched.G_S.at(k - 1, j - 1), p));
      msg.payload[lx - 1] = acc;
    }
    out.push_back(std::move(msg));
  }
  return out;
}

std::optional<RelayMessage> relay_aggregate(std::uint32_t m,
                                            const std::vector<ClientMessage>& inbox,
                                            const Topology& topo, const Layout& lay,
                                            std::uint32_t p) {
  const auto& expected = topo.clients_of(m);
  std::vector<const ClientMessage*> got(expected.size(), nullptr);
  for (const auto& msg : inbox) {
    if (msg.to != m) continue;
    auto it = std::find(expected.begin(), expected.end(), msg.from);
    if (it != expected.end()) got[it - expected.begin()] = &msg;
  }
  if (std::find(got.begin(), got.end(), nullptr) != got.end()) return std::nullopt;  // Silent

  RelayMessage y;
  y.from = m;
  y.payload.assign(lay.L_X, 0);
  y.trace.theta = FieldMatrix(lay.L_X, lay.theta_cols(), p);
  y.trace.z = FieldMatrix(lay.L_X, lay.z_cols(), p);
  for (const ClientMessage* msg : got) {
    for (std::uint32_t r = 0; r < lay.L_X; ++r) {
      y.payload[r] = fp_add(y.payload[r], msg->payload[r], p);
      for (std::size_t c = 0; c < lay.theta_cols(); ++c)
        y.trace.theta.set(r, c, fp_add(y.trace.theta.at(r, c), msg->trace.theta.at(r, c), p));
      for (std::size_t c = 0; c < lay.z_cols(); ++c)
        y.trace.z.set(r, c, fp_add(y.trace.z.at(r, c), msg->trace.z.at(r, c), p));
    }
  }
  return y;
}

std::optional<AggregateResult> server_decode(const std::vector<RelayMessage>& received,
                                             const GcCode& code, const FieldConfig& cfg,
                                             std::uint32_t L) {
  const std::uint32_t p = cfg.p, K = cfg.K;
  std::vector<const RelayMessage*> by_relay(K, nullptr);
  for (const auto& y : received) by_relay[y.from - 1] = &y;
  std::vector<std::uint32_t> missing;
  for (std::uint32_t m = 1; m <= K; ++m)
    if (!by_relay[m - 1]) missing.push_back(m);
  if (missing.size() > code.s) return std::nullopt;  // InsufficientRelays

  const FieldMatrix& C = combination_matrix(code, missing);
  const std::uint32_t Lt = code.segment_len;
  const std::uint32_t L_pad = (L + Lt - 1) / Lt * Lt;
  const std::uint32_t L_X = L_pad / Lt;

  FieldVector padded(L_pad, 0);
  for (std::uint32_t lx = 0; lx < L_X; ++lx)
    for (std::uint32_t lt = 0; lt < Lt; ++lt) {
      std::uint32_t acc = 0;
      for (std::uint32_t m = 1; m <= K; ++m) {
        std::uint32_t c = C.at(lt, m - 1);
        if (!c) continue;  // zero columns cover exactly the pattern's relays
        acc = fp_add(acc, fp_mul(c, by_relay[m - 1]->payload[lx], p), p);
      }
      padded[lx * Lt + lt] = acc;
    }

  AggregateResult res;
  res.finite_sum.assign(padded.begin(), padded.begin() + L);
  res.integer_sum = lift_to_integers(res.finite_sum, cfg);
  for (const auto& combo : code.combos)
    if (&combo.C == &C) res.used_pattern = combo.pattern;
  res.pad_len = L_pad - L;
  return res;
}

std::vector<std::uint32_t> lift_to_integers(const FieldVector& finite_sum,
                                            const FieldConfig& cfg) {
  const std::uint64_t cap = std::uint64_t(cfg.K) * (cfg.q - 1);
  std::vector<std::uint32_t> out;
  out.reserve(finite_sum.size());
  for (std::uint32_t v : finite_sum) {
    std::uint32_t rep = v % cfg.p;
    if (rep > cap)
      throw OutOfRange("lift_to_integers: entry " + std::to_string(rep) + " exceeds K*(q-1) = " +
                       std::to_string(cap));
    out.push_back(rep);
  }
  return out;
}

std::vector<std::uint32_t> plain_integer_sum(const std::vector<LocalModel>& models) {
  if (models.empty()) return {};
  std::vector<std::uint32_t> sum(models.front().entries.size(), 0);
  for (const auto& m : models) {
    if (m.entries.size() != sum.size())
      throw std::invalid_argument("plain_integer_sum: ragged model lengths");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.entries[i];
  }
  return sum;
}

FieldVector eval_trace(const SymbolTrace& trace, const FieldVector& theta_padded,
                       const FieldVector& z, std::uint32_t p) {
  if (trace.theta.cols() != theta_padded.size() || trace.z.cols() != z.size())
    throw std::invalid_argument("eval_trace: shape mismatch");
  FieldVector out(trace.theta.rows(), 0);
  for (std::size_t r = 0; r < trace.theta.rows(); ++r) {
    std::uint32_t acc = 0;
    for (std::size_t c = 0; c < trace.theta.cols(); ++c)
      acc = fp_add(acc, fp_mul(trace.theta.at(r, c), theta_padded[c], p), p);
    for (std::size_t c = 0; c < trace.z.cols(); ++c)
      acc = fp_add(acc, fp_mul(trace.z.at(r, c), z[c], p), p);
    out[r] = acc;
  }
  return out;
}

FieldVector pack_models(const std::vector<LocalModel>& models, const Layout& lay) {
  FieldVector packed(lay.theta_cols(), 0);
  for (const auto& m : models)
    for (std::uint32_t l = 1; l <= lay.L; ++l)
      packed[lay.theta_col(m.owner, l)] = m.entries[l - 1];
  return packed;
}

}  // namespace hsagg
