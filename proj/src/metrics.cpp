#include "hsagg/metrics.hpp"

#include <stdexcept>

namespace hsagg {

namespace {

RateValue rv(Rat v, bool unit) { return RateValue{v, unit}; }

Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace

RateReport measured_rates(const KeySchedule& sched, const GcCode& code, const FieldConfig& cfg,
                          const Topology& topo) {
  const std::int64_t d = topo.d;
  const std::int64_t seg = code.segment_len;
  const std::int64_t l_x = sched.keys.empty() ? 1
                                              : static_cast<std::int64_t>(sched.keys[0].size());
  const std::int64_t l_seed = static_cast<std::int64_t>(sched.G_S.cols());
  const std::int64_t l_total = l_x * seg;

  RateReport r;
  r.p = cfg.p;
  r.q = cfg.q;
  r.R1 = rv(Rat(d * l_x, l_total), false);
  r.R2 = rv(Rat(l_x, l_total), false);
  r.RS = rv(Rat(l_x, l_total), true);
  r.RSsum = rv(Rat(l_seed * l_x, l_total), true);
  r.bounds = theorem1_bounds(topo.K, topo.d, code.s, cfg);
  auto eq = [](const RateValue& a, const RateValue& b) {
    return a.has_unit == b.has_unit && a.value == b.value;
  };
  r.achieves_optimum = {eq(r.R1, r.bounds[0]), eq(r.R2, r.bounds[1]), eq(r.RS, r.bounds[2]),
                        eq(r.RSsum, r.bounds[3])};
  return r;
}

std::array<RateValue, 4> theorem1_bounds(std::uint32_t K, std::uint32_t d, std::uint32_t s,
                                         const FieldConfig& cfg) {
  (void)cfg;
  if (!(d <= K - 1) || !(s < d))
    throw std::invalid_argument("theorem1_bounds: need 0 <= s < d <= K-1");
  const std::int64_t dd = d, kk = K, ss = s;
  Rat r1(dd, dd - ss);
  Rat r2 = rat_max(Rat(1, dd - ss), Rat(1, kk - 1));
  Rat rsum = rat_max(Rat(dd, dd - ss), Rat(kk - dd, dd - ss));
  return {rv(r1, false), rv(r2, false), rv(r2, true), rv(rsum, true)};
}

std::array<bool, 4> check_in_region(const RateReport& report) {
  auto geq = [](const RateValue& a, const RateValue& b) {
    return a.has_unit == b.has_unit && a.value >= b.value;
  };
  return {geq(report.R1, report.bounds[0]), geq(report.R2, report.bounds[1]),
          geq(report.RS, report.bounds[2]), geq(report.RSsum, report.bounds[3])};
}

}  // namespace hsagg
