#include "ehsched/report.hpp"

#include <algorithm>

#include "ehsched/blind.hpp"
#include "ehsched/parallel.hpp"

namespace ehsched {

std::vector<SurfacePoint> threshold_surface(const ThresholdTable& thresholds) {
  std::vector<SurfacePoint> out;
  out.reserve(static_cast<std::size_t>(thresholds.horizon()) * thresholds.capacity());
  for (int t = 1; t <= thresholds.horizon(); ++t) {
    for (int e = 1; e <= thresholds.capacity(); ++e) out.push_back({t, e, thresholds.tau(t, e)});
  }
  return out;
}

std::vector<SurfacePoint> threshold_surface(const Instance& instance, const QuadratureConfig& quad,
                                            int threads) {
  DpOptions opts;
  opts.threads = threads;
  return threshold_surface(backward_induction(instance, quad, opts).thresholds);
}

int VoiCurve::argmax() const {
  if (rows.empty()) throw DomainError("empty VoI curve");
  auto best = rows.begin();
  for (auto it = rows.begin(); it != rows.end(); ++it) {
    if (it->voi > best->voi) best = it;
  }
  return best->capacity;
}

VoiCurve voi_curve(const Instance& instance_template, const std::vector<int>& capacities,
                   const QuadratureConfig& quad, int threads) {
  if (capacities.empty()) throw ConfigError("capacity range must be nonempty");
  if (!std::is_sorted(capacities.begin(), capacities.end()) ||
      std::adjacent_find(capacities.begin(), capacities.end()) != capacities.end()) {
    throw ConfigError("capacity range must be strictly increasing");
  }
  // The stage expectation depends only on the sources; share it.
  const StageExpectation stage(instance_template.sources(), quad);
  VoiCurve curve;
  curve.rows.resize(capacities.size());
  parallel_for(0, static_cast<int>(capacities.size()), threads, [&](int k) {
    const Instance inst = instance_template.with_capacity(capacities[k]);
    VoiRow row;
    row.capacity = capacities[k];
    row.j_blind = blind_cost(inst);
    row.j_star = optimal_cost(inst, stage);
    row.voi = row.j_blind - row.j_star;
    curve.rows[k] = row;
  });
  return curve;
}

double policy_cost(const Instance& instance_template, int capacity, PolicyKind kind,
                   const QuadratureConfig& quad, int threads) {
  const Instance inst = instance_template.with_capacity(capacity);
  if (kind == PolicyKind::Blind) return blind_cost(inst);
  DpOptions opts;
  opts.threads = threads;
  return optimal_cost(inst, StageExpectation(inst.sources(), quad), opts);
}

BatteryEquivalent battery_equivalent(double target_cost, const Instance& instance_template,
                                     PolicyKind kind, const QuadratureConfig& quad,
                                     std::optional<int> max_capacity, int threads) {
  const int hi_cap = max_capacity.value_or(instance_template.horizon());
  if (hi_cap < 1) throw ConfigError("max capacity must be >= 1");
  auto cost = [&](int b) { return policy_cost(instance_template, b, kind, quad, threads); };

  BatteryEquivalent result;
  if (cost(1) <= target_cost) {
    result.capacity = 1;
    result.note = "target met at the minimum legal capacity";
    return result;
  }
  const double top = cost(hi_cap);
  if (top > target_cost) {
    result.note = "unreachable for capacity <= " + std::to_string(hi_cap);
    return result;
  }

  // Spot-check monotonicity on a coarse grid before trusting bisection.
  constexpr int kProbes = 8;
  bool monotone = true;
  double prev = cost(1);
  for (int k = 1; k <= kProbes; ++k) {
    const int b = 1 + (hi_cap - 1) * k / kProbes;
    const double c = cost(b);
    if (c > prev + 1e-9 * std::max(1.0, std::abs(prev))) monotone = false;
    prev = c;
  }

  if (monotone) {
    int lo = 1;  // cost(lo) > target
    int hi = hi_cap;  // cost(hi) <= target
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      (cost(mid) <= target_cost ? hi : lo) = mid;
    }
    result.capacity = hi;
    result.note = "bisection";
  } else {
    for (int b = 2; b <= hi_cap; ++b) {
      if (cost(b) <= target_cost) {
        result.capacity = b;
        break;
      }
    }
    result.note = "linear scan (cost not monotone in capacity)";
  }
  return result;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& surface) {
  const auto old = out.precision(17);
  out << "t,e,tau\n";
  for (const auto& p : surface) out << p.t << ',' << p.e << ',' << p.tau << '\n';
  out.precision(old);
}

void write_voi_csv(std::ostream& out, const VoiCurve& curve) {
  const auto old = out.precision(17);
  out << "B,J_blind,J_star,VoI\n";
  for (const auto& r : curve.rows) {
    out << r.capacity << ',' << r.j_blind << ',' << r.j_star << ',' << r.voi << '\n';
  }
  out.precision(old);
}

}  // namespace ehsched
