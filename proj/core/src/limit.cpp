#include "capelast/limit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "capelast/error.hpp"

namespace capelast {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Verdict judge(const std::vector<SweepMember>& members, const std::vector<SweepRow>& rows, double rt_c0) {
  for (const auto& m : members)
    if (m.aborted) return Verdict::kVoid;
  for (const auto& m : members)
    if (m.rt_min < rt_c0) return Verdict::kWithheld;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const bool both_zero = rows[n].distance == 0.0 && rows[n - 1].distance == 0.0;
    if (!both_zero && !(rows[n].distance < rows[n - 1].distance)) return Verdict::kNotDecreasing;
  }
  return Verdict::kDecreasing;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kDecreasing: return "decreasing";
    case Verdict::kNotDecreasing: return "not_decreasing";
    case Verdict::kWithheld: return "withheld";
    default: return "void";
  }
}

double snapshot_distance(const Grid& g, const std::vector<State>& a, const std::vector<State>& b) {
  if (a.size() != b.size()) throw PreconditionError("snapshot_distance: snapshot counts differ");
  double sup = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (std::abs(a[n].t - b[n].t) > 1e-9 * (1.0 + std::abs(a[n].t)))
      throw PreconditionError("snapshot_distance: snapshot times differ");
    double d = sobolev_norm(g, a[n].psi - b[n].psi, 2);
    d += sobolev_norm(g, a[n].v - b[n].v, 2);
    for (int j = 0; j < 3; ++j) d += sobolev_norm(g, a[n].F[j] - b[n].F[j], 2);
    sup = std::max(sup, d);
  }
  return sup;
}

SweepMember run_member(const RunConfig& base, double sigma) {
  RunConfig c = base;
  c.init.sigma = sigma;
  SweepMember m;
  m.sigma = sigma;
  try {
    RunResult r = run(c);
    m.rt_min = r.rt_min;
    m.aborted = r.aborted;
    m.abort_reason = r.abort_reason;
    m.snapshots = std::move(r.snapshots);
  } catch (const Error& e) {
    m.aborted = true;
    m.abort_reason = e.what();
  }
  return m;
}

SweepReport sweep_sigma(const RunConfig& base, const std::vector<double>& sigmas, int jobs) {
  if (sigmas.empty()) throw PreconditionError("sweep_sigma: empty sigma list");
  for (std::size_t n = 0; n < sigmas.size(); ++n) {
    if (!(sigmas[n] >= 0.0)) throw PreconditionError("sweep_sigma: sigma values must be non-negative");
    if (n > 0 && sigmas[n] > sigmas[n - 1]) throw PreconditionError("sweep_sigma: sigma list must be non-increasing");
  }

  SweepReport rep;
  rep.rt_c0 = base.rt_c0;
  rep.members.resize(sigmas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < sigmas.size(); n = next++) rep.members[n] = run_member(base, sigmas[n]);
  };
  const int threads = std::clamp<int>(jobs, 1, static_cast<int>(sigmas.size()));
  std::vector<std::jthread> pool;
  for (int n = 1; n < threads; ++n) pool.emplace_back(worker);
  worker();
  pool.clear();

  const Grid g = Grid::make(base.init.nx, base.init.ny, base.init.nz, base.init.b);
  for (std::size_t n = 0; n + 1 < sigmas.size(); ++n) {
    const SweepMember& a = rep.members[n];
    const SweepMember& b = rep.members[n + 1];
    if (a.aborted || b.aborted) break;
    rep.rows.push_back({a.sigma, b.sigma, snapshot_distance(g, a.snapshots, b.snapshots), a.rt_min});
  }
  rep.verdict = judge(rep.members, rep.rows, rep.rt_c0);
  return rep;
}

SweepReport limit_compare(const SweepReport& sweep, const SweepMember& zero, const Grid& g) {
  if (zero.sigma != 0.0) throw PreconditionError("limit_compare: reference run must have sigma = 0");
  SweepReport rep;
  rep.rt_c0 = sweep.rt_c0;
  rep.members = sweep.members;
  rep.members.push_back(zero);
  if (!zero.aborted)
    for (const auto& m : sweep.members) {
      if (m.aborted) break;
      rep.rows.push_back({m.sigma, 0.0, snapshot_distance(g, m.snapshots, zero.snapshots), m.rt_min});
    }
  rep.verdict = judge(rep.members, rep.rows, rep.rt_c0);
  return rep;
}

std::string sweep_csv_header() { return "sigma_i,sigma_j,distance,rt_min_i,verdict"; }

std::string to_csv(const SweepReport& r) {
  std::ostringstream os;
  os << sweep_csv_header() << '\n';
  for (const auto& row : r.rows)
    os << fmt(row.sigma_i) << ',' << fmt(row.sigma_j) << ',' << fmt(row.distance) << ',' << fmt(row.rt_min_i) << ','
       << to_string(r.verdict) << '\n';
  return os.str();
}

std::string summary(const SweepReport& r) {
  std::ostringstream os;
  os << "members:\n";
  for (const auto& m : r.members) {
    os << "  sigma = " << m.sigma << "  rt_min = " << m.rt_min;
    if (m.aborted) os << "  ABORTED (" << m.abort_reason << ')';
    os << '\n';
  }
  os << "distances:\n";
  for (const auto& row : r.rows) os << "  d(" << row.sigma_i << ", " << row.sigma_j << ") = " << row.distance << '\n';
  os << "rt threshold: " << r.rt_c0 << "\nverdict: " << to_string(r.verdict) << '\n';
  return os.str();
}

}  // namespace capelast
