#pragma once

// Surface-tension sweeps: runs that share grid and initial recipes and differ only in sigma,
// compared in a discrete H^2 distance taken as a sup over snapshots.

#include <string>
#include <vector>

#include "capelast/evolve.hpp"

namespace capelast {

enum class Verdict {
  kDecreasing,     ///< distances strictly decrease along the list (or all vanish)
  kNotDecreasing,
  kWithheld,       ///< some member violated rt_min >= rt_c0
  kVoid,           ///< some member aborted
};

std::string to_string(Verdict v);

struct SweepMember {
  double sigma = 0.0;
  double rt_min = 0.0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<State> snapshots;
};

struct SweepRow {
  double sigma_i = 0.0;
  double sigma_j = 0.0;
  double distance = 0.0;
  double rt_min_i = 0.0;
};

struct SweepReport {
  std::vector<SweepMember> members;
  std::vector<SweepRow> rows;
  Verdict verdict = Verdict::kVoid;
  double rt_c0 = 0.0;
};

/// sup over matching snapshots of |psi_a - psi_b|_2 + ||v_a - v_b||_2 + sum_j ||F_j,a - F_j,b||_2.
/// Throws PreconditionError when the snapshot times differ.
double snapshot_distance(const Grid& g, const std::vector<State>& a, const std::vector<State>& b);

/// Runs base with each sigma (non-increasing, >= 0) on up to `jobs` threads and compares
/// consecutive members. Results do not depend on `jobs`.
SweepReport sweep_sigma(const RunConfig& base, const std::vector<double>& sigmas, int jobs = 1);

/// Single member of a sweep.
SweepMember run_member(const RunConfig& base, double sigma);

/// Distances d(sigma_i, 0) of every sweep member against a sigma = 0 run of the same data.
SweepReport limit_compare(const SweepReport& sweep, const SweepMember& zero, const Grid& g);

std::string sweep_csv_header();
std::string to_csv(const SweepReport& r);
/// Human-readable block: one line per row and the verdict.
std::string summary(const SweepReport& r);

}  // namespace capelast
