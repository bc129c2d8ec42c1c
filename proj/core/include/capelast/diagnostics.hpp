#pragma once

#include <string>
#include <vector>

#include "capelast/graphmap.hpp"
#include "capelast/state.hpp"

namespace capelast {

struct DiagnosticsRecord {
  double t = 0.0;
  double E_cons = 0.0;
  double E_high = 0.0;
  ConstraintResiduals constraints;
  double rt_min = 0.0;
  double dt = 0.0;
};

/// Column header matching to_csv_row().
std::string diagnostics_csv_header();
std::string to_csv_row(const DiagnosticsRecord& r);

/// 1/2 sum_k int |F_k|^2 d3phi + 1/2 int |v|^2 d3phi + sigma int_Sigma sqrt(1 + |grad psi|^2)
double conserved_energy(const State& s, const GraphMap& gm);

/// Truncated high-order energy: sum over k <= k_max of ||d_t^k F||_{4-k} + ||d_t^k v||_{4-k} +
/// |sqrt(sigma) d_t^k grad psi|_{4-k}, plus ||d_t^k q||_{4-k} for k <= min(k_max, 3).
/// Time derivatives are taken at the newest entry. Throws HistoryError if the history is too short.
double higher_energy(const History& h, const GraphMap& gm, int k_max = 1);

struct RtReport {
  double rt_min = 0.0;
  bool holds = false;
};

/// min over the top surface of -d_3 q.
RtReport rt_monitor(const VolumeField& q, const GraphMap& gm, const Grid& g, double c0_req);

struct LemmaRow {
  std::string lemma;   ///< commutation, ibp or transport
  std::string detail;  ///< fields and directions involved
  double residual = 0.0;
  double scale = 0.0;
  double relative = 0.0;
};

/// Residuals of the commutation, integration-by-parts and transport identities on the stored
/// history. Spatial checks use the middle entry; time derivatives are centered there.
std::vector<LemmaRow> lemma_checks(const History& h, const GraphMap& gm, const Grid& g);

std::string lemma_csv_header();
std::string to_csv_row(const LemmaRow& r);

}  // namespace capelast
