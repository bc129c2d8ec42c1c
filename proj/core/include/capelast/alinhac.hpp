#pragma once

// Tangential-derivative calculus on stored histories: D^alpha = d_t^a0 d_1^a1 d_2^a2, good unknowns
// D^alpha f - D^alpha phi d_3^phi f and the commutator remainders that close the identities
//   D^a d_tau^phi f = d_tau^phi G + C_tau(f),  D^a d_3^phi f = d_3^phi G + C_3(f),
//   D^a D_t^phi f  = D_t^phi G + D(f).
// Time derivatives are finite differences over every stored entry, evaluated at the newest one.

#include <string>
#include <string_view>
#include <vector>

#include "capelast/graphmap.hpp"
#include "capelast/state.hpp"

namespace capelast {

struct MultiIndex {
  int t = 0;
  int x1 = 0;
  int x2 = 0;

  int order() const noexcept { return t + x1 + x2; }
  /// Throws PreconditionError for negative entries or order > 4.
  void validate() const;
  std::string str() const;
};

/// Names accepted as `field`: v1..v3, Fij (row i, column j), q, phi.
VolumeField field_of(const State& s, const GraphMap& gm, std::string_view field);

VolumeField tangential_derivative(const History& h, std::string_view field, MultiIndex a);
VolumeField good_unknown(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm);

VolumeField remainder_Ctau(const History& h, std::string_view field, MultiIndex a, int tau, const GraphMap& gm);
VolumeField remainder_C3(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm);
/// Uses the velocity stored in the history.
VolumeField remainder_D(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm);

enum class AlinhacIdentity { kTau1, kTau2, kVertical, kMaterial };

std::string to_string(AlinhacIdentity which);

/// ||LHS - RHS||_0 of the selected identity at the newest history entry.
double alinhac_residual(const History& h, std::string_view field, MultiIndex a, AlinhacIdentity which,
                        const GraphMap& gm);

struct CurlCommutatorResiduals {
  double r1 = 0.0;  ///< || curl(D_t v) - D_t curl v - eps (d_a v_k)(d_k v_b) ||_0
  double r2 = 0.0;  ///< || curl((F_k.grad)F_k) - (F_k.grad) curl F_k - eps (d_a F_k . grad) F_bk ||_0
};

CurlCommutatorResiduals curl_commutator_residuals(const History& h, const GraphMap& gm);

}  // namespace capelast
