// Change of variables that removes colored noise and a non-identity linear
// constraint: the canonical network has channels W_l^{-1/2} H[l][k]
// What_k^{-1/2}, identity noise, and a plain sum-power budget.  Solutions map
// back through Sigma_l = What_l^{-1/2} Sigma'_l What_l^{-1/2}, preserving all
// link rates configuration-by-configuration.
//
// Also hosts the two-user Z-channel concavity test: with link 1 interfered by
// link 2 and link 2 clean, the weighted sum-rate is concave when H22^H H22
// dominates H12^H H12 in the PSD order and w1 <= w2 (both channels square and
// invertible).

#pragma once

#include <string>
#include <vector>

#include "netopt/network.hpp"

namespace netopt {

struct WhitenResult {
  Network canonical;            // identity W/What, same budget
  std::vector<CMat> pullback;   // What_l^{-1/2}: Sigma = pull * Sigma' * pull
  std::vector<CMat> noise_sqrt_inv;  // W_l^{-1/2}, for mapping receive-side data
};

/// Whiten a colored/linear-constraint network into canonical form.
/// Throws std::domain_error if any W_l or What_l is not positive definite.
inline WhitenResult whiten(const Network& net) {
  WhitenResult out;
  out.canonical = net;
  ensure_groups(out.canonical);
  out.pullback.resize(net.L);
  out.noise_sqrt_inv.resize(net.L);
  std::vector<CMat> winv(net.L), hatinv(net.L);
  for (int l = 0; l < net.L; ++l) {
    winv[l] = psd_inv_sqrt(net.noise(l));
    hatinv[l] = psd_inv_sqrt(net.constraint(l));
    out.noise_sqrt_inv[l] = winv[l];
    out.pullback[l] = hatinv[l];
  }
  for (int l = 0; l < net.L; ++l)
    for (int k = 0; k < net.L; ++k)
      out.canonical.H[l][k] = winv[l] * net.H[l][k] * hatinv[k];
  out.canonical.W.clear();
  out.canonical.What.clear();
  return out;
}

struct ZConcavityWitness {
  bool ok = false;
  double min_eig = 0.0;   // smallest eigenvalue of H22^H H22 - H12^H H12
  bool weights_ok = false;
  bool invertible = false;
  std::string reason;
};

/// Concavity test for the two-user Z channel objective.
/// Throws std::invalid_argument on non-square inputs.
inline ZConcavityWitness z_concavity_check(const CMat& h12, const CMat& h22,
                                           double w1, double w2) {
  if (h12.rows() != h12.cols() || h22.rows() != h22.cols() ||
      h12.rows() != h22.rows())
    throw std::invalid_argument("z_concavity_check: channels must be square");
  ZConcavityWitness out;
  ThinSvd s12 = thin_svd(h12);
  ThinSvd s22 = thin_svd(h22);
  out.invertible = s12.rank == h12.rows() && s22.rank == h22.rows();
  RVec ev = hermitian_eigenvalues(h22.adjoint() * h22 - h12.adjoint() * h12);
  out.min_eig = ev.size() > 0 ? ev(0) : 0.0;
  bool dominance = out.min_eig >= -kPsdTol * (1.0 + std::abs(ev(ev.size() - 1)));
  out.weights_ok = w1 <= w2;
  out.ok = out.invertible && dominance && out.weights_ok;
  if (!out.invertible)
    out.reason = "a cross or direct channel is singular";
  else if (!dominance)
    out.reason = "H22^H H22 does not dominate H12^H H12";
  else if (!out.weights_ok)
    out.reason = "w1 exceeds w2";
  return out;
}

}  // namespace netopt
