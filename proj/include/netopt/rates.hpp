// Interference-plus-noise covariances and mutual-information rates for both
// link directions.
//
// Forward:  Omega_l    = W_l    + sum_k phi(l,k) H[l][k] Sigma_k H[l][k]^H
//           rate_l     = log det(I + H[l][l] Sigma_l H[l][l]^H Omega_l^{-1})
// Reverse:  OmegaHat_l = What_l + sum_k phi(k,l) H[k][l]^H SigmaHat_k H[k][l]
//           rate_l     = log det(I + H[l][l]^H SigmaHat_l H[l][l] OmegaHat_l^{-1})
//
// Natural log internally; bits only at reporting boundaries.

#pragma once

#include <vector>

#include "netopt/network.hpp"

namespace netopt {

/// Per-link covariance list together with its direction.
struct CovarianceSet {
  std::vector<CMat> sigma;
  Role role = Role::forward;
};

/// All-zero covariance set for a network direction.
inline std::vector<CMat> zero_covs(const Network& net, Role role = Role::forward) {
  std::vector<CMat> out(net.L);
  for (int l = 0; l < net.L; ++l) {
    int n = role == Role::forward ? net.nt[l] : net.nr[l];
    out[l] = CMat::Zero(n, n);
  }
  return out;
}

/// Interference-plus-noise covariance of link l; Hermitian positive definite
/// because the noise term is PD and interference is PSD.
inline CMat interference_covariance(const Network& net,
                                    const std::vector<CMat>& covs, int l,
                                    Role role = Role::forward) {
  if (role == Role::forward) {
    CMat omega = net.noise(l);
    for (int k = 0; k < net.L; ++k)
      if (net.phi(l, k) == 1)
        omega += net.H[l][k] * covs[k] * net.H[l][k].adjoint();
    return hermitize(omega);
  }
  CMat omega = net.constraint(l);
  for (int k = 0; k < net.L; ++k)
    if (net.phi(k, l) == 1)
      omega += net.H[k][l].adjoint() * covs[k] * net.H[k][l];
  return hermitize(omega);
}

enum class Base { nats, bits };

/// Mutual information of link l in nats.
inline double link_rate_nats(const Network& net, const std::vector<CMat>& covs,
                             int l, Role role = Role::forward) {
  CMat omega = interference_covariance(net, covs, l, role);
  const CMat& h = net.H[l][l];
  if (role == Role::forward) return logdet_rate(h, covs[l], omega);
  return logdet_rate(h.adjoint(), covs[l], omega);
}

/// Mutual information of link l, base-configurable (default bits).
inline double link_rate(const Network& net, const std::vector<CMat>& covs, int l,
                        Role role = Role::forward, Base base = Base::bits) {
  double nats = link_rate_nats(net, covs, l, role);
  return base == Base::bits ? nats / std::log(2.0) : nats;
}

/// Per-link rates in nats.
inline std::vector<double> all_rates_nats(const Network& net,
                                          const std::vector<CMat>& covs,
                                          Role role = Role::forward) {
  std::vector<double> out(net.L);
  for (int l = 0; l < net.L; ++l) out[l] = link_rate_nats(net, covs, l, role);
  return out;
}

/// Weighted sum-rate sum_l w_l * rate_l in nats.
inline double weighted_sum_rate(const Network& net, const std::vector<CMat>& covs,
                                Role role = Role::forward) {
  double f = 0.0;
  for (int l = 0; l < net.L; ++l)
    f += net.weights[l] * link_rate_nats(net, covs, l, role);
  return f;
}

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

}  // namespace netopt
