// Forward/reverse rate duality: the covariance transformation (MMSE-SIC
// receivers + SINR-duality powers), its closed form at polite water-filling
// points, the matrix-equation diagnostic, the flipped-channel transformation
// for sequentially solvable (iTree) networks, and dual-network construction
// under a linear constraint and colored noise.

#pragma once

#include <utility>
#include <vector>

#include "netopt/streams.hpp"

namespace netopt {

struct TransformReport {
  std::vector<CMat> reverse_covs;     // SigmaHat per link
  std::vector<double> forward_rates;  // nats
  std::vector<double> reverse_rates;  // nats
  /// Generalized powers: in = sum Tr(Sigma_l What_l), out = sum
  /// Tr(SigmaHat_l W_l); plain traces in the white sum-power case, where
  /// they are equal to 1e-9 relative.  Reverse rates dominate forward rates.
  double power_in = 0.0;
  double power_out = 0.0;
  /// Per-link equivalent powers (Tr Q_l, Tr QHat_l) with
  /// Q_l = OmegaHat^{1/2} Sigma OmegaHat^{1/2}, QHat_l = Omega^{1/2}
  /// SigmaHat Omega^{1/2}; equal link-by-link.
  std::vector<std::pair<double, double>> equiv_power;
  StreamDecomposition streams;  // t, p, r, q, per-stream SINRs
};

/// The covariance transformation: decompose each forward covariance
/// (canonical eigen beams by default), attach MMSE-SIC receivers, solve the
/// SINR-duality system for reverse powers, and assemble
/// SigmaHat_l = sum_m q_{l,m} r_{l,m} r_{l,m}^H.
/// Throws when the duality solve is infeasible.
inline TransformReport covariance_transform(const Network& net,
                                            const std::vector<CMat>& covs,
                                            DecompMode mode = DecompMode::eigen) {
  TransformReport rep;
  rep.streams = build_streams(net, covs, mode);
  Eigen::MatrixXd psi = crosstalk(net, rep.streams);
  std::vector<double> gamma0 = forward_sinrs(rep.streams);
  duality_powers(rep.streams, psi, gamma0);
  rep.reverse_covs.resize(net.L);
  for (int l = 0; l < net.L; ++l) {
    const LinkStreams& ls = rep.streams.link[l];
    CMat sh = CMat::Zero(net.nr[l], net.nr[l]);
    for (int m = 0; m < ls.count(); ++m)
      sh += ls.q[m] * ls.r[m] * ls.r[m].adjoint();
    rep.reverse_covs[l] = hermitize(sh);
  }
  rep.forward_rates = all_rates_nats(net, covs, Role::forward);
  rep.reverse_rates = all_rates_nats(net, rep.reverse_covs, Role::reverse);
  rep.power_in = rep.power_out = 0.0;
  rep.equiv_power.resize(net.L);
  for (int l = 0; l < net.L; ++l) {
    rep.power_in += (covs[l] * net.constraint(l)).trace().real();
    rep.power_out += (rep.reverse_covs[l] * net.noise(l)).trace().real();
    CMat omega = interference_covariance(net, covs, l, Role::forward);
    CMat omega_hat =
        interference_covariance(net, rep.reverse_covs, l, Role::reverse);
    rep.equiv_power[l] = {(covs[l] * omega_hat).trace().real(),
                          (rep.reverse_covs[l] * omega).trace().real()};
  }
  return rep;
}

/// Closed-form dual covariances at polite water-filling points with water
/// levels nu_l:  SigmaHat_l = nu_l (Omega_l^{-1} - (H Sigma H^H + Omega_l)^{-1}).
inline std::vector<CMat> explicit_dual(const Network& net,
                                       const std::vector<CMat>& covs,
                                       const std::vector<double>& levels) {
  std::vector<CMat> out(net.L);
  for (int l = 0; l < net.L; ++l) {
    CMat omega = interference_covariance(net, covs, l, Role::forward);
    const CMat& h = net.H[l][l];
    CMat eye = CMat::Identity(net.nr[l], net.nr[l]);
    CMat inv_omega = omega.llt().solve(eye);
    CMat inv_full = hermitize(omega + h * covs[l] * h.adjoint()).llt().solve(eye);
    out[l] = hermitize(levels[l] * (inv_omega - inv_full));
  }
  return out;
}

/// Per-link Frobenius residual of the fixed-point matrix equation
/// OmegaHat^{-1} H^H SigmaHat H = Sigma H^H Omega^{-1} H, which holds exactly
/// when the pair has polite water-filling structure.
inline std::vector<double> check_matrix_equation(const Network& net,
                                                 const std::vector<CMat>& covs,
                                                 const std::vector<CMat>& duals) {
  std::vector<double> out(net.L);
  for (int l = 0; l < net.L; ++l) {
    CMat omega = interference_covariance(net, covs, l, Role::forward);
    CMat omega_hat = interference_covariance(net, duals, l, Role::reverse);
    const CMat& h = net.H[l][l];
    CMat lhs = omega_hat.llt().solve(h.adjoint() * duals[l] * h);
    CMat rhs = covs[l] * h.adjoint() * omega.llt().solve(h);
    out[l] = (lhs - rhs).norm();
  }
  return out;
}

/// Flipped-channel transformation
///   SigmaHat_l = Omega^{-1/2} F G^H OmegaHat^{1/2} Sigma OmegaHat^{1/2}
///                G F^H Omega^{-1/2}
/// with F, G from the thin SVD of Omega^{-1/2} H OmegaHat^{-1/2}.  OmegaHat
/// depends on already-transformed links, so the computation is sequential and
/// requires an iTree order (perm[pos] = link index).  Agrees with
/// covariance_transform on boundary points; differs at interior points.
inline std::vector<CMat> macbc_flipped_transform(const Network& net,
                                                 const std::vector<CMat>& covs,
                                                 const std::vector<int>& l_order) {
  if (static_cast<int>(l_order.size()) != net.L)
    throw std::invalid_argument("macbc_flipped_transform: bad permutation");
  if (!is_itree_indexed(permute_phi(net.phi, l_order)))
    throw std::invalid_argument(
        "macbc_flipped_transform: coupling is not iTree under this order");
  std::vector<CMat> duals(net.L);
  std::vector<bool> done(net.L, false);
  for (int pos = 0; pos < net.L; ++pos) {
    const int l = l_order[pos];
    CMat omega_hat = net.constraint(l);
    for (int k = 0; k < net.L; ++k)
      if (net.phi(k, l) == 1) {
        if (!done[k])
          throw std::logic_error("macbc_flipped_transform: order violated");
        omega_hat += net.H[k][l].adjoint() * duals[k] * net.H[k][l];
      }
    omega_hat = hermitize(omega_hat);
    CMat omega = interference_covariance(net, covs, l, Role::forward);
    CMat om_is = psd_inv_sqrt(omega);
    CMat oh_is = psd_inv_sqrt(omega_hat);
    CMat oh_s = psd_sqrt(omega_hat);
    ThinSvd svd = thin_svd(om_is * net.H[l][l] * oh_is);
    CMat rot = om_is * svd.u * svd.v.adjoint() * oh_s;  // Omega^{-1/2} F G^H OmegaHat^{1/2}
    duals[l] = hermitize(rot * covs[l] * rot.adjoint());
    done[l] = true;
  }
  return duals;
}

/// Dual network under a single linear constraint and colored noise: channels
/// conjugate-transposed, constraint built from the forward noise covariances
/// and vice versa.  Validates the input first; composing with whiten() gives
/// the canonical dual.
inline Network dual_network(const Network& net) {
  auto problems = validate_network(net);
  if (!problems.empty())
    throw std::invalid_argument("dual_network: " + problems.front());
  return reverse_network(net);
}

/// Per-stream water-level estimates nu = q p (1+gamma) gain / gamma^2; at a
/// converged polite water-filling point these are constant across the
/// streams of a link and equal the link's water level.
inline std::vector<double> stream_levels(const LinkStreams& ls) {
  std::vector<double> out;
  for (int m = 0; m < ls.count(); ++m) {
    double g = ls.sinr[m];
    out.push_back(g > 0.0 ? ls.q[m] * ls.p[m] * (1.0 + g) * ls.gain[m] / (g * g)
                          : 0.0);
  }
  return out;
}

}  // namespace netopt
