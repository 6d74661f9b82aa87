// Polite water-filling: pre/post-whitened channel construction, thin SVD,
// water-filling at a fixed level, the multi-link water-level solve under a
// power budget with per-mode power costs (exact active-set elimination),
// structure verification, and KKT residual evaluation for the weighted
// sum-rate problem.

#pragma once

#include <stdexcept>
#include <vector>

#include "netopt/rates.hpp"

namespace netopt {

/// Whitened direct channel Hbar = Omega^{-1/2} H OmegaHat^{-1/2} with its thin
/// SVD F diag(delta) G^H retained to numerical rank.  The two inverse square
/// roots are cached for covariance reconstruction.
struct WhitenedChannel {
  CMat hbar;
  CMat f, g;   // thin unitary factors, `rank` columns each
  RVec delta;  // positive singular values, descending
  int rank = 0;
  CMat omega_inv_sqrt;
  CMat omega_hat_inv_sqrt;
};

inline WhitenedChannel whiten_channel(const CMat& h, const CMat& omega,
                                      const CMat& omega_hat) {
  WhitenedChannel wc;
  wc.omega_inv_sqrt = psd_inv_sqrt(omega);
  wc.omega_hat_inv_sqrt = psd_inv_sqrt(omega_hat);
  wc.hbar = wc.omega_inv_sqrt * h * wc.omega_hat_inv_sqrt;
  ThinSvd svd = thin_svd(wc.hbar);
  wc.f = svd.u;
  wc.g = svd.v;
  wc.delta = svd.s;
  wc.rank = svd.rank;
  return wc;
}

/// Water-filling output: eigenmode powers d_i = (nu - 1/delta_i^2)^+, the
/// water level used, the reconstructed transmit covariance
/// Sigma = OmegaHat^{-1/2} G D G^H OmegaHat^{-1/2}, and the per-mode power
/// costs rho_i = ||i-th column of OmegaHat^{-1/2} G||^2 (so that
/// Tr(Sigma) = sum_i rho_i d_i).
struct WaterfillResult {
  RVec d;
  double level = 0.0;
  CMat sigma;
  RVec rho;
};

/// Power cost of each whitened eigenmode in the forward direction.
inline RVec forward_costs(const WhitenedChannel& wc) {
  RVec rho(wc.rank);
  for (int i = 0; i < wc.rank; ++i)
    rho(i) = (wc.omega_hat_inv_sqrt * wc.g.col(i)).squaredNorm();
  return rho;
}

/// Power cost of each eigenmode in the reverse direction (dual covariance
/// built from F through Omega^{-1/2}).
inline RVec reverse_costs(const WhitenedChannel& wc) {
  RVec rho(wc.rank);
  for (int i = 0; i < wc.rank; ++i)
    rho(i) = (wc.omega_inv_sqrt * wc.f.col(i)).squaredNorm();
  return rho;
}

/// Assemble Sigma = OmegaHat^{-1/2} G D G^H OmegaHat^{-1/2}.
inline CMat forward_sigma(const WhitenedChannel& wc, const RVec& d) {
  CMat gd = wc.omega_hat_inv_sqrt * wc.g;
  return hermitize(gd * d.asDiagonal() * gd.adjoint());
}

/// Assemble the dual SigmaHat = Omega^{-1/2} F D F^H Omega^{-1/2} (same D).
inline CMat reverse_sigma(const WhitenedChannel& wc, const RVec& d) {
  CMat fd = wc.omega_inv_sqrt * wc.f;
  return hermitize(fd * d.asDiagonal() * fd.adjoint());
}

inline WaterfillResult waterfill_at_level(const WhitenedChannel& wc, double nu) {
  WaterfillResult out;
  out.level = nu;
  out.d = RVec::Zero(wc.rank);
  for (int i = 0; i < wc.rank; ++i) {
    double inv_gain = 1.0 / (wc.delta(i) * wc.delta(i));
    out.d(i) = std::max(0.0, nu - inv_gain);
  }
  out.sigma = forward_sigma(wc, out.d);
  out.rho = forward_costs(wc);
  return out;
}

struct LevelSolution {
  double mu = 0.0;
  std::vector<WaterfillResult> links;  // level_l = w_l / mu
};

/// Water levels across links under the budget sum_l sum_i rho_{l,i} d_{l,i}
/// = budget with d_{l,i} = (w_l/mu - 1/delta_{l,i}^2)^+.  Exact active-set
/// elimination: all modes start active, mu is closed-form over the active
/// set, modes whose unclamped power goes negative are removed, repeat until
/// stable.  Throws when every channel has rank zero.
inline LevelSolution solve_level_multi(const std::vector<WhitenedChannel>& channels,
                                       const std::vector<double>& weights,
                                       const std::vector<RVec>& rhos,
                                       double budget) {
  const int L = static_cast<int>(channels.size());
  if (!(budget > 0.0))
    throw std::invalid_argument("solve_level_multi: budget must be positive");
  std::vector<std::vector<bool>> active(L);
  bool any = false;
  for (int l = 0; l < L; ++l) {
    active[l].assign(channels[l].rank, true);
    if (channels[l].rank > 0) any = true;
  }
  if (!any)
    throw std::domain_error("solve_level_multi: every channel has rank zero");
  double mu = 0.0;
  for (bool removed = true; removed;) {
    removed = false;
    double num = 0.0, den = budget;
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < channels[l].rank; ++i)
        if (active[l][i]) {
          double inv_gain = 1.0 / (channels[l].delta(i) * channels[l].delta(i));
          num += rhos[l](i) * weights[l];
          den += rhos[l](i) * inv_gain;
        }
    if (!(num > 0.0))
      throw std::domain_error("solve_level_multi: no mode with positive weight");
    mu = num / den;
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < channels[l].rank; ++i)
        if (active[l][i]) {
          double inv_gain = 1.0 / (channels[l].delta(i) * channels[l].delta(i));
          if (weights[l] / mu - inv_gain < 0.0) {
            active[l][i] = false;
            removed = true;
          }
        }
  }
  LevelSolution out;
  out.mu = mu;
  out.links.resize(L);
  for (int l = 0; l < L; ++l) {
    WaterfillResult& wr = out.links[l];
    wr.level = weights[l] / mu;
    wr.rho = rhos[l];
    wr.d = RVec::Zero(channels[l].rank);
    for (int i = 0; i < channels[l].rank; ++i)
      if (active[l][i]) {
        double inv_gain = 1.0 / (channels[l].delta(i) * channels[l].delta(i));
        wr.d(i) = std::max(0.0, wr.level - inv_gain);
      }
    wr.sigma = forward_sigma(channels[l], wr.d);
  }
  return out;
}

/// Structure verification of one forward/reverse pair.
struct StructureCheck {
  bool is_pwf = false;
  double level = 0.0;      // fitted water level (0 when no active mode)
  double residual = 0.0;   // ||Q - G D G^H||_F
  double dual_residual = 0.0;  // ||QHat - F D F^H||_F
};

/// Check whether each link's equivalent covariance Q = OmegaHat^{1/2} Sigma
/// OmegaHat^{1/2} water-fills its whitened channel: fit a single level nu
/// from the active diagonal of G^H Q G, rebuild D = (nu - Delta^{-2})^+, and
/// measure the Frobenius gaps of Q against G D G^H and of
/// QHat = Omega^{1/2} SigmaHat Omega^{1/2} against F D F^H.
inline std::vector<StructureCheck> check_structure(const Network& net,
                                                   const std::vector<CMat>& covs,
                                                   const std::vector<CMat>& duals,
                                                   double tol = 1e-6) {
  std::vector<StructureCheck> out(net.L);
  for (int l = 0; l < net.L; ++l) {
    CMat omega = interference_covariance(net, covs, l, Role::forward);
    CMat omega_hat = interference_covariance(net, duals, l, Role::reverse);
    WhitenedChannel wc = whiten_channel(net.H[l][l], omega, omega_hat);
    CMat oh_s = psd_sqrt(omega_hat);
    CMat om_s = psd_sqrt(omega);
    CMat q = hermitize(oh_s * covs[l] * oh_s);
    CMat qhat = hermitize(om_s * duals[l] * om_s);
    StructureCheck& sc = out[l];
    RVec dhat = (wc.g.adjoint() * q * wc.g).diagonal().real();
    const double act_tol = 1e-9 * (1.0 + q.norm());
    int n_active = 0;
    double level = 0.0;
    for (int i = 0; i < wc.rank; ++i)
      if (dhat(i) > act_tol) {
        level += dhat(i) + 1.0 / (wc.delta(i) * wc.delta(i));
        ++n_active;
      }
    sc.level = n_active > 0 ? level / n_active : 0.0;
    RVec d_model = RVec::Zero(wc.rank);
    for (int i = 0; i < wc.rank; ++i)
      d_model(i) = std::max(0.0, sc.level - 1.0 / (wc.delta(i) * wc.delta(i)));
    sc.residual = (q - wc.g * d_model.asDiagonal() * wc.g.adjoint()).norm();
    sc.dual_residual =
        (qhat - wc.f * d_model.asDiagonal() * wc.f.adjoint()).norm();
    sc.is_pwf = sc.residual <= tol * (1.0 + q.norm()) &&
                sc.dual_residual <= tol * (1.0 + qhat.norm());
  }
  return out;
}

/// Gradient of the weighted sum-rate with respect to Sigma_l (the
/// multiplier-free part): own-rate term minus the rate loss caused to the
/// links this one interferes.
inline std::vector<CMat> wsr_gradient(const Network& net,
                                      const std::vector<CMat>& covs) {
  std::vector<CMat> omega(net.L), full_inv(net.L), omega_inv(net.L);
  for (int k = 0; k < net.L; ++k) {
    omega[k] = interference_covariance(net, covs, k, Role::forward);
    const CMat& h = net.H[k][k];
    CMat eye = CMat::Identity(net.nr[k], net.nr[k]);
    omega_inv[k] = omega[k].llt().solve(eye);
    full_inv[k] =
        hermitize(omega[k] + h * covs[k] * h.adjoint()).llt().solve(eye);
  }
  std::vector<CMat> grad(net.L);
  for (int l = 0; l < net.L; ++l) {
    CMat g = net.weights[l] * net.H[l][l].adjoint() * full_inv[l] * net.H[l][l];
    for (int k = 0; k < net.L; ++k)
      if (k != l && net.phi(k, l) == 1)
        g -= net.weights[k] * net.H[k][l].adjoint() *
             (omega_inv[k] - full_inv[k]) * net.H[k][l];
    grad[l] = hermitize(g);
  }
  return grad;
}

/// KKT diagnostics for the weighted sum-rate problem at covariances covs with
/// multiplier mu (estimated from the stationarity identity when negative):
/// per-link residual combines the gradient restricted to the range of
/// Sigma_l (complementary slackness) and the positive part of the gradient's
/// maximum eigenvalue (feasibility of the PSD slack), both relative to the
/// gradient scale; budget_gap is the relative linear-constraint violation.
struct KktReport {
  std::vector<double> link_residual;
  double budget_gap = 0.0;
  double mu = 0.0;
  double aggregate = 0.0;
};

inline KktReport kkt_report(const Network& net, const std::vector<CMat>& covs,
                            double mu = -1.0) {
  KktReport rep;
  std::vector<CMat> a = wsr_gradient(net, covs);
  if (mu < 0.0) {
    double num = 0.0, den = 0.0;
    for (int l = 0; l < net.L; ++l) {
      num += (covs[l] * a[l]).trace().real();
      den += (covs[l] * net.constraint(l)).trace().real();
    }
    mu = den > 0.0 ? num / den : 0.0;
  }
  rep.mu = mu;
  rep.link_residual.resize(net.L);
  double power = 0.0;
  for (int l = 0; l < net.L; ++l) {
    power += (covs[l] * net.constraint(l)).trace().real();
    CMat grad = hermitize(a[l] - mu * net.constraint(l));
    const double scale = 1.0 + grad.norm();
    // Range projector of Sigma_l.
    Eigen::SelfAdjointEigenSolver<CMat> es(covs[l]);
    const double ev_tol = 1e-8 * (1.0 + covs[l].trace().real());
    CMat range = CMat::Zero(covs[l].rows(), covs[l].cols());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > ev_tol)
        range += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    double stationarity = (grad * range).norm() / scale;
    RVec gev = hermitian_eigenvalues(grad);
    double feasibility = std::max(0.0, gev.maxCoeff()) / scale;
    rep.link_residual[l] = std::max(stationarity, feasibility);
    rep.aggregate = std::max(rep.aggregate, rep.link_residual[l]);
  }
  rep.budget_gap = std::abs(power - net.power) / net.power;
  rep.aggregate = std::max(rep.aggregate, rep.budget_gap);
  return rep;
}

inline double kkt_residual(const Network& net, const std::vector<CMat>& covs,
                           double mu = -1.0) {
  return kkt_report(net, covs, mu).aggregate;
}

}  // namespace netopt
