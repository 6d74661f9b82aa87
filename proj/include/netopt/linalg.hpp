// Dense complex linear-algebra helpers shared by the whole library:
// Hermitian symmetrization, PSD tests with a relative tolerance, matrix
// square roots via eigendecomposition, stable log-determinants, canonical
// (deterministic) eigendecompositions, and thin SVDs with relative rank
// truncation.  All matrices are Eigen dynamic-size complex<double>.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace netopt {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Relative PSD acceptance tolerance: min eigenvalue >= -kPsdTol*(1+max eigenvalue).
inline constexpr double kPsdTol = 1e-9;
/// Relative rank tolerance for SVD/eigenvalue truncation.
inline constexpr double kRankTol = 1e-12;
/// Eigenvalue floor for matrix square roots, relative to the trace.
inline constexpr double kSqrtFloor = 1e-14;

/// (X + X^H)/2 — apply after arithmetic chains to remove Hermitian drift.
inline CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

/// Real eigenvalues of a Hermitian matrix, ascending.
inline RVec hermitian_eigenvalues(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// PSD test with the library-wide relative tolerance.
inline bool is_psd(const CMat& x, double tol = kPsdTol) {
  if (x.rows() != x.cols()) return false;
  if (x.rows() == 0) return true;
  RVec ev = hermitian_eigenvalues(x);
  return ev(0) >= -tol * (1.0 + std::max(0.0, ev(ev.size() - 1)));
}

/// Hermitian square root X^{1/2} with eigenvalue floor 1e-14*trace(X).
/// Negative/tiny eigenvalues are clamped to the floor (or zero when the
/// trace itself is nonpositive), so the result is always PSD.
inline CMat psd_sqrt(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x));
  const double floor_v = std::max(0.0, kSqrtFloor * es.eigenvalues().sum());
  RVec d = es.eigenvalues().cwiseMax(floor_v).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Hermitian inverse square root X^{-1/2} with the same eigenvalue floor.
inline CMat psd_inv_sqrt(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x));
  double floor_v = kSqrtFloor * es.eigenvalues().sum();
  if (floor_v <= 0.0)
    throw std::domain_error("psd_inv_sqrt: matrix is not positive definite");
  RVec d = es.eigenvalues().cwiseMax(floor_v);
  d = d.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// log det of a Hermitian positive definite matrix via Cholesky (natural log).
inline double logdet_pd(const CMat& x) {
  Eigen::LLT<CMat> llt(hermitize(x));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("logdet_pd: matrix is not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    s += std::log(llt.matrixL()(i, i).real());
  return 2.0 * s;
}

/// log det(I + H Sigma H^H Omega^{-1}) evaluated stably: Cholesky-whiten by
/// Omega, then logdet of the (Hermitian PSD) whitened Gram plus identity.
inline double logdet_rate(const CMat& h, const CMat& sigma, const CMat& omega) {
  if (h.size() == 0 || sigma.size() == 0) return 0.0;
  Eigen::LLT<CMat> llt(hermitize(omega));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("logdet_rate: interference covariance not PD");
  // W = L^{-1} H, rate = log det(I + W Sigma W^H).
  CMat w = llt.matrixL().solve(h);
  CMat m = CMat::Identity(h.rows(), h.rows()) + w * hermitize(sigma) * w.adjoint();
  return logdet_pd(m);
}

/// Rotate a vector so its largest-magnitude entry is real positive; ties are
/// broken toward the lowest index so the result is deterministic.
inline CVec normalize_phase(const CVec& v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = std::abs(v(i));
    if (m > best_mag * (1.0 + 1e-15)) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag <= 0.0) return v;
  cxd phase = v(best) / best_mag;
  return v * std::conj(phase);
}

/// One eigenpair of the canonical decomposition.
struct EigenPair {
  double value = 0.0;
  CVec vector;
};

/// Canonical eigendecomposition of a Hermitian PSD matrix: eigenvalues
/// descending, each eigenvector phase-normalized (largest-magnitude entry
/// real positive), eigenvalues below `drop_tol_rel`*trace dropped.
/// Throws if the matrix is not PSD within the library tolerance.
inline std::vector<EigenPair> canonical_eig(const CMat& x,
                                            double drop_tol_rel = kRankTol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x));
  const RVec& ev = es.eigenvalues();
  const double trace = std::max(0.0, ev.sum());
  if (ev.size() > 0 && ev(0) < -kPsdTol * (1.0 + std::max(0.0, ev(ev.size() - 1))))
    throw std::domain_error("canonical_eig: matrix is not PSD");
  std::vector<EigenPair> out;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {  // descending order
    if (ev(i) <= drop_tol_rel * trace || ev(i) <= 0.0) continue;
    out.push_back({ev(i), normalize_phase(es.eigenvectors().col(i))});
  }
  return out;
}

/// Thin SVD with singular values below `tol_rel`*sigma_max truncated.
struct ThinSvd {
  CMat u;       // left factor, columns orthonormal
  RVec s;       // singular values, descending, all > truncation threshold
  CMat v;       // right factor, columns orthonormal
  int rank = 0;
};

inline ThinSvd thin_svd(const CMat& x, double tol_rel = kRankTol) {
  ThinSvd out;
  if (x.size() == 0) {
    out.u = CMat(x.rows(), 0);
    out.s = RVec(0);
    out.v = CMat(x.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  const double cut = s.size() > 0 ? tol_rel * s(0) : 0.0;
  int r = 0;
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  out.rank = r;
  out.u = svd.matrixU().leftCols(r);
  out.s = s.head(r);
  out.v = svd.matrixV().leftCols(r);
  return out;
}

/// Frobenius distance ||a - b||_F.
inline double frob_dist(const CMat& a, const CMat& b) { return (a - b).norm(); }

/// Sum of traces (real parts) of a list of square complex matrices.
inline double trace_sum(const std::vector<CMat>& ms) {
  double s = 0.0;
  for (const CMat& m : ms) s += m.trace().real();
  return s;
}

}  // namespace netopt
