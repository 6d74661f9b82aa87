// Stream-level machinery: covariance decomposition into rank-one beams,
// MMSE receivers under successive cancellation, the cross-talk matrix,
// forward/reverse per-stream SINRs, and the SINR-duality reverse power
// allocation (dense linear solve, plus the sequential link-by-link solve
// available on iTree-indexed networks).
//
// Conventions.  Within a link the m-th stream is the m-th to be decoded and
// cancelled in the forward direction; the reverse direction decodes in the
// opposite order.  Streams are indexed globally by (link, stream) in block
// order, so the cross-talk row/column index of stream (l, m) is offset(l)+m.
// Gains are |r^H H_{l,l} t|^2; per-stream noise terms are r^H W_l r
// (forward) and t^H What_l t (reverse), both 1 in the white sum-power case
// since the vectors are unit norm.

#pragma once

#include <stdexcept>
#include <vector>

#include "netopt/itree.hpp"
#include "netopt/rates.hpp"

namespace netopt {

enum class DecompMode { eigen, orthostream };

/// Streams of one link.
struct LinkStreams {
  std::vector<CVec> t;       // unit-norm transmit vectors
  std::vector<double> p;     // forward powers
  std::vector<CVec> r;       // unit-norm receive vectors (after receivers)
  std::vector<double> q;     // reverse powers (after a duality solve)
  std::vector<double> gain;  // |r^H H t|^2 per stream
  std::vector<double> sinr;  // forward SINR per stream (with receivers)
  std::vector<double> fwd_noise;  // r^H W r per stream
  std::vector<double> rev_noise;  // t^H What t per stream
  int count() const { return static_cast<int>(t.size()); }
};

struct StreamDecomposition {
  std::vector<LinkStreams> link;
  /// Global index of stream (l, 0) in block order.
  int offset(int l) const {
    int s = 0;
    for (int i = 0; i < l; ++i) s += link[i].count();
    return s;
  }
  int total() const {
    int s = 0;
    for (const auto& ls : link) s += ls.count();
    return s;
  }
};

/// Decompose one PSD covariance into unit beams and powers.
///
/// mode=eigen: canonical eigendecomposition (descending eigenvalues,
/// phase-normalized vectors, eigenvalues below 1e-12*trace dropped).
/// mode=orthostream: decorrelating precoder — beams chosen so the received
/// streams H t_m are mutually orthogonal, built from the thin SVD of
/// H Sigma^{1/2}; any channel-invisible remainder of Sigma is appended as
/// eigen beams so the reconstruction stays exact.
inline LinkStreams decompose(const CMat& sigma, DecompMode mode = DecompMode::eigen,
                             const CMat* h_direct = nullptr) {
  LinkStreams out;
  if (mode == DecompMode::eigen || h_direct == nullptr) {
    for (const auto& pr : canonical_eig(sigma)) {
      out.t.push_back(pr.vector);
      out.p.push_back(pr.value);
    }
    return out;
  }
  const double trace = std::max(0.0, sigma.trace().real());
  if (trace <= 0.0) return out;
  CMat root = psd_sqrt(sigma);
  ThinSvd svd = thin_svd((*h_direct) * root);
  for (int i = 0; i < svd.rank; ++i) {
    CVec beam = root * svd.v.col(i);  // received beams H*t are orthogonal
    double p = beam.squaredNorm();
    if (p <= kRankTol * trace) continue;
    out.t.push_back(normalize_phase(beam / std::sqrt(p)));
    out.p.push_back(p);
  }
  CMat rebuilt = CMat::Zero(sigma.rows(), sigma.cols());
  for (int m = 0; m < out.count(); ++m)
    rebuilt += out.p[m] * out.t[m] * out.t[m].adjoint();
  CMat rest = hermitize(sigma - rebuilt);
  if (rest.trace().real() > 1e-11 * (1.0 + trace)) {
    for (const auto& pr : canonical_eig(rest)) {
      out.t.push_back(pr.vector);
      out.p.push_back(pr.value);
    }
  }
  return out;
}

/// Decompose every link of a forward covariance set.
inline StreamDecomposition decompose_all(const Network& net,
                                         const std::vector<CMat>& covs,
                                         DecompMode mode = DecompMode::eigen) {
  StreamDecomposition out;
  out.link.resize(net.L);
  for (int l = 0; l < net.L; ++l)
    out.link[l] = decompose(covs[l], mode, &net.H[l][l]);
  return out;
}

/// MMSE receivers under successive decoding for link l: stream m is decoded
/// m-th, so its filter whitens streams i > m of its own link plus the
/// coupled interference and noise.  Fills r, gain, sinr, fwd_noise,
/// rev_noise for the link.
inline void mmse_sic_receivers(const Network& net, const std::vector<CMat>& covs,
                               StreamDecomposition& decomp, int l) {
  LinkStreams& ls = decomp.link[l];
  const CMat& h = net.H[l][l];
  CMat omega = interference_covariance(net, covs, l, Role::forward);
  const CMat w = net.noise(l);
  const CMat what = net.constraint(l);
  const int m_count = ls.count();
  ls.r.resize(m_count);
  ls.gain.resize(m_count);
  ls.sinr.resize(m_count);
  ls.fwd_noise.resize(m_count);
  ls.rev_noise.resize(m_count);
  for (int m = 0; m < m_count; ++m) {
    CMat seen = omega;
    for (int i = m + 1; i < m_count; ++i) {
      CVec ht = h * ls.t[i];
      seen += ls.p[i] * ht * ht.adjoint();
    }
    seen = hermitize(seen);
    CVec r = seen.llt().solve(h * ls.t[m]);
    double nrm = r.norm();
    if (nrm > 0.0) r /= nrm;
    ls.r[m] = normalize_phase(r);
    ls.gain[m] = std::norm(ls.r[m].dot(h * ls.t[m]));  // |r^H H t|^2
    double denom = (ls.r[m].adjoint() * seen * ls.r[m]).value().real();
    ls.sinr[m] = denom > 0.0 ? ls.p[m] * ls.gain[m] / denom : 0.0;
    ls.fwd_noise[m] = (ls.r[m].adjoint() * w * ls.r[m]).value().real();
    ls.rev_noise[m] = (ls.t[m].adjoint() * what * ls.t[m]).value().real();
  }
}

/// Decompose all links and compute all receivers in one call.
inline StreamDecomposition build_streams(const Network& net,
                                         const std::vector<CMat>& covs,
                                         DecompMode mode = DecompMode::eigen) {
  StreamDecomposition decomp = decompose_all(net, covs, mode);
  for (int l = 0; l < net.L; ++l) mmse_sic_receivers(net, covs, decomp, l);
  return decomp;
}

/// Cross-talk matrix over global stream indices: entry (row (l,m), col (k,n))
/// is the power gain from stream (k,n) into the receiver of stream (l,m):
/// zero within a link when m >= n (own stream or already cancelled),
/// |r^H H_{l,l} t|^2 within a link for m < n, and phi-gated
/// |r^H H_{l,k} t|^2 across links.
inline Eigen::MatrixXd crosstalk(const Network& net,
                                 const StreamDecomposition& decomp) {
  const int s = decomp.total();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(s, s);
  for (int l = 0; l < net.L; ++l) {
    const LinkStreams& dst = decomp.link[l];
    const int off_l = decomp.offset(l);
    for (int k = 0; k < net.L; ++k) {
      if (k != l && net.phi(l, k) != 1) continue;
      const LinkStreams& src = decomp.link[k];
      const int off_k = decomp.offset(k);
      for (int m = 0; m < dst.count(); ++m)
        for (int n = 0; n < src.count(); ++n) {
          if (k == l && m >= n) continue;
          psi(off_l + m, off_k + n) =
              std::norm(dst.r[m].dot(net.H[l][k] * src.t[n]));
        }
    }
  }
  return psi;
}

/// Forward SINR of stream (l, m) from the cross-talk matrix:
/// gamma = p * gain / (noise + sum_{k,n} p_{k,n} * psi[(l,m), (k,n)]).
inline double forward_sinr(const StreamDecomposition& decomp,
                           const Eigen::MatrixXd& psi, int l, int m) {
  const LinkStreams& ls = decomp.link[l];
  double denom = ls.fwd_noise[m];
  int col = 0;
  for (const auto& src : decomp.link)
    for (int n = 0; n < src.count(); ++n, ++col)
      denom += src.p[n] * psi(decomp.offset(l) + m, col);
  return ls.p[m] * ls.gain[m] / denom;
}

/// Reverse SINR of stream (l, m): reverse transmit vectors are the r's with
/// powers q, reverse receive vectors the t's, and the cross-talk matrix is
/// read with transposed indices (the reverse intra-link decode order is the
/// opposite of the forward order, which the zero pattern already encodes).
inline double reverse_sinr(const StreamDecomposition& decomp,
                           const Eigen::MatrixXd& psi, int l, int m) {
  const LinkStreams& ls = decomp.link[l];
  double denom = ls.rev_noise[m];
  int row = 0;
  for (const auto& src : decomp.link)
    for (int n = 0; n < src.count(); ++n, ++row)
      denom += src.q[n] * psi(row, decomp.offset(l) + m);
  return ls.q[m] * ls.gain[m] / denom;
}

/// All forward SINRs in global stream order (from the stored receiver pass).
inline std::vector<double> forward_sinrs(const StreamDecomposition& decomp) {
  std::vector<double> out;
  out.reserve(decomp.total());
  for (const auto& ls : decomp.link)
    for (int m = 0; m < ls.count(); ++m) out.push_back(ls.sinr[m]);
  return out;
}

/// Reverse powers achieving the target SINRs gamma0 in the reverse direction:
/// solve (D^{-1} - Psi^T) q = b where D = diag(gamma0/gain) and b holds the
/// per-stream reverse noise terms (all ones in the white sum-power case).
///
/// LU with partial pivoting; the residual must satisfy
/// ||(D^{-1}-Psi^T)q - b||_inf <= 1e-8.  Components below -1e-9 are an
/// infeasibility error; values in [-1e-9, 0] clamp to zero.  The q's are
/// written back into the decomposition and also returned flat.
inline std::vector<double> duality_powers(StreamDecomposition& decomp,
                                          const Eigen::MatrixXd& psi,
                                          const std::vector<double>& gamma0) {
  const int s = decomp.total();
  Eigen::VectorXd dinv(s), b(s);
  int idx = 0;
  for (const auto& ls : decomp.link)
    for (int m = 0; m < ls.count(); ++m, ++idx) {
      if (!(ls.gain[m] > 0.0))
        throw std::domain_error(
            "duality_powers: stream with positive power but zero gain");
      dinv(idx) = ls.gain[m] / std::max(gamma0[idx], 1e-300);
      b(idx) = ls.rev_noise[m];
    }
  Eigen::MatrixXd a = -psi.transpose();
  a.diagonal() += dinv;
  Eigen::VectorXd q = a.partialPivLu().solve(b);
  double resid = (a * q - b).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-8))
    throw std::domain_error("duality_powers: linear solve residual too large");
  for (int i = 0; i < s; ++i) {
    if (q(i) < -1e-9)
      throw std::domain_error("duality_powers: negative reverse power");
    if (q(i) < 0.0) q(i) = 0.0;
  }
  idx = 0;
  std::vector<double> out(s);
  for (auto& ls : decomp.link) {
    ls.q.resize(ls.count());
    for (int m = 0; m < ls.count(); ++m, ++idx) {
      ls.q[m] = q(idx);
      out[idx] = q(idx);
    }
  }
  return out;
}

/// Sequential reverse-power solve for iTree-indexed networks.  Links are
/// processed along l_order (perm[pos] = link index) under which the
/// relabeled coupling must be iTree, so every reverse interferer of a link
/// is processed before it.  Within a link the powers cascade:
///   q_m = sinr_m * (t_m^H OmegaHat_l t_m
///                   + sum_{n<m} q_n |t_m^H H^H r_n|^2) / gain_m,
/// with OmegaHat_l assembled from already-solved reverse covariances.
/// Requires receivers (and their stored SINRs); matches duality_powers.
inline std::vector<double> duality_powers_sequential(StreamDecomposition& decomp,
                                                     const Network& net,
                                                     const std::vector<int>& l_order) {
  if (static_cast<int>(l_order.size()) != net.L)
    throw std::invalid_argument("duality_powers_sequential: bad permutation");
  if (!is_itree_indexed(permute_phi(net.phi, l_order)))
    throw std::invalid_argument(
        "duality_powers_sequential: coupling is not iTree under this order");
  std::vector<CMat> sigma_hat(net.L);
  std::vector<bool> done(net.L, false);
  for (int pos = 0; pos < net.L; ++pos) {
    const int l = l_order[pos];
    LinkStreams& ls = decomp.link[l];
    CMat omega_hat = net.constraint(l);
    for (int k = 0; k < net.L; ++k)
      if (net.phi(k, l) == 1) {
        if (!done[k])
          throw std::logic_error("duality_powers_sequential: order violated");
        omega_hat += net.H[k][l].adjoint() * sigma_hat[k] * net.H[k][l];
      }
    omega_hat = hermitize(omega_hat);
    const CMat& h = net.H[l][l];
    ls.q.assign(ls.count(), 0.0);
    CMat sh = CMat::Zero(net.nr[l], net.nr[l]);
    for (int m = 0; m < ls.count(); ++m) {
      if (!(ls.gain[m] > 0.0))
        throw std::domain_error(
            "duality_powers_sequential: stream with zero gain");
      double num = (ls.t[m].adjoint() * omega_hat * ls.t[m]).value().real();
      for (int n = 0; n < m; ++n)
        num += ls.q[n] * std::norm(ls.t[m].dot(h.adjoint() * ls.r[n]));
      ls.q[m] = ls.sinr[m] * num / ls.gain[m];
      sh += ls.q[m] * ls.r[m] * ls.r[m].adjoint();
    }
    sigma_hat[l] = hermitize(sh);
    done[l] = true;
  }
  std::vector<double> out;
  out.reserve(decomp.total());
  for (const auto& ls : decomp.link)
    for (int m = 0; m < ls.count(); ++m) out.push_back(ls.q[m]);
  return out;
}

/// Total forward power sum_l sum_m p and reverse power sum_l sum_m q.
inline double total_p(const StreamDecomposition& decomp) {
  double s = 0.0;
  for (const auto& ls : decomp.link)
    for (double v : ls.p) s += v;
  return s;
}
inline double total_q(const StreamDecomposition& decomp) {
  double s = 0.0;
  for (const auto& ls : decomp.link)
    for (double v : ls.q) s += v;
  return s;
}

}  // namespace netopt
