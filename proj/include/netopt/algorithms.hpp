// Weighted sum-rate maximization.  Two families share the polite
// water-filling core: the replicated-network algorithms (P and its
// line-search variant P1) for sequentially solvable couplings, which
// monotonically increase the objective by optimizing each link's own
// covariance across L shifted copies of the network, and the alternating
// algorithms (PT and PP) for arbitrary couplings, which interleave a joint
// forward water-filling with either a covariance transformation or a reverse
// water-filling.  A selfish water-filling baseline ignores the reverse
// whiteners entirely.  All runs report effective-iteration trajectories and
// KKT diagnostics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netopt/duality.hpp"
#include "netopt/itree.hpp"
#include "netopt/politewf.hpp"
#include "netopt/rng.hpp"

namespace netopt {

struct RunOpts {
  int max_iter = 200;
  double rel_tol = 1e-8;
  // When positive, convergence additionally requires the largest relative
  // per-link covariance step to stay below this bound for the same streak.
  // The objective plateaus an order of magnitude earlier than the iterates
  // settle (its curvature is flat at the top), so runs that feed converged
  // points into structural identities should set this.
  double cov_tol = 0.0;
  std::uint64_t seed = 0;  // drives restart initializations only
  int restarts = 3;        // extra attempts after a mid-run numerical failure
  std::vector<CMat> init_covs;   // optional initial forward covariances
  std::vector<CMat> init_duals;  // optional initial reverse covariances
};

struct TrajectoryPoint {
  double eff_iter = 0.0;
  double wsr = 0.0;  // nats
  double sum_power = 0.0;
  double kkt = 0.0;
};

/// Outcome of one algorithm run.  Effective iterations advance by 0.5 per
/// half-update: PT and PP change the forward covariances once per full
/// iteration, so their rates are emitted at 0.5, 1.5, 2.5, ...; the
/// replicated algorithms emit at 1.0, 2.0, ...; the selfish baseline
/// performs only forward half-updates and emits at 0.5, 1.0, 1.5, ...
struct RunReport {
  std::vector<TrajectoryPoint> trajectory;
  bool converged = false;
  int iterations = 0;  // updates completed in the final attempt
  int restarts_used = 0;
  std::vector<CMat> covs;   // final forward covariances
  std::vector<CMat> duals;  // final reverse covariances (empty for selfish)
  double wsr = 0.0;       // final weighted sum-rate, nats
  double best_wsr = 0.0;  // best emitted weighted sum-rate, nats
  double kkt = std::numeric_limits<double>::quiet_NaN();
  double mu = 0.0;  // final water-level multiplier (levels are w_l / mu)
};

/// Declares convergence once `needed` consecutive measurements change by
/// less than rel_tol in relative terms; a single large step resets the
/// streak, so a slow oscillation is not mistaken for a fixed point.
class ConvergenceDetector {
 public:
  explicit ConvergenceDetector(double rel_tol, int needed = 3)
      : rel_tol_(rel_tol), needed_(needed) {}

  bool update(double value) {
    if (have_last_) {
      double scale = std::max(std::abs(value), std::abs(last_));
      if (std::abs(value - last_) <= rel_tol_ * std::max(scale, 1e-300))
        ++streak_;
      else
        streak_ = 0;
    }
    last_ = value;
    have_last_ = true;
    return streak_ >= needed_;
  }

 private:
  double rel_tol_;
  int needed_;
  int streak_ = 0;
  double last_ = 0.0;
  bool have_last_ = false;
};

/// L x L grid of covariances for the replicated-network problem: entry
/// (i, l) is the covariance of link l in network copy i.  The k-th
/// covariance-set view and the grid are related by the circular map
/// view(k)[l] = sigma[(l - k) mod L][l], whose inverse assigns
/// sigma[i][l] = views[(l - i) mod L][l].
struct ReplicatedState {
  std::vector<std::vector<CMat>> sigma;

  int copies() const { return static_cast<int>(sigma.size()); }

  std::vector<CMat> view(int k) const {
    const int L = copies();
    std::vector<CMat> out(L);
    for (int l = 0; l < L; ++l) out[l] = sigma[((l - k) % L + L) % L][l];
    return out;
  }

  static ReplicatedState from_views(const std::vector<std::vector<CMat>>& views) {
    const int L = static_cast<int>(views.size());
    ReplicatedState st;
    st.sigma.assign(L, std::vector<CMat>(L));
    for (int i = 0; i < L; ++i)
      for (int l = 0; l < L; ++l) st.sigma[i][l] = views[((l - i) % L + L) % L][l];
    return st;
  }

  static ReplicatedState synchronized(const std::vector<CMat>& covs, int copies) {
    ReplicatedState st;
    st.sigma.assign(copies, covs);
    return st;
  }
};

struct ParallelSolution {
  std::vector<CMat> duals;  // reverse covariances, one per channel
  std::vector<RVec> d;      // eigenmode powers per channel
  double mu = 0.0;
};

/// Own-link subproblem across the network copies: maximize
/// sum_i w_i log|I + H_i^H SigmaHat_i H_i OmegaHat_i^{-1}| subject to
/// sum_i Tr(SigmaHat_i Omega_i) <= budget, where Omega_i / OmegaHat_i are the
/// forward / reverse whiteners of copy i's own link.  Because the cost matrix
/// of each copy equals its forward whitener, every eigenmode of the whitened
/// channel has unit power cost and the closed-form solve reduces to
/// d_{i,j} = (w_i/mu - delta_{i,j}^{-2})^+ under sum_{i,j} d_{i,j} = budget.
inline ParallelSolution parallel_wsr_subproblem(
    const std::vector<CMat>& channels, const std::vector<double>& weights,
    const std::vector<CMat>& forward_whiteners,
    const std::vector<CMat>& reverse_whiteners, double budget) {
  const int n = static_cast<int>(channels.size());
  if (n == 0)
    throw std::invalid_argument("parallel_wsr_subproblem: empty channel set");
  if (static_cast<int>(weights.size()) != n ||
      static_cast<int>(forward_whiteners.size()) != n ||
      static_cast<int>(reverse_whiteners.size()) != n)
    throw std::invalid_argument("parallel_wsr_subproblem: size mismatch");
  std::vector<WhitenedChannel> ch(n);
  std::vector<RVec> rhos(n);
  for (int i = 0; i < n; ++i) {
    ch[i] = whiten_channel(channels[i], forward_whiteners[i], reverse_whiteners[i]);
    rhos[i] = RVec::Ones(ch[i].rank);
  }
  LevelSolution sol = solve_level_multi(ch, weights, rhos, budget);
  ParallelSolution out;
  out.mu = sol.mu;
  out.duals.resize(n);
  out.d.resize(n);
  for (int i = 0; i < n; ++i) {
    out.d[i] = sol.links[i].d;
    out.duals[i] = reverse_sigma(ch[i], sol.links[i].d);
  }
  return out;
}

namespace detail {

inline void require_white(const Network& net, const char* who) {
  if (net.colored())
    throw std::invalid_argument(
        std::string(who) +
        ": colored noise/constraint matrices are not supported here; "
        "optimize the canonical network from whiten() instead");
}

/// Relabel a network by perm (perm[pos] = original link index).
inline Network permute_network(const Network& net, const std::vector<int>& perm) {
  const int L = net.L;
  Network out;
  out.L = L;
  out.power = net.power;
  out.phi = permute_phi(net.phi, perm);
  out.nt.resize(L);
  out.nr.resize(L);
  out.weights.resize(L);
  out.tx_group.resize(L);
  out.rx_group.resize(L);
  out.H.assign(L, std::vector<CMat>(L));
  if (!net.W.empty()) out.W.resize(L);
  if (!net.What.empty()) out.What.resize(L);
  for (int l = 0; l < L; ++l) {
    const int ol = perm[l];
    out.nt[l] = net.nt[ol];
    out.nr[l] = net.nr[ol];
    out.weights[l] = net.weights[ol];
    out.tx_group[l] = net.tx_group.empty() ? l : net.tx_group[ol];
    out.rx_group[l] = net.rx_group.empty() ? l : net.rx_group[ol];
    if (!net.W.empty()) out.W[l] = net.W[ol];
    if (!net.What.empty()) out.What[l] = net.What[ol];
    for (int k = 0; k < L; ++k) out.H[l][k] = net.H[ol][perm[k]];
  }
  return out;
}

inline std::vector<CMat> apply_perm(const std::vector<CMat>& v,
                                    const std::vector<int>& perm) {
  std::vector<CMat> out(v.size());
  for (std::size_t pos = 0; pos < perm.size(); ++pos) out[pos] = v[perm[pos]];
  return out;
}

inline std::vector<CMat> undo_perm(const std::vector<CMat>& v,
                                   const std::vector<int>& perm) {
  std::vector<CMat> out(v.size());
  for (std::size_t pos = 0; pos < perm.size(); ++pos) out[perm[pos]] = v[pos];
  return out;
}

template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Largest relative Frobenius step between two covariance sets.
inline double max_rel_step(const std::vector<CMat>& prev,
                           const std::vector<CMat>& next) {
  double m = 0.0;
  for (std::size_t l = 0; l < prev.size(); ++l)
    m = std::max(m, (next[l] - prev[l]).norm() / std::max(1.0, prev[l].norm()));
  return m;
}

/// Streak counter for the optional covariance-step stop: satisfied from the
/// start when disabled, otherwise after `needed` consecutive small steps.
class StepDetector {
 public:
  explicit StepDetector(double tol, int needed = 3)
      : tol_(tol), needed_(needed) {}

  bool update(double step) {
    if (tol_ <= 0.0) return true;
    streak_ = step <= tol_ ? streak_ + 1 : 0;
    return streak_ >= needed_;
  }

 private:
  double tol_;
  int needed_;
  int streak_ = 0;
};

inline std::vector<CMat> random_restart(const Network& net, std::uint64_t seed,
                                        int attempt) {
  CounterRng rng(seed, 7000 + static_cast<std::uint64_t>(attempt));
  std::vector<CMat> covs(net.L);
  for (int l = 0; l < net.L; ++l)
    covs[l] = random_psd(rng, net.nt[l], net.power / (2.0 * net.L),
                         static_cast<std::uint64_t>(l) * 4096);
  return covs;
}

/// Fill in the final state, best/final objective, and KKT residual.  When
/// refresh_duals is set the reverse covariances are recomputed from the final
/// forward ones so that the reported pair is self-consistent.
inline void finalize_report(const Network& net, std::vector<CMat> covs,
                            std::vector<CMat> duals, bool refresh_duals,
                            RunReport& rep) {
  rep.covs = std::move(covs);
  if (refresh_duals) {
    try {
      rep.duals = covariance_transform(net, rep.covs).reverse_covs;
    } catch (const std::exception&) {
      rep.duals = std::move(duals);
    }
  } else {
    rep.duals = std::move(duals);
  }
  rep.wsr = weighted_sum_rate(net, rep.covs);
  rep.best_wsr = rep.wsr;
  for (const TrajectoryPoint& p : rep.trajectory)
    rep.best_wsr = std::max(rep.best_wsr, p.wsr);
  rep.kkt = rep.trajectory.empty() ? kkt_residual(net, rep.covs)
                                   : kkt_residual(net, rep.covs, rep.mu);
}

}  // namespace detail

/// Alternating forward polite water-filling / reverse covariance
/// transformation.  Both covariance sets start at zero unless overridden; a
/// mid-run numerical failure (infeasible duality solve or non-finite
/// objective) triggers up to opts.restarts fresh attempts from seeded random
/// initializations at half power, after which the last good state is
/// reported un-converged.
inline RunReport algorithm_pt(const Network& net, const RunOpts& opts = {}) {
  detail::require_white(net, "algorithm_pt");
  const int attempts = 1 + std::max(0, opts.restarts);
  RunReport rep;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    RunReport tr;
    tr.restarts_used = attempt;
    std::vector<CMat> covs =
        attempt == 0 ? (opts.init_covs.empty() ? zero_covs(net) : opts.init_covs)
                     : detail::random_restart(net, opts.seed, attempt);
    std::vector<CMat> duals = attempt == 0 && !opts.init_duals.empty()
                                  ? opts.init_duals
                                  : zero_covs(net, Role::reverse);
    ConvergenceDetector det(opts.rel_tol);
    detail::StepDetector step_det(opts.cov_tol);
    bool failed = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      std::vector<WhitenedChannel> ch(net.L);
      std::vector<RVec> rhos(net.L);
      for (int l = 0; l < net.L; ++l) {
        CMat omega = interference_covariance(net, covs, l, Role::forward);
        CMat omega_hat = interference_covariance(net, duals, l, Role::reverse);
        ch[l] = whiten_channel(net.H[l][l], omega, omega_hat);
        rhos[l] = forward_costs(ch[l]);
      }
      LevelSolution sol;
      try {
        sol = solve_level_multi(ch, net.weights, rhos, net.power);
      } catch (const std::exception&) {
        failed = true;
        break;
      }
      std::vector<CMat> prev_covs = std::move(covs);
      covs.resize(net.L);
      for (int l = 0; l < net.L; ++l) covs[l] = sol.links[l].sigma;
      tr.mu = sol.mu;
      double wsr = weighted_sum_rate(net, covs);
      if (!std::isfinite(wsr)) {
        failed = true;
        break;
      }
      tr.trajectory.push_back({it + 0.5, wsr, trace_sum(covs),
                               kkt_residual(net, covs, sol.mu)});
      tr.iterations = it + 1;
      const bool steps_ok = step_det.update(detail::max_rel_step(prev_covs, covs));
      if (det.update(wsr) && steps_ok) {
        tr.converged = true;
        break;
      }
      try {
        duals = covariance_transform(net, covs).reverse_covs;
      } catch (const std::exception&) {
        failed = true;
        break;
      }
    }
    if (!failed || attempt + 1 == attempts) {
      detail::finalize_report(net, std::move(covs), std::move(duals),
                              /*refresh_duals=*/true, tr);
      rep = std::move(tr);
      break;
    }
  }
  return rep;
}

/// Alternating forward / reverse polite water-filling.  The forward step
/// reuses the forward whiteners computed in the previous reverse step (noise
/// covariances initially), so each half-update water-fills against the other
/// direction's latest state.
inline RunReport algorithm_pp(const Network& net, const RunOpts& opts = {}) {
  detail::require_white(net, "algorithm_pp");
  const int attempts = 1 + std::max(0, opts.restarts);
  RunReport rep;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    RunReport tr;
    tr.restarts_used = attempt;
    std::vector<CMat> covs = zero_covs(net);
    std::vector<CMat> duals = attempt == 0 && !opts.init_duals.empty()
                                  ? opts.init_duals
                                  : zero_covs(net, Role::reverse);
    std::vector<CMat> stale_omega(net.L);
    for (int l = 0; l < net.L; ++l) stale_omega[l] = net.noise(l);
    if (attempt == 0 && !opts.init_covs.empty()) {
      covs = opts.init_covs;
      for (int l = 0; l < net.L; ++l)
        stale_omega[l] = interference_covariance(net, covs, l, Role::forward);
    } else if (attempt > 0) {
      covs = detail::random_restart(net, opts.seed, attempt);
      for (int l = 0; l < net.L; ++l)
        stale_omega[l] = interference_covariance(net, covs, l, Role::forward);
    }
    ConvergenceDetector det(opts.rel_tol);
    detail::StepDetector step_det(opts.cov_tol);
    bool failed = false;
    for (int it = 0; it < opts.max_iter; ++it) {
      std::vector<CMat> omega_hat(net.L);
      std::vector<WhitenedChannel> ch(net.L);
      std::vector<RVec> rhos(net.L);
      for (int l = 0; l < net.L; ++l) {
        omega_hat[l] = interference_covariance(net, duals, l, Role::reverse);
        ch[l] = whiten_channel(net.H[l][l], stale_omega[l], omega_hat[l]);
        rhos[l] = forward_costs(ch[l]);
      }
      LevelSolution sol;
      try {
        sol = solve_level_multi(ch, net.weights, rhos, net.power);
      } catch (const std::exception&) {
        failed = true;
        break;
      }
      std::vector<CMat> prev_covs = std::move(covs);
      covs.resize(net.L);
      for (int l = 0; l < net.L; ++l) covs[l] = sol.links[l].sigma;
      tr.mu = sol.mu;
      double wsr = weighted_sum_rate(net, covs);
      if (!std::isfinite(wsr)) {
        failed = true;
        break;
      }
      tr.trajectory.push_back({it + 0.5, wsr, trace_sum(covs),
                               kkt_residual(net, covs, sol.mu)});
      tr.iterations = it + 1;
      const bool steps_ok = step_det.update(detail::max_rel_step(prev_covs, covs));
      if (det.update(wsr) && steps_ok) {
        tr.converged = true;
        break;
      }
      std::vector<CMat> fresh_omega(net.L);
      std::vector<WhitenedChannel> rch(net.L);
      std::vector<RVec> rho_hat(net.L);
      for (int l = 0; l < net.L; ++l) {
        fresh_omega[l] = interference_covariance(net, covs, l, Role::forward);
        rch[l] = whiten_channel(net.H[l][l], fresh_omega[l], omega_hat[l]);
        rho_hat[l] = reverse_costs(rch[l]);
      }
      LevelSolution rsol;
      try {
        rsol = solve_level_multi(rch, net.weights, rho_hat, net.power);
      } catch (const std::exception&) {
        failed = true;
        break;
      }
      for (int l = 0; l < net.L; ++l)
        duals[l] = reverse_sigma(rch[l], rsol.links[l].d);
      stale_omega = std::move(fresh_omega);
    }
    if (!failed || attempt + 1 == attempts) {
      detail::finalize_report(net, std::move(covs), std::move(duals),
                              /*refresh_duals=*/false, tr);
      rep = std::move(tr);
      break;
    }
  }
  return rep;
}

/// Per-link water-filling against the forward interference only (reverse
/// whiteners pinned at identity).  Each sweep is a half-update, so the run
/// performs 2 * max_iter sweeps to match the effective-iteration budget of
/// the alternating algorithms.  Divergence is reported, never thrown.
inline RunReport selfish_waterfill(const Network& net, const RunOpts& opts = {}) {
  detail::require_white(net, "selfish_waterfill");
  RunReport tr;
  std::vector<CMat> covs = opts.init_covs.empty() ? zero_covs(net) : opts.init_covs;
  ConvergenceDetector det(opts.rel_tol);
  detail::StepDetector step_det(opts.cov_tol);
  const int sweeps = 2 * opts.max_iter;
  for (int s = 0; s < sweeps; ++s) {
    std::vector<WhitenedChannel> ch(net.L);
    std::vector<RVec> rhos(net.L);
    for (int l = 0; l < net.L; ++l) {
      CMat omega = interference_covariance(net, covs, l, Role::forward);
      ch[l] = whiten_channel(net.H[l][l], omega,
                             CMat::Identity(net.nt[l], net.nt[l]));
      rhos[l] = forward_costs(ch[l]);
    }
    LevelSolution sol = solve_level_multi(ch, net.weights, rhos, net.power);
    std::vector<CMat> prev_covs = std::move(covs);
    covs.resize(net.L);
    for (int l = 0; l < net.L; ++l) covs[l] = sol.links[l].sigma;
    tr.mu = sol.mu;
    double wsr = weighted_sum_rate(net, covs);
    tr.trajectory.push_back({0.5 * (s + 1), wsr, trace_sum(covs),
                             kkt_residual(net, covs, sol.mu)});
    tr.iterations = s + 1;
    const bool steps_ok = step_det.update(detail::max_rel_step(prev_covs, covs));
    if (std::isfinite(wsr) && det.update(wsr) && steps_ok) {
      tr.converged = true;
      break;
    }
  }
  detail::finalize_report(net, std::move(covs), {}, /*refresh_duals=*/false, tr);
  return tr;
}

namespace detail {

/// Reverse-direction sub-network over links 0..i of an iTree-indexed
/// network: adjoint channels, transposed coupling, white noise, and
/// constraint matrices equal to the sub-network noise covariances (the
/// interference of the dropped links j > i, frozen at the current forward
/// covariances, absorbed as colored noise).
inline Network dual_subnetwork(const Network& net, const std::vector<CMat>& covs,
                               int i) {
  const int n = i + 1;
  Network out;
  out.L = n;
  out.power = net.power;
  out.phi = Eigen::MatrixXi::Zero(n, n);
  out.nt.resize(n);
  out.nr.resize(n);
  out.weights.resize(n);
  out.tx_group.resize(n);
  out.rx_group.resize(n);
  out.H.assign(n, std::vector<CMat>(n));
  out.What.resize(n);
  for (int l = 0; l < n; ++l) {
    out.nt[l] = net.nr[l];
    out.nr[l] = net.nt[l];
    out.weights[l] = net.weights[l];
    out.tx_group[l] = l;
    out.rx_group[l] = l;
    for (int k = 0; k < n; ++k) {
      out.phi(l, k) = net.phi(k, l);
      out.H[l][k] = net.H[k][l].adjoint();
    }
    CMat w = net.noise(l);
    for (int j = i + 1; j < net.L; ++j)
      if (net.phi(l, j) == 1)
        w += net.H[l][j] * covs[j] * net.H[l][j].adjoint();
    out.What[l] = hermitize(w);
  }
  return out;
}

inline RunReport replicated_core(const Network& net_in, const RunOpts& opts,
                                 bool line_search) {
  const char* who = line_search ? "algorithm_p1" : "algorithm_p";
  require_white(net_in, who);
  auto perm_opt = itree_index(net_in);
  if (!perm_opt)
    throw std::invalid_argument(std::string(who) +
                                ": coupling admits no sequential order");
  const std::vector<int>& perm = *perm_opt;
  Network net = permute_network(net_in, perm);
  const int L = net.L;

  std::vector<CMat> covs(L);
  if (!opts.init_covs.empty()) {
    covs = apply_perm(opts.init_covs, perm);
    if (trace_sum(covs) > net.power * (1.0 + 1e-9))
      throw std::invalid_argument(std::string(who) +
                                  ": initial point exceeds the power budget");
  } else {
    for (int l = 0; l < L; ++l)
      covs[l] = (net.power / (L * net.nt[l])) *
                CMat::Identity(net.nt[l], net.nt[l]);
  }

  RunReport tr;
  ConvergenceDetector det(opts.rel_tol);
  StepDetector step_det(opts.cov_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<CMat> prev_covs = covs;
    // (1) One covariance transformation serves every copy: the state is
    // synchronized, and restricting the full-network transform to the first
    // i links reproduces each sub-network's transform.
    TransformReport full = covariance_transform(net, covs);
    const std::vector<CMat>& duals = full.reverse_covs;

    // (2) Own-link subproblem across the copies.  Copy i's own link i keeps
    // its full-network whiteners; the budget is what the copies' sub-network
    // budgets leave after paying for the already-transformed links, priced
    // by the sub-network noises.
    std::vector<CMat> hch(L), fw(L), rw(L);
    double budget = 0.0;
    double cum = 0.0;
    for (int i = 0; i < L; ++i) {
      cum += covs[i].trace().real();
      hch[i] = net.H[i][i];
      fw[i] = interference_covariance(net, covs, i, Role::forward);
      rw[i] = interference_covariance(net, duals, i, Role::reverse);
      double spent = 0.0;
      for (int l = 0; l < i; ++l) {
        double v = (duals[l] * net.noise(l)).trace().real();
        for (int j = i + 1; j < L; ++j)
          if (net.phi(l, j) == 1)
            v += (duals[l] * net.H[l][j] * covs[j] * net.H[l][j].adjoint())
                     .trace()
                     .real();
        spent += v;
      }
      budget += cum - spent;
    }
    ParallelSolution par =
        parallel_wsr_subproblem(hch, net.weights, fw, rw, budget);
    tr.mu = par.mu;

    // (3) Transform each copy's reverse covariances back to the forward
    // direction over its dual sub-network; links above the copy's own index
    // keep their old covariances.
    ReplicatedState grid;
    grid.sigma.assign(L, std::vector<CMat>(L));
    for (int i = 0; i < L; ++i) {
      Network dsub = dual_subnetwork(net, covs, i);
      std::vector<CMat> dvec(i + 1);
      for (int l = 0; l < i; ++l) dvec[l] = duals[l];
      dvec[i] = par.duals[i];
      TransformReport back = covariance_transform(dsub, dvec);
      for (int l = 0; l <= i; ++l) grid.sigma[i][l] = back.reverse_covs[l];
      for (int l = i + 1; l < L; ++l) grid.sigma[i][l] = covs[l];
    }

    // (4) Averaging update, optionally improved by a line search between the
    // own-link view and the rest.
    std::vector<CMat> averaged(L);
    for (int l = 0; l < L; ++l) {
      CMat sum = CMat::Zero(net.nt[l], net.nt[l]);
      for (int i = 0; i < L; ++i) sum += grid.sigma[i][l];
      averaged[l] = hermitize(sum / static_cast<double>(L));
    }
    covs = averaged;
    if (line_search && L > 1) {
      std::vector<double> pk(L, 0.0);
      std::vector<std::vector<CMat>> views(L);
      for (int k = 0; k < L; ++k) {
        views[k] = grid.view(k);
        for (int l = 0; l < L; ++l) pk[k] += views[k][l].trace().real();
      }
      const double p1 = pk[0];
      double rest = 0.0;
      for (int k = 1; k < L; ++k) rest += pk[k];
      if (p1 > 0.0 && rest > 0.0) {
        std::vector<CMat> tail(L);
        for (int l = 0; l < L; ++l) {
          tail[l] = CMat::Zero(net.nt[l], net.nt[l]);
          for (int k = 1; k < L; ++k) tail[l] += views[k][l];
        }
        auto mix = [&](double beta) {
          std::vector<CMat> out(L);
          const double a = beta * net.power / p1;
          const double b = (1.0 - beta) * net.power / rest;
          for (int l = 0; l < L; ++l)
            out[l] = hermitize(a * views[0][l] + b * tail[l]);
          return out;
        };
        auto objective = [&](double beta) {
          return weighted_sum_rate(net, mix(beta));
        };
        const double lo =
            std::clamp(p1 / (L * net.power), 0.0, 1.0);
        double beta = golden_max(objective, lo, 1.0, 1e-6);
        double best = objective(beta);
        for (double cand : {lo, 1.0}) {
          double f = objective(cand);
          if (f > best) {
            best = f;
            beta = cand;
          }
        }
        double f_avg = weighted_sum_rate(net, averaged);
        if (best > f_avg) covs = mix(beta);
      }
    }

    double wsr = weighted_sum_rate(net, covs);
    tr.trajectory.push_back({static_cast<double>(it + 1), wsr, trace_sum(covs),
                             kkt_residual(net, covs, par.mu)});
    tr.iterations = it + 1;
    if (!std::isfinite(wsr)) break;
    const bool steps_ok = step_det.update(max_rel_step(prev_covs, covs));
    if (det.update(wsr) && steps_ok) {
      tr.converged = true;
      break;
    }
  }
  finalize_report(net, std::move(covs), {}, /*refresh_duals=*/true, tr);
  tr.covs = undo_perm(tr.covs, perm);
  tr.duals = undo_perm(tr.duals, perm);
  return tr;
}

}  // namespace detail

/// Replicated-network algorithm for sequentially solvable couplings: each
/// iteration transforms the current (synchronized) state to the reverse
/// direction, redistributes power across the copies' own links in closed
/// form, transforms back per sub-network, and averages the copies.  The
/// objective never decreases on such networks.
inline RunReport algorithm_p(const Network& net, const RunOpts& opts = {}) {
  return detail::replicated_core(net, opts, false);
}

/// Replicated-network algorithm with a line search between the own-link view
/// and the remaining views in place of plain averaging; the lower endpoint
/// of the search interval reproduces algorithm_p's update, so each step
/// improves at least as much.
inline RunReport algorithm_p1(const Network& net, const RunOpts& opts = {}) {
  return detail::replicated_core(net, opts, true);
}

}  // namespace netopt
