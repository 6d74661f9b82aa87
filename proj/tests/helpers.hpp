// Shared builders for tests: deterministic random networks, covariance sets,
// and the coupling-matrix fixtures used across the suite.  Kept independent of
// the library's scenario generation so the tests exercise the math layer with
// their own inputs.

#pragma once

#include <cstdint>
#include <vector>

#include <netopt/network.hpp>
#include <netopt/rng.hpp>

namespace testhelp {

using netopt::CMat;
using netopt::CounterRng;
using netopt::Network;

inline Eigen::MatrixXi phi_from_rows(const std::vector<std::vector<int>>& rows) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXi phi(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) phi(l, k) = rows[l][k];
  return phi;
}

// Three-link coupling fixtures (a, b, c have a 1<->3 cycle; d is complete).
inline Eigen::MatrixXi phi_a() {
  return phi_from_rows({{0, 1, 1}, {0, 0, 1}, {1, 0, 0}});
}
inline Eigen::MatrixXi phi_b() {
  return phi_from_rows({{0, 1, 1}, {0, 0, 0}, {1, 1, 0}});
}
inline Eigen::MatrixXi phi_c() {
  return phi_from_rows({{0, 0, 1}, {1, 0, 1}, {1, 0, 0}});
}
inline Eigen::MatrixXi phi_d() {
  return phi_from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

// Four-link network over three physical transmitters and three physical
// receivers whose gain graph contains an (undirected) loop.  Coupling A
// applies cancellation at the shared nodes and is sequentially solvable;
// coupling B processes the shared nodes in the unhelpful order and has a
// directed 1<->2 cycle.
inline Eigen::MatrixXi fig3_phi_a() {
  return phi_from_rows(
      {{0, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 0, 1}, {0, 0, 0, 0}});
}
inline Eigen::MatrixXi fig3_phi_b() {
  return phi_from_rows(
      {{0, 1, 1, 1}, {1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 0, 0}});
}

/// Random binary coupling with zero diagonal; entry (l, k) set with the given
/// density.
inline Eigen::MatrixXi random_phi(std::uint64_t seed, int L, double density) {
  CounterRng rng(seed, 9100);
  Eigen::MatrixXi phi = Eigen::MatrixXi::Zero(L, L);
  std::uint64_t c = 0;
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < L; ++k, ++c)
      if (l != k && rng.uniform(c) < density) phi(l, k) = 1;
  return phi;
}

/// Fully random network: independent complex Gaussian channels, direct links
/// at unit gain and cross links scaled by sqrt(cross_gain).  Weights all one
/// unless overridden by the caller.
inline Network random_network(std::uint64_t seed, const std::vector<int>& nt,
                              const std::vector<int>& nr,
                              const Eigen::MatrixXi& phi, double power = 1.0,
                              double cross_gain = 1.0) {
  Network net;
  net.L = static_cast<int>(nt.size());
  net.nt = nt;
  net.nr = nr;
  net.phi = phi;
  net.power = power;
  net.weights.assign(net.L, 1.0);
  net.H.assign(net.L, std::vector<CMat>(net.L));
  for (int l = 0; l < net.L; ++l)
    for (int k = 0; k < net.L; ++k) {
      CounterRng rng(seed, 100 + static_cast<std::uint64_t>(l) * 64 + k);
      double scale = (l == k) ? 1.0 : std::sqrt(cross_gain);
      net.H[l][k] = scale * rng.complex_gaussian_matrix(nr[l], nt[k]);
    }
  netopt::ensure_groups(net);
  return net;
}

/// Multiaccess network: `users` links into one shared physical receiver.
/// Links are indexed in decode order (link 0 decoded first), so link l is
/// interfered by the not-yet-cancelled links k > l.
inline Network mac_network(std::uint64_t seed, int users, int nt, int nr,
                           double power) {
  Network net;
  net.L = users;
  net.nt.assign(users, nt);
  net.nr.assign(users, nr);
  net.power = power;
  net.weights.assign(users, 1.0);
  net.phi = Eigen::MatrixXi::Zero(users, users);
  for (int l = 0; l < users; ++l)
    for (int k = l + 1; k < users; ++k) net.phi(l, k) = 1;
  std::vector<CMat> phys(users);
  for (int k = 0; k < users; ++k) {
    CounterRng rng(seed, 300 + static_cast<std::uint64_t>(k));
    phys[k] = rng.complex_gaussian_matrix(nr, nt);
  }
  net.H.assign(users, std::vector<CMat>(users));
  for (int l = 0; l < users; ++l)
    for (int k = 0; k < users; ++k) net.H[l][k] = phys[k];
  net.tx_group.resize(users);
  for (int l = 0; l < users; ++l) net.tx_group[l] = l;
  net.rx_group.assign(users, 0);
  return net;
}

/// The four-link loop network (shared transmitter node for links 2,3 and
/// shared receiver node for links 1,2; 0-based).  Channels depend only on the
/// physical (receiver, transmitter) pair.  order_a selects the sequentially
/// solvable coupling.
inline Network fig3_network(std::uint64_t seed, bool order_a, int ant = 2,
                            double power = 4.0) {
  Network net;
  net.L = 4;
  net.nt.assign(4, ant);
  net.nr.assign(4, ant);
  net.power = power;
  net.weights = {1.0, 1.1, 1.2, 1.3};
  net.tx_group = {0, 1, 1, 2};
  net.rx_group = {0, 0, 1, 2};
  net.phi = order_a ? fig3_phi_a() : fig3_phi_b();
  CMat phys[3][3];
  for (int pr = 0; pr < 3; ++pr)
    for (int pt = 0; pt < 3; ++pt) {
      CounterRng rng(seed, 500 + static_cast<std::uint64_t>(pr) * 8 + pt);
      phys[pr][pt] = rng.complex_gaussian_matrix(ant, ant);
    }
  net.H.assign(4, std::vector<CMat>(4));
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k)
      net.H[l][k] = phys[net.rx_group[l]][net.tx_group[k]];
  return net;
}

/// Random PSD covariances with traces summing to `budget`.
inline std::vector<CMat> random_covs(const Network& net, std::uint64_t seed,
                                     double budget) {
  std::vector<CMat> out(net.L);
  double total = 0.0;
  std::vector<double> share(net.L);
  CounterRng mix(seed, 9700);
  for (int l = 0; l < net.L; ++l) {
    share[l] = mix.uniform_pos(static_cast<std::uint64_t>(l));
    total += share[l];
  }
  for (int l = 0; l < net.L; ++l) {
    CounterRng rng(seed, 9800 + static_cast<std::uint64_t>(l));
    out[l] = netopt::random_psd(rng, net.nt[l], budget * share[l] / total);
  }
  return out;
}

}  // namespace testhelp
