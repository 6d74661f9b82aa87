// Seeded scenario generation: named topologies from the experiment protocol
// (multiaccess, broadcast, interference, X, Z, and the four-link looped-gain
// fixture) plus explicit custom couplings.  Channels are sqrt(gain) times
// i.i.d. unit-variance complex Gaussian entries from the counter-based
// generator, one stream per physical (receiver node, transmitter node) pair,
// so regeneration is deterministic, order-independent, and links sharing a
// physical node pair share the underlying draw.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "netopt/itree.hpp"
#include "netopt/network.hpp"
#include "netopt/rng.hpp"

namespace netopt {

/// Stream tags for the counter RNG.  Anything that draws randomness gets its
/// own tag so adding a consumer never shifts another one's values.
namespace streams {
inline constexpr std::uint64_t kWeights = 1;
inline constexpr std::uint64_t kChannelBase = 16;
inline constexpr std::uint64_t kNodeStride = 64;
/// Channel draw for one physical receiver/transmitter node pair.
inline std::uint64_t channel(int rx_node, int tx_node) {
  return kChannelBase + static_cast<std::uint64_t>(rx_node) * kNodeStride +
         static_cast<std::uint64_t>(tx_node);
}
}  // namespace streams

/// Declarative experiment input.  `users` fixes the link count for the mac,
/// bc, and ifc topologies; x (4 links over 2x2 nodes), z (2 links, one
/// missing cross path), and itree-fig3 (4 links over 3x3 nodes) have fixed
/// layouts; custom takes `phi` and optional groups verbatim.
struct Scenario {
  std::string topology = "ifc";  // mac | bc | ifc | x | z | itree-fig3 | custom
  int users = 2;
  std::vector<int> nt{2};  // per-link transmit antennas (size 1 broadcasts)
  std::vector<int> nr{2};  // per-link receive antennas (size 1 broadcasts)
  Eigen::MatrixXd gains_db;  // L x L pairwise gains in dB; empty = all 0 dB
  std::string weight_rule = "fixed";  // fixed | uniform (U(0.8, 1.2))
  std::vector<double> weights;        // fixed rule; empty = all ones
  double power_db = 10.0;             // total transmit power in dB
  std::uint64_t seed = 0;
  std::string order = "auto";  // auto (weight rule at shared nodes) | explicit
  std::string variant = "a";   // itree-fig3 coupling: a (acyclic) | b (looped)
  Eigen::MatrixXi phi;         // explicit order / custom topology
  std::vector<int> tx_group;   // custom topology only
  std::vector<int> rx_group;   // custom topology only
};

namespace detail {

inline std::vector<int> expand_antennas(const std::vector<int>& spec, int L,
                                        const char* which) {
  std::vector<int> out;
  if (static_cast<int>(spec.size()) == L)
    out = spec;
  else if (spec.size() == 1)
    out.assign(L, spec[0]);
  else
    throw std::invalid_argument(std::string("generate: ") + which +
                                " antenna spec must have 1 or L entries");
  for (int v : out)
    if (v <= 0)
      throw std::invalid_argument(std::string("generate: ") + which +
                                  " antenna counts must be positive");
  return out;
}

/// Processing order by weight: receivers decode the smallest weight first,
/// transmitters encode the largest weight first; ties keep ascending index.
inline std::vector<int> weight_order(const std::vector<double>& w,
                                     bool transmitter) {
  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return transmitter ? w[a] > w[b] : w[a] < w[b];
  });
  return order;
}

}  // namespace detail

/// Materialize a scenario into a network.  Deterministic in the scenario
/// (same seed, same bytes); throws std::invalid_argument on inconsistent
/// antenna, weight, gain, or coupling specifications.
inline Network generate(const Scenario& sc) {
  // Topology layout: link count and physical node assignment.
  int L = 0;
  std::vector<int> tx_group, rx_group;
  if (sc.topology == "mac" || sc.topology == "bc" || sc.topology == "ifc") {
    L = sc.users;
    if (L <= 0) throw std::invalid_argument("generate: users must be positive");
    tx_group.resize(L);
    rx_group.resize(L);
    for (int l = 0; l < L; ++l) {
      tx_group[l] = sc.topology == "bc" ? 0 : l;
      rx_group[l] = sc.topology == "mac" ? 0 : l;
    }
  } else if (sc.topology == "x") {
    L = 4;
    tx_group = {0, 0, 1, 1};
    rx_group = {0, 1, 0, 1};
  } else if (sc.topology == "z") {
    L = 2;
    tx_group = {0, 1};
    rx_group = {0, 1};
  } else if (sc.topology == "itree-fig3") {
    L = 4;
    tx_group = {0, 1, 1, 2};
    rx_group = {0, 0, 1, 2};
  } else if (sc.topology == "custom") {
    if (sc.phi.rows() == 0 || sc.phi.rows() != sc.phi.cols())
      throw std::invalid_argument("generate: custom topology needs square phi");
    L = static_cast<int>(sc.phi.rows());
    tx_group = sc.tx_group;
    rx_group = sc.rx_group;
    if (tx_group.empty()) {
      tx_group.resize(L);
      std::iota(tx_group.begin(), tx_group.end(), 0);
    }
    if (rx_group.empty()) {
      rx_group.resize(L);
      std::iota(rx_group.begin(), rx_group.end(), 0);
    }
    if (static_cast<int>(tx_group.size()) != L ||
        static_cast<int>(rx_group.size()) != L)
      throw std::invalid_argument("generate: group spec must have L entries");
  } else {
    throw std::invalid_argument("generate: unknown topology '" + sc.topology +
                                "'");
  }

  // Antennas, equal within a shared physical node.
  std::vector<int> nt = detail::expand_antennas(sc.nt, L, "transmit");
  std::vector<int> nr = detail::expand_antennas(sc.nr, L, "receive");
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < l; ++k) {
      if (tx_group[l] == tx_group[k] && nt[l] != nt[k])
        throw std::invalid_argument(
            "generate: links sharing a transmitter need equal antenna counts");
      if (rx_group[l] == rx_group[k] && nr[l] != nr[k])
        throw std::invalid_argument(
            "generate: links sharing a receiver need equal antenna counts");
    }

  // Weights.
  std::vector<double> w(L, 1.0);
  if (sc.weight_rule == "uniform") {
    CounterRng rng(sc.seed, streams::kWeights);
    for (int l = 0; l < L; ++l)
      w[l] = rng.uniform(static_cast<std::uint64_t>(l), 0.8, 1.2);
  } else if (sc.weight_rule == "fixed") {
    if (!sc.weights.empty()) {
      if (static_cast<int>(sc.weights.size()) != L)
        throw std::invalid_argument("generate: weights must have L entries");
      w = sc.weights;
    }
  } else {
    throw std::invalid_argument("generate: unknown weight rule '" +
                                sc.weight_rule + "'");
  }

  // Coupling.
  Eigen::MatrixXi phi;
  if (sc.order == "explicit" || sc.topology == "custom") {
    phi = sc.phi;
    if (phi.rows() != L || phi.cols() != L)
      throw std::invalid_argument("generate: phi must be L x L");
  } else if (sc.order != "auto") {
    throw std::invalid_argument("generate: unknown order rule '" + sc.order +
                                "'");
  } else if (sc.topology == "mac" || sc.topology == "bc") {
    std::vector<int> links(L);
    std::iota(links.begin(), links.end(), 0);
    phi = detail::implied_block(links,
                                detail::weight_order(w, sc.topology == "bc"));
  } else if (sc.topology == "z") {
    phi = Eigen::MatrixXi::Zero(2, 2);
    phi(0, 1) = 1;
  } else if (sc.topology == "itree-fig3") {
    phi = Eigen::MatrixXi::Zero(4, 4);
    if (sc.variant == "a") {
      const int rows[4][4] = {
          {0, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 0, 1}, {0, 0, 0, 0}};
      for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k) phi(l, k) = rows[l][k];
    } else if (sc.variant == "b") {
      const int rows[4][4] = {
          {0, 1, 1, 1}, {1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 0, 0}};
      for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k) phi(l, k) = rows[l][k];
    } else {
      throw std::invalid_argument("generate: itree-fig3 variant must be a|b");
    }
  } else {  // ifc, x: separate links, no cancellation anywhere
    phi = Eigen::MatrixXi::Ones(L, L);
    phi.diagonal().setZero();
  }

  // Pairwise gains.
  Eigen::MatrixXd gains_db = sc.gains_db;
  if (gains_db.size() == 0) gains_db = Eigen::MatrixXd::Zero(L, L);
  if (gains_db.rows() != L || gains_db.cols() != L)
    throw std::invalid_argument("generate: gain grid must be L x L");

  // Channels: one unit-variance draw per physical node pair, scaled per link
  // pair.  The Z topology has no physical path from its first transmitter to
  // the second receiver.
  Network net;
  net.L = L;
  net.nt = nt;
  net.nr = nr;
  net.tx_group = tx_group;
  net.rx_group = rx_group;
  net.weights = w;
  net.phi = phi;
  net.power = std::pow(10.0, sc.power_db / 10.0);
  net.H.assign(L, std::vector<CMat>(L));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < L; ++k) {
      if (sc.topology == "z" && l == 1 && k == 0) {
        net.H[1][0] = CMat::Zero(nr[1], nt[0]);
        continue;
      }
      CounterRng rng(sc.seed, streams::channel(rx_group[l], tx_group[k]));
      CMat base = rng.complex_gaussian_matrix(nr[l], nt[k]);
      const double g = std::pow(10.0, gains_db(l, k) / 10.0);
      net.H[l][k] = std::sqrt(g) * base;
    }
  auto problems = validate_network(net);
  if (!problems.empty())
    throw std::invalid_argument("generate: " + problems.front());
  return net;
}

/// Fixture library: the four coupling matrices of the three-link example
/// network (two links share a transmitter, two share a receiver) and the two
/// processing orders of the four-link looped-gain network.
inline Scenario named_scenario(const std::string& name) {
  Scenario sc;
  if (name == "phi-a" || name == "phi-b" || name == "phi-c" ||
      name == "phi-d") {
    sc.topology = "custom";
    sc.tx_group = {0, 1, 1};
    sc.rx_group = {0, 0, 1};
    sc.phi = Eigen::MatrixXi::Zero(3, 3);
    if (name == "phi-a") {
      const int rows[3][3] = {{0, 1, 1}, {0, 0, 1}, {1, 0, 0}};
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) sc.phi(l, k) = rows[l][k];
    } else if (name == "phi-b") {
      const int rows[3][3] = {{0, 1, 1}, {0, 0, 0}, {1, 1, 0}};
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) sc.phi(l, k) = rows[l][k];
    } else if (name == "phi-c") {
      const int rows[3][3] = {{0, 0, 1}, {1, 0, 1}, {1, 0, 0}};
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) sc.phi(l, k) = rows[l][k];
    } else {
      const int rows[3][3] = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) sc.phi(l, k) = rows[l][k];
    }
    return sc;
  }
  if (name == "fig3-a" || name == "fig3-b") {
    sc.topology = "itree-fig3";
    sc.variant = name == "fig3-a" ? "a" : "b";
    return sc;
  }
  throw std::invalid_argument("named_scenario: unknown fixture '" + name +
                              "'");
}

}  // namespace netopt
