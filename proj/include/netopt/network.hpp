// Network model for one-hop MIMO interference networks made of coupled
// broadcast and multiaccess links ("B-MAC" networks).
//
// A network is L point-to-point links over shared physical transmitters and
// receivers.  The binary coupling matrix phi encodes which interference
// survives after any transmit-side (dirty-paper) or receive-side (successive
// cancellation) processing: phi(l, k) = 1 means link k's signal interferes
// link l.  Optional per-link Hermitian PD matrices give colored noise (W_l,
// receiver side) and a single linear transmit constraint
// sum_l Tr(Sigma_l What_l) <= P_T; both default to identity, in which case
// the constraint is the plain sum-power budget.

#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netopt/linalg.hpp"

namespace netopt {

/// Direction selector for rate/covariance computations.
enum class Role { forward, reverse };

struct Network {
  int L = 0;
  std::vector<int> nt;  // transmit antennas per link
  std::vector<int> nr;  // receive antennas per link
  /// H[l][k]: channel from link k's transmitter to link l's receiver,
  /// nr[l] x nt[k].
  std::vector<std::vector<CMat>> H;
  Eigen::MatrixXi phi;  // L x L, zero diagonal, entries in {0,1}
  std::vector<double> weights;
  double power = 1.0;  // sum (or linear-constraint) budget P_T
  /// Physical-node grouping; links sharing a transmitter (receiver) carry the
  /// same tx_group (rx_group) id.  Defaults to one node per link.
  std::vector<int> tx_group;
  std::vector<int> rx_group;
  /// Optional colored noise covariances (nr[l] x nr[l]); empty = identity.
  std::vector<CMat> W;
  /// Optional linear-constraint matrices (nt[l] x nt[l]); empty = identity.
  std::vector<CMat> What;

  bool colored() const { return !W.empty() || !What.empty(); }

  /// Noise covariance of link l (identity when uncolored).
  CMat noise(int l) const {
    return W.empty() ? CMat::Identity(nr[l], nr[l]) : W[l];
  }

  /// Linear-constraint matrix of link l (identity when uncolored).
  CMat constraint(int l) const {
    return What.empty() ? CMat::Identity(nt[l], nt[l]) : What[l];
  }
};

/// Directed interference graph: an edge i -> j means link i causes
/// interference to link j, i.e. phi(j, i) = 1.
struct InterferenceGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // (source, target), 0-based
};

inline InterferenceGraph interference_graph(const Network& net) {
  InterferenceGraph g;
  g.nodes = net.L;
  for (int j = 0; j < net.L; ++j)
    for (int i = 0; i < net.L; ++i)
      if (net.phi(j, i) == 1) g.edges.emplace_back(i, j);
  return g;
}

/// Fill in default groups (every link its own physical node) when omitted.
inline void ensure_groups(Network& net) {
  if (static_cast<int>(net.tx_group.size()) != net.L) {
    net.tx_group.resize(net.L);
    for (int l = 0; l < net.L; ++l) net.tx_group[l] = l;
  }
  if (static_cast<int>(net.rx_group.size()) != net.L) {
    net.rx_group.resize(net.L);
    for (int l = 0; l < net.L; ++l) net.rx_group[l] = l;
  }
}

/// Structural validation; returns one human-readable message per violation
/// (empty result = valid network).
inline std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& m) { out.push_back(m); };
  if (net.L < 1) {
    fail("L must be >= 1");
    return out;
  }
  auto sized = [&](const char* name, std::size_t n) {
    if (static_cast<int>(n) != net.L) {
      std::ostringstream os;
      os << name << " has size " << n << ", expected L=" << net.L;
      fail(os.str());
      return false;
    }
    return true;
  };
  bool shape_ok = sized("nt", net.nt.size()) & sized("nr", net.nr.size()) &
                  sized("H", net.H.size()) & sized("weights", net.weights.size());
  if (!shape_ok) return out;
  for (int l = 0; l < net.L; ++l) {
    if (net.nt[l] < 1 || net.nr[l] < 1) {
      std::ostringstream os;
      os << "link " << l + 1 << ": antenna counts must be positive";
      fail(os.str());
    }
    if (static_cast<int>(net.H[l].size()) != net.L) {
      std::ostringstream os;
      os << "H row " << l + 1 << " has " << net.H[l].size() << " entries";
      fail(os.str());
      continue;
    }
    for (int k = 0; k < net.L; ++k) {
      const CMat& h = net.H[l][k];
      if (h.rows() != net.nr[l] || h.cols() != net.nt[k]) {
        std::ostringstream os;
        os << "H[" << l + 1 << "][" << k + 1 << "] is " << h.rows() << "x"
           << h.cols() << ", expected " << net.nr[l] << "x" << net.nt[k];
        fail(os.str());
      }
      if (!h.allFinite()) {
        std::ostringstream os;
        os << "H[" << l + 1 << "][" << k + 1 << "] contains NaN/Inf";
        fail(os.str());
      }
    }
  }
  if (net.phi.rows() != net.L || net.phi.cols() != net.L) {
    fail("phi must be L x L");
  } else {
    for (int l = 0; l < net.L; ++l) {
      if (net.phi(l, l) != 0) {
        std::ostringstream os;
        os << "phi diagonal entry (" << l + 1 << "," << l + 1 << ") must be 0";
        fail(os.str());
      }
      for (int k = 0; k < net.L; ++k)
        if (net.phi(l, k) != 0 && net.phi(l, k) != 1) {
          std::ostringstream os;
          os << "phi(" << l + 1 << "," << k + 1 << ") must be 0 or 1";
          fail(os.str());
        }
    }
  }
  for (int l = 0; l < net.L; ++l)
    if (!(net.weights[l] >= 0.0) || !std::isfinite(net.weights[l])) {
      std::ostringstream os;
      os << "weight " << l + 1 << " must be finite and nonnegative";
      fail(os.str());
    }
  if (!(net.power > 0.0) || !std::isfinite(net.power))
    fail("power budget must be finite and positive");
  // Links on a shared physical node must agree on the antenna count.
  if (!net.tx_group.empty() && sized("tx_group", net.tx_group.size()))
    for (int l = 0; l < net.L; ++l)
      for (int k = l + 1; k < net.L; ++k)
        if (net.tx_group[l] == net.tx_group[k] && net.nt[l] != net.nt[k]) {
          std::ostringstream os;
          os << "links " << l + 1 << " and " << k + 1
             << " share a physical transmitter but differ in nt";
          fail(os.str());
        }
  if (!net.rx_group.empty() && sized("rx_group", net.rx_group.size()))
    for (int l = 0; l < net.L; ++l)
      for (int k = l + 1; k < net.L; ++k)
        if (net.rx_group[l] == net.rx_group[k] && net.nr[l] != net.nr[k]) {
          std::ostringstream os;
          os << "links " << l + 1 << " and " << k + 1
             << " share a physical receiver but differ in nr";
          fail(os.str());
        }
  auto check_pd = [&](const std::vector<CMat>& ms, const std::vector<int>& dims,
                      const char* name) {
    if (ms.empty()) return;
    if (static_cast<int>(ms.size()) != net.L) {
      std::ostringstream os;
      os << name << " has size " << ms.size() << ", expected L";
      fail(os.str());
      return;
    }
    for (int l = 0; l < net.L; ++l) {
      if (ms[l].rows() != dims[l] || ms[l].cols() != dims[l]) {
        std::ostringstream os;
        os << name << "[" << l + 1 << "] has wrong shape";
        fail(os.str());
        continue;
      }
      RVec ev = hermitian_eigenvalues(ms[l]);
      if (ev.size() == 0 || ev(0) <= 0.0) {
        std::ostringstream os;
        os << name << "[" << l + 1 << "] must be Hermitian positive definite";
        fail(os.str());
      }
    }
  };
  check_pd(net.W, net.nr, "W");
  check_pd(net.What, net.nt, "W_hat");
  return out;
}

/// Reverse network: channels conjugate-transposed with indices swapped,
/// coupling transposed, physical roles of transmitters and receivers (and of
/// the constraint/noise matrices) exchanged.
inline Network reverse_network(const Network& net) {
  Network rev;
  rev.L = net.L;
  rev.nt = net.nr;
  rev.nr = net.nt;
  rev.H.assign(net.L, std::vector<CMat>(net.L));
  for (int l = 0; l < net.L; ++l)
    for (int k = 0; k < net.L; ++k) rev.H[l][k] = net.H[k][l].adjoint();
  rev.phi = net.phi.transpose();
  rev.weights = net.weights;
  rev.power = net.power;
  rev.tx_group = net.rx_group;
  rev.rx_group = net.tx_group;
  // The reverse noise covariance is the forward constraint matrix and vice
  // versa, so reversing twice is the identity.
  rev.W = net.What;
  rev.What = net.W;
  return rev;
}

}  // namespace netopt
