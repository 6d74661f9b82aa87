// Interference-tree (iTree) classification and encode/decode order rules.
//
// A network is an iTree when its interference graph is acyclic; equivalently
// the links can be relabeled so that no link is interfered by links with
// smaller or equal indices (phi(l, k) = 0 for all k <= l).  itree_index finds
// such a relabeling by repeatedly peeling a node all of whose remaining edges
// are incoming, i.e. a link that causes interference to no unremoved link.
//
// assign_orders implements the closed-form order rule for link groups on a
// shared physical node: when a transmitter group's coupling columns agree
// outside the group (a "pseudo broadcast" transmitter), the n-th largest
// weight is encoded n-th; when a receiver group's rows agree outside the
// group (a "pseudo multiaccess" receiver), the n-th smallest weight is
// decoded n-th.

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "netopt/network.hpp"

namespace netopt {

/// True when phi already satisfies the iTree labeling phi(l, k) = 0 for all
/// k <= l (no link interfered by smaller-or-equal indices).
inline bool is_itree_indexed(const Eigen::MatrixXi& phi) {
  for (int l = 0; l < phi.rows(); ++l)
    for (int k = 0; k <= l; ++k)
      if (phi(l, k) != 0) return false;
  return true;
}

/// Peel-based iTree indexing.  Returns a permutation perm with perm[pos] =
/// original link index (0-based) such that the relabeled coupling
/// phi'(l, k) = phi(perm[l], perm[k]) satisfies phi'(l, k) = 0 for k <= l,
/// or nullopt when the interference graph has a directed cycle.  Among
/// removable nodes the lowest original index is taken, so the result is
/// deterministic.
inline std::optional<std::vector<int>> itree_index(const Network& net) {
  const int n = net.L;
  std::vector<bool> removed(n, false);
  std::vector<int> perm;
  perm.reserve(n);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int u = 0; u < n && pick < 0; ++u) {
      if (removed[u]) continue;
      bool interferes_someone = false;
      for (int v = 0; v < n; ++v)
        if (!removed[v] && net.phi(v, u) == 1) {
          interferes_someone = true;
          break;
        }
      if (!interferes_someone) pick = u;
    }
    if (pick < 0) return std::nullopt;  // every remaining node is on a cycle
    removed[pick] = true;
    perm.push_back(pick);
  }
  return perm;
}

/// Relabel a coupling matrix by a permutation (perm[pos] = original index).
inline Eigen::MatrixXi permute_phi(const Eigen::MatrixXi& phi,
                                   const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  Eigen::MatrixXi out(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) out(l, k) = phi(perm[l], perm[k]);
  return out;
}

/// Ordering report for one physical-node link group.
struct GroupOrder {
  enum class Kind { pseudo_bc, pseudo_mac, not_pseudo };
  Kind kind = Kind::not_pseudo;
  bool transmitter = true;     // true: shared transmitter, false: shared receiver
  std::vector<int> links;      // group members, original 0-based link indices
  std::vector<int> order;      // processing sequence (encode or decode)
  Eigen::MatrixXi phi_block;   // implied coupling among `links`, in `links` order
};

namespace detail {

/// Sub-block coupling implied by a processing order: with cancellation, a
/// link processed later is never interfered by one processed earlier, while
/// earlier links still see the later signals.
inline Eigen::MatrixXi implied_block(const std::vector<int>& links,
                                     const std::vector<int>& order) {
  const int n = static_cast<int>(links.size());
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) {
    auto it = std::find(links.begin(), links.end(), order[p]);
    pos[static_cast<int>(it - links.begin())] = p;
  }
  Eigen::MatrixXi block = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && pos[i] < pos[j]) block(i, j) = 1;
  return block;
}

}  // namespace detail

/// Order one group of links sharing a physical transmitter (transmitter=true)
/// or receiver (transmitter=false).  Non-qualifying groups are reported with
/// kind = not_pseudo and no order.  Throws std::out_of_range for bad indices.
inline GroupOrder assign_order_for_group(const Network& net,
                                         std::vector<int> links,
                                         bool transmitter) {
  GroupOrder out;
  out.transmitter = transmitter;
  for (int l : links)
    if (l < 0 || l >= net.L)
      throw std::out_of_range("assign_orders: link index out of range");
  std::sort(links.begin(), links.end());
  out.links = links;
  const int n = static_cast<int>(links.size());
  std::vector<bool> in_group(net.L, false);
  for (int l : links) in_group[l] = true;
  // Pseudo property: coupling columns (transmitter group) or rows (receiver
  // group) restricted to indices outside the group must coincide.
  bool pseudo = true;
  for (int outside = 0; outside < net.L && pseudo; ++outside) {
    if (in_group[outside]) continue;
    for (int j = 1; j < n && pseudo; ++j) {
      int a = transmitter ? net.phi(outside, links[0]) : net.phi(links[0], outside);
      int b = transmitter ? net.phi(outside, links[j]) : net.phi(links[j], outside);
      if (a != b) pseudo = false;
    }
  }
  if (!pseudo) {
    out.kind = GroupOrder::Kind::not_pseudo;
    return out;
  }
  out.kind = transmitter ? GroupOrder::Kind::pseudo_bc : GroupOrder::Kind::pseudo_mac;
  out.order = links;
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    // Encode largest weight first (transmitter) / decode smallest first
    // (receiver); ties keep ascending link index via stable sort.
    return transmitter ? net.weights[a] > net.weights[b]
                       : net.weights[a] < net.weights[b];
  });
  out.phi_block = detail::implied_block(out.links, out.order);
  return out;
}

/// Order every multi-link physical node in the network (from tx_group /
/// rx_group).  Singleton groups get the trivial identity order.
inline std::vector<GroupOrder> assign_orders(const Network& net) {
  std::vector<GroupOrder> out;
  auto sweep = [&](const std::vector<int>& group_of, bool transmitter) {
    std::vector<int> seen;
    for (int l = 0; l < net.L; ++l) {
      if (std::find(seen.begin(), seen.end(), group_of[l]) != seen.end())
        continue;
      seen.push_back(group_of[l]);
      std::vector<int> members;
      for (int k = 0; k < net.L; ++k)
        if (group_of[k] == group_of[l]) members.push_back(k);
      out.push_back(assign_order_for_group(net, members, transmitter));
    }
  };
  Network tmp = net;
  ensure_groups(tmp);
  sweep(tmp.tx_group, true);
  sweep(tmp.rx_group, false);
  return out;
}

/// Overwrite the coupling entries inside every pseudo group with the
/// weight-derived cancellation order; non-pseudo groups are left untouched.
/// Returns the group diagnostics so callers can inspect what was applied.
inline std::vector<GroupOrder> apply_orders(Network& net) {
  std::vector<GroupOrder> orders = assign_orders(net);
  for (const GroupOrder& g : orders) {
    if (g.kind == GroupOrder::Kind::not_pseudo || g.links.size() < 2) continue;
    const int n = static_cast<int>(g.links.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) net.phi(g.links[i], g.links[j]) = g.phi_block(i, j);
  }
  return orders;
}

}  // namespace netopt
