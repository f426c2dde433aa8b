#pragma once

// Primal network simplex for the uncapacitated transportation problem
//
//   min Σ c(i,j) f(i,j)   s.t.  Σ_i f(i,j) = supply      (every point j)
//                               Σ_j f(i,j) = demand_i    (every cluster i)
//
// with integer flows.  Arc costs are produced on demand by a callable, so the
// n*k arc set is never stored.  The spanning-tree basis hangs off an
// artificial root connected to every node by a big-M arc; anti-cycling uses
// strongly feasible trees (the leaving arc is the last blocking arc of the
// pivot cycle in its orientation from the apex).  Entering arcs are picked by
// block search over the fixed arc order (cluster-major, then point), which is
// deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rescore::detail {

template <typename Cost, typename CostFn>
class TransportSimplex {
 public:
  struct Arc {
    std::uint32_t cluster;
    std::uint64_t point;
    std::int64_t flow;
  };

  TransportSimplex(std::uint64_t points, std::size_t clusters, std::int64_t supply, std::vector<std::int64_t> demand,
                   CostFn cost, Cost max_cost, Cost tolerance)
      : n_(points),
        k_(clusters),
        supply_(supply),
        demand_(std::move(demand)),
        cost_(std::move(cost)),
        tolerance_(tolerance) {
    num_real_ = n_ * k_;
    num_nodes_ = n_ + k_ + 1;
    root_ = n_ + k_;
    // Any path in the tree carries at most num_nodes real arcs, so this M
    // dominates every combination of real costs.
    artificial_cost_ = static_cast<Cost>(num_nodes_) * (max_cost + Cost(1)) + Cost(1);
  }

  /// Runs to optimality; throws std::runtime_error if the pivot budget is
  /// exhausted or the problem turns out infeasible.
  void run() {
    init_tree();
    const std::uint64_t total_arcs = num_real_ + n_ + k_;
    block_ = std::max<std::uint64_t>(static_cast<std::uint64_t>(std::sqrt(static_cast<double>(total_arcs))), 10);
    const std::uint64_t budget = 64 * total_arcs + 1'000'000;
    while (true) {
      const std::uint64_t entering = find_entering();
      if (entering == kNone) break;
      pivot(entering);
      if (++pivots_ > budget) throw std::runtime_error("network simplex exceeded its pivot budget");
    }
    for (std::uint64_t v = 0; v < root_; ++v) {
      if (pred_[v] >= num_real_ && flow_[v] != 0) throw std::runtime_error("transportation problem is infeasible");
    }
  }

  /// Basic real arcs with positive flow, sorted by (point, cluster).
  std::vector<Arc> support() const {
    std::vector<Arc> arcs;
    for (std::uint64_t v = 0; v < root_; ++v) {
      const std::uint64_t a = pred_[v];
      if (a < num_real_ && flow_[v] > 0) {
        arcs.push_back({static_cast<std::uint32_t>(a / n_), a % n_, flow_[v]});
      }
    }
    std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
      return x.point != y.point ? x.point < y.point : x.cluster < y.cluster;
    });
    return arcs;
  }

  std::uint64_t pivots() const { return pivots_; }

 private:
  static constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

  // Node numbering: points 0..n-1, clusters n..n+k-1, root n+k.
  // Real arc a = i*n + j runs point j -> cluster i.  Artificial arc
  // num_real + v joins node v and the root (v -> root for points,
  // root -> v for clusters).
  std::uint64_t tail(std::uint64_t a) const {
    if (a < num_real_) return a % n_;
    const std::uint64_t v = a - num_real_;
    return v < n_ ? v : root_;
  }
  std::uint64_t head(std::uint64_t a) const {
    if (a < num_real_) return n_ + a / n_;
    const std::uint64_t v = a - num_real_;
    return v < n_ ? root_ : v;
  }
  Cost arc_cost(std::uint64_t a) const {
    if (a < num_real_) return cost_(a / n_, a % n_);
    return artificial_cost_;
  }
  Cost reduced_cost(std::uint64_t a) const { return arc_cost(a) + potential_[tail(a)] - potential_[head(a)]; }

  void init_tree() {
    parent_.assign(num_nodes_, kNone);
    pred_.assign(num_nodes_, kNone);
    flow_.assign(num_nodes_, 0);
    potential_.assign(num_nodes_, Cost(0));
    depth_.assign(num_nodes_, 0);
    first_child_.assign(num_nodes_, kNone);
    next_sibling_.assign(num_nodes_, kNone);
    prev_sibling_.assign(num_nodes_, kNone);

    for (std::uint64_t v = 0; v < root_; ++v) {
      pred_[v] = num_real_ + v;
      depth_[v] = 1;
      if (v < n_) {
        flow_[v] = supply_;
        potential_[v] = -artificial_cost_;
      } else {
        flow_[v] = demand_[v - n_];
        potential_[v] = artificial_cost_;
      }
      attach(v, root_);
    }
  }

  void attach(std::uint64_t child, std::uint64_t parent) {
    parent_[child] = parent;
    prev_sibling_[child] = kNone;
    next_sibling_[child] = first_child_[parent];
    if (first_child_[parent] != kNone) prev_sibling_[first_child_[parent]] = child;
    first_child_[parent] = child;
  }

  void detach(std::uint64_t child) {
    const std::uint64_t parent = parent_[child];
    if (prev_sibling_[child] != kNone) {
      next_sibling_[prev_sibling_[child]] = next_sibling_[child];
    } else {
      first_child_[parent] = next_sibling_[child];
    }
    if (next_sibling_[child] != kNone) prev_sibling_[next_sibling_[child]] = prev_sibling_[child];
    parent_[child] = kNone;
    next_sibling_[child] = prev_sibling_[child] = kNone;
  }

  std::uint64_t find_entering() {
    const std::uint64_t total = num_real_ + n_ + k_;
    Cost best = -tolerance_;
    std::uint64_t best_arc = kNone;
    std::uint64_t remaining = block_;
    for (std::uint64_t step = 0; step < total; ++step) {
      const std::uint64_t a = next_arc_ + step < total ? next_arc_ + step : next_arc_ + step - total;
      const Cost rc = reduced_cost(a);
      if (rc < best) {
        best = rc;
        best_arc = a;
      }
      if (--remaining == 0) {
        if (best_arc != kNone) {
          next_arc_ = a + 1 < total ? a + 1 : 0;
          return best_arc;
        }
        remaining = block_;
      }
    }
    return best_arc;
  }

  void pivot(std::uint64_t entering) {
    const std::uint64_t u = tail(entering);
    const std::uint64_t v = head(entering);

    std::uint64_t a = u, b = v;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const std::uint64_t join = a;

    // Flow pushed along entering arc u -> v returns v -> join -> u.
    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    std::uint64_t leaving = kNone;
    bool leaving_on_u_side = false;
    for (std::uint64_t x = u; x != join; x = parent_[x]) {
      // traversed parent -> x; decreases when the arc points x -> parent
      if (tail(pred_[x]) == x && flow_[x] < delta) {
        delta = flow_[x];
        leaving = x;
        leaving_on_u_side = true;
      }
    }
    for (std::uint64_t x = v; x != join; x = parent_[x]) {
      // traversed x -> parent; decreases when the arc points parent -> x
      if (tail(pred_[x]) != x && flow_[x] <= delta) {
        delta = flow_[x];
        leaving = x;
        leaving_on_u_side = false;
      }
    }
    if (leaving == kNone) throw std::runtime_error("unbounded pivot cycle");

    if (delta > 0) {
      for (std::uint64_t x = u; x != join; x = parent_[x]) flow_[x] += tail(pred_[x]) == x ? -delta : delta;
      for (std::uint64_t x = v; x != join; x = parent_[x]) flow_[x] += tail(pred_[x]) == x ? delta : -delta;
    }

    const std::uint64_t in_node = leaving_on_u_side ? u : v;
    const std::uint64_t other = leaving_on_u_side ? v : u;

    // Reverse the path in_node -> ... -> leaving so that in_node becomes
    // the root of the detached subtree, then hang it below `other`.
    path_.clear();
    for (std::uint64_t x = in_node;; x = parent_[x]) {
      path_.push_back(x);
      if (x == leaving) break;
    }
    saved_pred_.resize(path_.size());
    saved_flow_.resize(path_.size());
    for (std::size_t t = 0; t < path_.size(); ++t) {
      saved_pred_[t] = pred_[path_[t]];
      saved_flow_[t] = flow_[path_[t]];
    }
    for (std::uint64_t x : path_) detach(x);
    for (std::size_t t = 0; t + 1 < path_.size(); ++t) {
      const std::uint64_t child = path_[t + 1];
      pred_[child] = saved_pred_[t];
      flow_[child] = saved_flow_[t];
      attach(child, path_[t]);
    }
    pred_[in_node] = entering;
    flow_[in_node] = delta;
    attach(in_node, other);

    // Reduced cost of the entering arc becomes zero: every potential in the
    // moved subtree shifts by the same amount.
    const Cost rc = reduced_cost(entering);
    const Cost shift = in_node == v ? rc : -rc;
    stack_.clear();
    stack_.push_back(in_node);
    while (!stack_.empty()) {
      const std::uint64_t x = stack_.back();
      stack_.pop_back();
      potential_[x] += shift;
      depth_[x] = depth_[parent_[x]] + 1;
      for (std::uint64_t c = first_child_[x]; c != kNone; c = next_sibling_[c]) stack_.push_back(c);
    }
  }

  std::uint64_t n_;
  std::size_t k_;
  std::int64_t supply_;
  std::vector<std::int64_t> demand_;
  CostFn cost_;
  Cost tolerance_;
  Cost artificial_cost_{};
  std::uint64_t num_real_ = 0, num_nodes_ = 0, root_ = 0;
  std::uint64_t block_ = 10, next_arc_ = 0, pivots_ = 0;

  std::vector<std::uint64_t> parent_, pred_, depth_, first_child_, next_sibling_, prev_sibling_;
  std::vector<std::int64_t> flow_;
  std::vector<Cost> potential_;
  std::vector<std::uint64_t> path_, stack_, saved_pred_;
  std::vector<std::int64_t> saved_flow_;
};

}  // namespace rescore::detail
