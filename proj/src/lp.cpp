#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace calib {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uncapacitated min-cost flow via successive shortest paths. Every
// augmentation zeroes at least one supply or demand exactly, so the number
// of phases is bounded by the node count.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : n_(n), balance_(n, 0.0), head_(n) {}

  void add_supply(int node, double b) { balance_[node] += b; }

  void add_arc(int u, int v, double cost) {
    head_[u].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, v, cost, 0.0});
  }

  struct Solution {
    double cost = 0.0;
    std::vector<double> potential;
  };

  Solution solve() {
    potential_.assign(n_, 0.0);
    double scale = 0.0;
    for (double b : balance_) scale += std::abs(b);
    // Augmentations zero one endpoint exactly, but the other endpoint keeps
    // the float residue, so conservation holds only up to round-off.
    const double tol = 1e-12 * std::max(1.0, scale);
    double total_cost = 0.0;
    while (true) {
      int src = -1;
      for (int i = 0; i < n_; ++i)
        if (balance_[i] > tol) {
          src = i;
          break;
        }
      if (src < 0) break;
      dijkstra(src);
      int sink = -1;
      double best = kInf;
      for (int i = 0; i < n_; ++i)
        if (balance_[i] < 0.0 && dist_[i] < best) {
          best = dist_[i];
          sink = i;
        }
      if (sink < 0)
        fail(ErrorCode::SolverFailure, "min-cost flow: no reachable demand");

      double amount = std::min(balance_[src], -balance_[sink]);
      for (int node = sink; node != src;) {
        const int a = parent_arc_[node];
        if (parent_dir_[node] > 0) {
          node = arcs_[a].u;
        } else {
          amount = std::min(amount, arcs_[a].flow);
          node = arcs_[a].v;
        }
      }
      for (int node = sink; node != src;) {
        const int a = parent_arc_[node];
        if (parent_dir_[node] > 0) {
          arcs_[a].flow += amount;
          total_cost += amount * arcs_[a].cost;
          node = arcs_[a].u;
        } else {
          arcs_[a].flow -= amount;
          total_cost -= amount * arcs_[a].cost;
          node = arcs_[a].v;
        }
      }
      balance_[src] -= amount;
      balance_[sink] += amount;
      if (amount == 0.0)
        fail(ErrorCode::SolverFailure, "min-cost flow: zero augmentation");
      for (int i = 0; i < n_; ++i)
        if (dist_[i] < kInf) potential_[i] += dist_[i];
    }
    return Solution{total_cost, potential_};
  }

 private:
  struct Arc {
    int u, v;
    double cost;
    double flow;
  };

  void dijkstra(int src) {
    dist_.assign(n_, kInf);
    parent_arc_.assign(n_, -1);
    parent_dir_.assign(n_, 0);
    done_.assign(n_, false);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist_[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done_[u]) continue;
      done_[u] = true;
      for (int a : head_[u]) {
        const Arc& arc = arcs_[a];
        const double rc =
            std::max(0.0, arc.cost + potential_[u] - potential_[arc.v]);
        relax(arc.v, d + rc, a, +1, pq);
      }
      for (int a : rev_head(u)) {
        const Arc& arc = arcs_[a];
        if (arc.flow <= 0.0) continue;
        const double rc =
            std::max(0.0, -arc.cost + potential_[u] - potential_[arc.u]);
        relax(arc.u, d + rc, a, -1, pq);
      }
    }
  }

  template <class PQ>
  void relax(int v, double nd, int arc, int dir, PQ& pq) {
    if (nd < dist_[v]) {
      dist_[v] = nd;
      parent_arc_[v] = arc;
      parent_dir_[v] = dir;
      pq.push({nd, v});
    }
  }

  // Reverse adjacency, built lazily once arcs are final.
  const std::vector<int>& rev_head(int u) {
    if (rev_head_.empty()) {
      rev_head_.resize(n_);
      for (size_t a = 0; a < arcs_.size(); ++a)
        rev_head_[arcs_[a].v].push_back(static_cast<int>(a));
    }
    return rev_head_[u];
  }

  int n_;
  std::vector<double> balance_;
  std::vector<std::vector<int>> head_;
  std::vector<std::vector<int>> rev_head_;
  std::vector<Arc> arcs_;
  std::vector<double> potential_, dist_;
  std::vector<int> parent_arc_, parent_dir_;
  std::vector<bool> done_;
};

LipschitzLpResult finish(MinCostFlow& flow, int n, const std::vector<double>& c) {
  auto sol = flow.solve();
  LipschitzLpResult res;
  res.value = sol.cost;
  res.h.resize(n);
  // Dual of the flow: h_i = pi_bank - pi_i, with the bank pinned at 0. Bank
  // arcs in both directions force |h| <= 1 up to round-off.
  const double base = sol.potential[n];
  double check = 0.0;
  for (int i = 0; i < n; ++i) {
    res.h[i] = std::clamp(base - sol.potential[i], -1.0, 1.0);
    check += c[i] * res.h[i];
  }
  if (std::abs(check - res.value) > 1e-7 * (1.0 + std::abs(res.value)))
    fail(ErrorCode::SolverFailure, "flow/dual objective mismatch");
  return res;
}

}  // namespace

LipschitzLpResult lipschitz_lp_line(const std::vector<double>& t,
                                    const std::vector<double>& c) {
  const int n = static_cast<int>(t.size());
  if (n == 0) return {};
  for (int i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1]))
      fail(ErrorCode::SolverFailure, "line LP positions not increasing");

  MinCostFlow flow(n + 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    flow.add_supply(i, c[i]);
    sum += c[i];
  }
  flow.add_supply(n, -sum);
  for (int i = 0; i + 1 < n; ++i) {
    flow.add_arc(i, i + 1, t[i + 1] - t[i]);
    flow.add_arc(i + 1, i, t[i + 1] - t[i]);
  }
  for (int i = 0; i < n; ++i) {
    flow.add_arc(i, n, 1.0);
    flow.add_arc(n, i, 1.0);
  }
  return finish(flow, n, c);
}

LipschitzLpResult lipschitz_lp_metric(
    const std::vector<std::vector<double>>& dist, const std::vector<double>& c) {
  const int n = static_cast<int>(dist.size());
  if (n == 0) return {};

  MinCostFlow flow(n + 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    flow.add_supply(i, c[i]);
    sum += c[i];
  }
  flow.add_supply(n, -sum);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) flow.add_arc(i, j, dist[i][j]);
  for (int i = 0; i < n; ++i) {
    flow.add_arc(i, n, 1.0);
    flow.add_arc(n, i, 1.0);
  }
  return finish(flow, n, c);
}

// Tableau simplex (KACTL-style) for tiny dense LPs.
namespace {

class SmallSimplex {
 public:
  SmallSimplex(const std::vector<std::vector<double>>& A,
               const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        N_(n_ + 1),
        B_(m_),
        D_(m_ + 2, std::vector<double>(n_ + 2)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) D_[i][j] = A[i][j];
    for (int i = 0; i < m_; ++i) {
      B_[i] = n_ + i;
      D_[i][n_] = -1;
      D_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      N_[j] = j;
      D_[m_][j] = -c[j];
    }
    N_[n_] = -1;
    D_[m_ + 1][n_] = 1;
  }

  double solve(std::vector<double>& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_[i][n_ + 1] < D_[r][n_ + 1]) r = i;
    if (D_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!simplex(2) || D_[m_ + 1][n_ + 1] < -kEps) return -kInf;
      for (int i = 0; i < m_; ++i)
        if (B_[i] == -1) {
          int s = 0;
          for (int j = 1; j <= n_; ++j)
            if (less_col(D_[i], j, s)) s = j;
          pivot(i, s);
        }
    }
    bool ok = simplex(1);
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (B_[i] < n_) x[B_[i]] = D_[i][n_ + 1];
    return ok ? D_[m_][n_ + 1] : kInf;
  }

 private:
  static constexpr double kEps = 1e-9;

  bool less_col(const std::vector<double>& row, int j, int s) const {
    return s == -1 || std::make_pair(row[j], N_[j]) <
                          std::make_pair(row[s], N_[s]);
  }

  void pivot(int r, int s) {
    auto& a = D_;
    double inv = 1.0 / a[r][s];
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r && std::abs(a[i][s]) > kEps) {
        double inv2 = a[i][s] * inv;
        for (int j = 0; j < n_ + 2; ++j) a[i][j] -= a[r][j] * inv2;
        a[i][s] = a[r][s] * inv2;
      }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) a[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) a[i][s] *= -inv;
    a[r][s] = inv;
    std::swap(B_[r], N_[s]);
  }

  bool simplex(int phase) {
    int x = m_ + phase - 1;
    // Steepest-edge style column choice can cycle on degenerate tableaus;
    // after a pivot budget, fall back to Bland's rule, which terminates.
    const long bland_after = 32L * (m_ + n_ + 2);
    long pivots = 0;
    while (true) {
      int s = -1;
      if (pivots++ < bland_after) {
        for (int j = 0; j <= n_; ++j) {
          if (phase == 1 && N_[j] == -1) continue;  // artificial stays out
          if (less_col(D_[x], j, s)) s = j;
        }
        if (D_[x][s] >= -kEps) return true;
      } else {
        for (int j = 0; j <= n_; ++j) {
          if (phase == 1 && N_[j] == -1) continue;
          if (D_[x][j] < -kEps && (s == -1 || N_[j] < N_[s])) s = j;
        }
        if (s == -1) return true;
      }
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_[i][s] <= kEps) continue;
        if (r == -1 ||
            std::make_pair(D_[i][n_ + 1] / D_[i][s], B_[i]) <
                std::make_pair(D_[r][n_ + 1] / D_[r][s], B_[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> N_, B_;
  std::vector<std::vector<double>> D_;
};

}  // namespace

double small_lp_maximize(const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b,
                         const std::vector<double>& c, std::vector<double>& x) {
  SmallSimplex lp(A, b, c);
  return lp.solve(x);
}

}  // namespace calib
