// Transportation simplex (northwest-corner start, u-v potentials, Bland's
// entering and leaving rules). The basis is always a spanning tree of the
// bipartite row/column graph with K + M - 1 cells, so plan entries are exact
// sums and differences of the marginal weights.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "sccs/ot_align.hpp"

namespace sccs::ot {

namespace {

struct Tree {
  std::size_t k_rows;
  std::size_t m_cols;
  std::vector<char> basic;  // K x M flags

  // Nodes 0..K-1 are rows, K..K+M-1 are columns.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(k_rows + m_cols);
    for (std::size_t k = 0; k < k_rows; ++k)
      for (std::size_t m = 0; m < m_cols; ++m)
        if (basic[k * m_cols + m]) {
          adj[k].push_back(k_rows + m);
          adj[k_rows + m].push_back(k);
        }
    return adj;
  }
};

// Cells on the tree path from row `row` to column `col`, listed from the
// column end back to the row end.
std::vector<std::size_t> tree_path(const Tree& tree, std::size_t row, std::size_t col) {
  const auto adj = tree.adjacency();
  const std::size_t n = tree.k_rows + tree.m_cols;
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n, none);
  std::queue<std::size_t> frontier;
  parent[row] = row;
  frontier.push(row);
  while (!frontier.empty()) {
    const std::size_t node = frontier.front();
    frontier.pop();
    for (std::size_t next : adj[node]) {
      if (parent[next] != none) continue;
      parent[next] = node;
      frontier.push(next);
    }
  }
  const std::size_t target = tree.k_rows + col;
  if (parent[target] == none) throw Error(ErrorCode::InvalidMatrix, "transportation basis is not a spanning tree");
  std::vector<std::size_t> cells;
  for (std::size_t node = target; node != row; node = parent[node]) {
    const std::size_t prev = parent[node];
    const std::size_t r = node < tree.k_rows ? node : prev;
    const std::size_t c = (node < tree.k_rows ? prev : node) - tree.k_rows;
    cells.push_back(r * tree.m_cols + c);
  }
  return cells;
}

}  // namespace

TransportPlan lp_oracle(const CostMatrix& cost, const MarginalPair& w) {
  const std::size_t k_rows = cost.rows();
  const std::size_t m_cols = cost.cols();
  if (k_rows == 0 || m_cols == 0) throw Error(ErrorCode::ZeroSize, "empty cost matrix");
  if (k_rows * m_cols > kLpOracleMaxCells) {
    throw Error(ErrorCode::TooLarge, std::to_string(k_rows) + "x" + std::to_string(m_cols) +
                                         " exceeds the " + std::to_string(kLpOracleMaxCells) +
                                         "-cell oracle limit");
  }
  for (double c : cost.data()) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteValue, "cost matrix entry");
  }
  validate_marginals(cost, w);

  Tree tree{k_rows, m_cols, std::vector<char>(k_rows * m_cols, 0)};
  std::vector<double> x(k_rows * m_cols, 0.0);

  // Northwest corner: K + M - 1 basic cells, degenerate zeros included.
  {
    std::vector<double> supply = w.mu, demand = w.nu;
    std::size_t i = 0, j = 0;
    for (;;) {
      const double amount = std::min(supply[i], demand[j]);
      x[i * m_cols + j] = amount;
      tree.basic[i * m_cols + j] = 1;
      supply[i] -= amount;
      demand[j] -= amount;
      if (i + 1 == k_rows && j + 1 == m_cols) break;
      if (j + 1 == m_cols || (i + 1 < k_rows && supply[i] <= demand[j])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  double cost_scale = 1.0;
  for (double c : cost.data()) cost_scale = std::max(cost_scale, std::abs(c));
  const double reduced_tol = 1e-13 * cost_scale;
  const std::size_t max_pivots = 100000;

  std::size_t pivots = 0;
  for (;; ++pivots) {
    if (pivots >= max_pivots) throw Error(ErrorCode::TooLarge, "transportation simplex did not terminate");

    // Potentials u_k + v_m = c_km on basic cells, u_0 = 0.
    const auto adj = tree.adjacency();
    std::vector<double> potential(k_rows + m_cols, 0.0);
    std::vector<char> seen(k_rows + m_cols, 0);
    std::queue<std::size_t> frontier;
    seen[0] = 1;
    frontier.push(0);
    while (!frontier.empty()) {
      const std::size_t node = frontier.front();
      frontier.pop();
      for (std::size_t next : adj[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        const std::size_t r = node < k_rows ? node : next;
        const std::size_t c = (node < k_rows ? next : node) - k_rows;
        potential[next] = cost(r, c) - potential[node];
        frontier.push(next);
      }
    }

    std::size_t entering = x.size();
    for (std::size_t cell = 0; cell < x.size(); ++cell) {
      if (tree.basic[cell]) continue;
      const std::size_t r = cell / m_cols, c = cell % m_cols;
      if (cost(r, c) - potential[r] - potential[k_rows + c] < -reduced_tol) {
        entering = cell;
        break;
      }
    }
    if (entering == x.size()) break;

    const std::size_t er = entering / m_cols, ec = entering % m_cols;
    const auto path = tree_path(tree, er, ec);
    // Signs along the cycle: entering +, then path cells -, +, -, ...
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = x.size();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const std::size_t cell = path[p];
      if (x[cell] < theta || (x[cell] == theta && cell < leaving)) {
        theta = x[cell];
        leaving = cell;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      if (p % 2 == 0) {
        x[path[p]] -= theta;
      } else {
        x[path[p]] += theta;
      }
    }
    x[entering] = theta;
    x[leaving] = 0.0;
    tree.basic[leaving] = 0;
    tree.basic[entering] = 1;
  }

  TransportPlan out;
  out.plan = Matrix(k_rows, m_cols, std::move(x));
  for (double& t : out.plan.data()) t = std::max(t, 0.0);
  out.distance = frobenius_dot(cost, out.plan);
  out.marginal_violation = marginal_residual(out.plan, w);
  out.iterations_used = pivots;
  out.converged = true;
  return out;
}

}  // namespace sccs::ot
