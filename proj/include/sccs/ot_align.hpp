#pragma once

#include <cstddef>
#include <vector>

#include "sccs/core_model.hpp"

namespace sccs::ot {

/// K x M cost matrix. Rows index visual items, columns index textual items.
using CostMatrix = Matrix;

/// Source (mu, length K) and target (nu, length M) weights. Both strictly
/// positive and summing to 1 within 1e-9.
struct MarginalPair {
  std::vector<double> mu;
  std::vector<double> nu;
};

struct TransportPlan {
  Matrix plan;                      // K x M, entries >= 0
  double distance = 0.0;            // <C, T>, regularization excluded
  std::size_t iterations_used = 0;
  double marginal_violation = 0.0;  // max |row/col sum - target|
  bool converged = false;           // marginal_violation <= tol
  bool log_domain = false;          // Sinkhorn ran with log-sum-exp updates
};

enum class SinkhornMode {
  Auto,       // kernel scaling, switching to log domain if exp(-C/lambda) underflows
  Kernel,     // kernel scaling only; underflow is an error
  LogDomain,  // log-sum-exp dual updates with lambda-annealing warm start
};

struct SolverConfig {
  double lambda = 0.1;          // entropic weight for sinkhorn_entropic
  double beta = 0.5;            // proximal kernel temperature for algorithm1_distance
  std::size_t outer_iters = 100;
  std::size_t inner_iters = 1;
  double tol = 1e-6;
  std::size_t max_iters = 10000;
  SinkhornMode sinkhorn_mode = SinkhornMode::Auto;
};

/// Throws InvalidConfig unless every parameter is positive and tol in (0, 1).
void validate_config(const SolverConfig& cfg);

/// C[k][m] = 1 - cos(V_k, E_m), clamped to [0, 2].
CostMatrix cosine_cost(const EmbeddingMatrix& visual, const EmbeddingMatrix& textual);

MarginalPair uniform_marginals(std::size_t k, std::size_t m);

/// Throws InvalidMarginals if sizes do not match the cost matrix or the
/// weights are not a strictly positive probability vector.
void validate_marginals(const CostMatrix& cost, const MarginalPair& w);

/// Entropic OT: min <T, C> + lambda * sum T log T over couplings of w.
/// The reported distance is <C, T> of the returned plan.
TransportPlan sinkhorn_entropic(const CostMatrix& cost, const MarginalPair& w,
                                const SolverConfig& cfg);

/// Proximal-point alignment distance with uniform weights:
///
///   C = cosine_cost(V, E), G = exp(-C / beta), sigma = 1/M, T = 1 1^T
///   repeat outer_iters times:
///     Q = G (.) T
///     repeat inner_iters times:
///       delta = 1 / (K Q sigma), sigma = 1 / (M Q^T delta)
///     T = diag(delta) Q diag(sigma)
///   distance = <C, T>
///
/// Runs exactly outer_iters x inner_iters scaling steps; `converged` reports
/// whether the final plan meets cfg.tol. Throws DivisionUnderflow if a
/// component of Q sigma or Q^T delta drops below the smallest normal double.
TransportPlan algorithm1_distance(const EmbeddingMatrix& visual, const EmbeddingMatrix& textual,
                                  const SolverConfig& cfg);

/// Same procedure on an explicit cost matrix.
TransportPlan algorithm1_from_cost(const CostMatrix& cost, const SolverConfig& cfg);

/// Exact solution of the unregularized transport LP by the transportation
/// simplex method. Limited to K * M <= 64.
TransportPlan lp_oracle(const CostMatrix& cost, const MarginalPair& w);

inline constexpr std::size_t kLpOracleMaxCells = 64;

/// Max-norm residual of the plan's row and column sums against w.
double marginal_residual(const Matrix& plan, const MarginalPair& w);

/// Frobenius inner product <C, T>.
double frobenius_dot(const Matrix& a, const Matrix& b);

enum class Solver { Sinkhorn, Algorithm1 };

/// Cost matrix and uniform-weight plan for one candidate pair.
TransportPlan solve_pair(const CandidatePair& pair, Solver solver, const SolverConfig& cfg);

/// Fills `distance` on every pair (optionally using `workers` threads) and
/// returns a copy of the pair with the smallest distance. Ties go to the
/// lowest (visual_segment_id, textual_segment_id). Throws EmptyCandidateSet.
CandidatePair select_best_pair(std::vector<CandidatePair>& pairs, Solver solver,
                               const SolverConfig& cfg, std::size_t workers = 1);

/// Index of the minimum-distance pair under the same tie-break. All pairs
/// must already carry a distance.
std::size_t argmin_pair(const std::vector<CandidatePair>& pairs);

}  // namespace sccs::ot
