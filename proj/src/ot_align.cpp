#include "sccs/ot_align.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace sccs::ot {

namespace {

constexpr double kMarginalSumTolerance = 1e-9;
constexpr double kTiny = std::numeric_limits<double>::min();

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double log_sum_exp(std::span<const double> xs) {
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

void finish_plan(TransportPlan& out, const CostMatrix& cost, const MarginalPair& w, double tol) {
  for (double& t : out.plan.data()) t = std::max(t, 0.0);
  out.distance = frobenius_dot(cost, out.plan);
  out.marginal_violation = marginal_residual(out.plan, w);
  out.converged = out.marginal_violation <= tol;
}

void check_cost(const CostMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) throw Error(ErrorCode::ZeroSize, "empty cost matrix");
  for (double c : cost.data()) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteValue, "cost matrix entry");
  }
}

// Kernel-scaling Sinkhorn. Returns false (without touching `out`) when the
// Gibbs kernel underflows.
bool sinkhorn_kernel(const CostMatrix& cost, const MarginalPair& w, const SolverConfig& cfg,
                     TransportPlan& out) {
  const std::size_t k_rows = cost.rows();
  const std::size_t m_cols = cost.cols();
  Matrix kernel(k_rows, m_cols);
  for (std::size_t i = 0; i < cost.data().size(); ++i) {
    const double g = std::exp(-cost.data()[i] / cfg.lambda);
    if (g < kTiny) return false;
    kernel.data()[i] = g;
  }

  std::vector<double> u(k_rows, 1.0), v(m_cols, 1.0), kv(k_rows), ktu(m_cols);
  auto apply_kernel = [&] {
    for (std::size_t k = 0; k < k_rows; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < m_cols; ++m) s += kernel(k, m) * v[m];
      kv[k] = s;
    }
  };

  std::size_t iter = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (iter < cfg.max_iters) {
    apply_kernel();
    for (std::size_t k = 0; k < k_rows; ++k) {
      if (kv[k] < kTiny) return false;
      u[k] = w.mu[k] / kv[k];
    }
    std::fill(ktu.begin(), ktu.end(), 0.0);
    for (std::size_t k = 0; k < k_rows; ++k)
      for (std::size_t m = 0; m < m_cols; ++m) ktu[m] += kernel(k, m) * u[k];
    for (std::size_t m = 0; m < m_cols; ++m) {
      if (ktu[m] < kTiny) return false;
      v[m] = w.nu[m] / ktu[m];
    }
    ++iter;
    // Columns are exact after the v-update; rows carry the residual.
    apply_kernel();
    residual = 0.0;
    for (std::size_t k = 0; k < k_rows; ++k)
      residual = std::max(residual, std::abs(u[k] * kv[k] - w.mu[k]));
    if (residual <= cfg.tol) break;
  }

  out.plan = Matrix(k_rows, m_cols);
  for (std::size_t k = 0; k < k_rows; ++k)
    for (std::size_t m = 0; m < m_cols; ++m) out.plan(k, m) = u[k] * kernel(k, m) * v[m];
  out.iterations_used = iter;
  out.log_domain = false;
  return true;
}

// Log-domain Sinkhorn on dual potentials (f, g), warm-started by annealing
// lambda down from the cost scale by factors of 10.
void sinkhorn_log(const CostMatrix& cost, const MarginalPair& w, const SolverConfig& cfg,
                  TransportPlan& out) {
  const std::size_t k_rows = cost.rows();
  const std::size_t m_cols = cost.cols();
  std::vector<double> f(k_rows, 0.0), g(m_cols, 0.0);
  std::vector<double> log_mu(k_rows), log_nu(m_cols);
  for (std::size_t k = 0; k < k_rows; ++k) log_mu[k] = std::log(w.mu[k]);
  for (std::size_t m = 0; m < m_cols; ++m) log_nu[m] = std::log(w.nu[m]);

  std::vector<double> schedule;
  const double cost_scale = *std::max_element(cost.data().begin(), cost.data().end());
  for (double eps = cost_scale; eps > cfg.lambda * 10.0; eps *= 0.1) schedule.push_back(eps);
  schedule.push_back(cfg.lambda);

  std::vector<double> scratch(std::max(k_rows, m_cols));
  auto row_residual = [&](double eps) {
    double r = 0.0;
    for (std::size_t k = 0; k < k_rows; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < m_cols; ++m) s += std::exp((f[k] + g[m] - cost(k, m)) / eps);
      r = std::max(r, std::abs(s - w.mu[k]));
    }
    return r;
  };

  std::size_t total_iters = 0;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    const bool final_stage = stage + 1 == schedule.size();
    const std::size_t cap = final_stage ? cfg.max_iters : std::max<std::size_t>(1, cfg.max_iters / 10);
    const double stage_tol = final_stage ? cfg.tol : std::max(cfg.tol, 1e-4);
    for (std::size_t it = 0; it < cap; ++it) {
      for (std::size_t k = 0; k < k_rows; ++k) {
        for (std::size_t m = 0; m < m_cols; ++m) scratch[m] = (g[m] - cost(k, m)) / eps;
        f[k] = eps * (log_mu[k] - log_sum_exp({scratch.data(), m_cols}));
      }
      for (std::size_t m = 0; m < m_cols; ++m) {
        for (std::size_t k = 0; k < k_rows; ++k) scratch[k] = (f[k] - cost(k, m)) / eps;
        g[m] = eps * (log_nu[m] - log_sum_exp({scratch.data(), k_rows}));
      }
      ++total_iters;
      if (row_residual(eps) <= stage_tol) break;
    }
  }

  out.plan = Matrix(k_rows, m_cols);
  for (std::size_t k = 0; k < k_rows; ++k)
    for (std::size_t m = 0; m < m_cols; ++m)
      out.plan(k, m) = std::exp((f[k] + g[m] - cost(k, m)) / cfg.lambda);
  out.iterations_used = total_iters;
  out.log_domain = true;
}

}  // namespace

void validate_config(const SolverConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) bad("lambda must be > 0");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) bad("beta must be > 0");
  if (cfg.outer_iters == 0) bad("outer_iters must be >= 1");
  if (cfg.inner_iters == 0) bad("inner_iters must be >= 1");
  if (cfg.max_iters == 0) bad("max_iters must be >= 1");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) bad("tol must lie in (0, 1)");
}

CostMatrix cosine_cost(const EmbeddingMatrix& visual, const EmbeddingMatrix& textual) {
  if (visual.dims() != textual.dims()) {
    throw Error(ErrorCode::DimMismatch, "visual dims " + std::to_string(visual.dims()) +
                                            " vs textual dims " + std::to_string(textual.dims()));
  }
  std::vector<double> vnorm(visual.rows()), enorm(textual.rows());
  for (std::size_t k = 0; k < visual.rows(); ++k) {
    vnorm[k] = norm(visual.row(k));
    if (vnorm[k] == 0.0) throw Error(ErrorCode::ZeroNormRow, "visual row " + std::to_string(k));
  }
  for (std::size_t m = 0; m < textual.rows(); ++m) {
    enorm[m] = norm(textual.row(m));
    if (enorm[m] == 0.0) throw Error(ErrorCode::ZeroNormRow, "textual row " + std::to_string(m));
  }
  CostMatrix cost(visual.rows(), textual.rows());
  for (std::size_t k = 0; k < visual.rows(); ++k) {
    const auto v = visual.row(k);
    for (std::size_t m = 0; m < textual.rows(); ++m) {
      const auto e = textual.row(m);
      double dot = 0.0;
      for (std::size_t d = 0; d < v.size(); ++d) dot += static_cast<double>(v[d]) * e[d];
      cost(k, m) = std::clamp(1.0 - dot / (vnorm[k] * enorm[m]), 0.0, 2.0);
    }
  }
  return cost;
}

MarginalPair uniform_marginals(std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) {
    throw Error(ErrorCode::ZeroSize, "uniform marginals need K, M >= 1 (got " +
                                         std::to_string(k) + ", " + std::to_string(m) + ")");
  }
  return {std::vector<double>(k, 1.0 / static_cast<double>(k)),
          std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

void validate_marginals(const CostMatrix& cost, const MarginalPair& w) {
  if (w.mu.size() != cost.rows() || w.nu.size() != cost.cols()) {
    throw Error(ErrorCode::InvalidMarginals, "marginal sizes do not match the cost matrix");
  }
  for (const auto* side : {&w.mu, &w.nu}) {
    double sum = 0.0;
    for (double x : *side) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::InvalidMarginals, "weights must be strictly positive");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kMarginalSumTolerance) {
      throw Error(ErrorCode::InvalidMarginals, "weights sum to " + std::to_string(sum));
    }
  }
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimMismatch, "frobenius_dot shape mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

double marginal_residual(const Matrix& plan, const MarginalPair& w) {
  double r = 0.0;
  for (std::size_t k = 0; k < plan.rows(); ++k) {
    double s = 0.0;
    for (std::size_t m = 0; m < plan.cols(); ++m) s += plan(k, m);
    r = std::max(r, std::abs(s - w.mu[k]));
  }
  for (std::size_t m = 0; m < plan.cols(); ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < plan.rows(); ++k) s += plan(k, m);
    r = std::max(r, std::abs(s - w.nu[m]));
  }
  return r;
}

TransportPlan sinkhorn_entropic(const CostMatrix& cost, const MarginalPair& w,
                                const SolverConfig& cfg) {
  validate_config(cfg);
  check_cost(cost);
  validate_marginals(cost, w);

  TransportPlan out;
  switch (cfg.sinkhorn_mode) {
    case SinkhornMode::Kernel:
      if (!sinkhorn_kernel(cost, w, cfg, out)) {
        throw Error(ErrorCode::NumericalUnderflow,
                    "Gibbs kernel exp(-C/lambda) underflowed at lambda = " +
                        std::to_string(cfg.lambda) + "; use the log-domain mode");
      }
      break;
    case SinkhornMode::Auto:
      if (!sinkhorn_kernel(cost, w, cfg, out)) sinkhorn_log(cost, w, cfg, out);
      break;
    case SinkhornMode::LogDomain:
      sinkhorn_log(cost, w, cfg, out);
      break;
  }
  finish_plan(out, cost, w, cfg.tol);
  return out;
}

TransportPlan algorithm1_from_cost(const CostMatrix& cost, const SolverConfig& cfg) {
  validate_config(cfg);
  check_cost(cost);
  const std::size_t k_rows = cost.rows();
  const std::size_t m_cols = cost.cols();
  const double k_count = static_cast<double>(k_rows);
  const double m_count = static_cast<double>(m_cols);

  Matrix kernel(k_rows, m_cols);
  for (std::size_t i = 0; i < cost.data().size(); ++i) kernel.data()[i] = std::exp(-cost.data()[i] / cfg.beta);

  std::vector<double> sigma(m_cols, 1.0 / m_count);
  std::vector<double> delta(k_rows, 0.0);
  Matrix plan(k_rows, m_cols, 1.0);
  Matrix q(k_rows, m_cols);

  for (std::size_t t = 0; t < cfg.outer_iters; ++t) {
    for (std::size_t i = 0; i < q.data().size(); ++i) q.data()[i] = kernel.data()[i] * plan.data()[i];
    for (std::size_t l = 0; l < cfg.inner_iters; ++l) {
      for (std::size_t k = 0; k < k_rows; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < m_cols; ++m) s += q(k, m) * sigma[m];
        if (s < kTiny) {
          throw Error(ErrorCode::DivisionUnderflow,
                      "(Q sigma)[" + std::to_string(k) + "] at outer iteration " + std::to_string(t + 1));
        }
        delta[k] = 1.0 / (k_count * s);
      }
      for (std::size_t m = 0; m < m_cols; ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < k_rows; ++k) s += q(k, m) * delta[k];
        if (s < kTiny) {
          throw Error(ErrorCode::DivisionUnderflow,
                      "(Q^T delta)[" + std::to_string(m) + "] at outer iteration " + std::to_string(t + 1));
        }
        sigma[m] = 1.0 / (m_count * s);
      }
    }
    for (std::size_t k = 0; k < k_rows; ++k)
      for (std::size_t m = 0; m < m_cols; ++m) plan(k, m) = delta[k] * q(k, m) * sigma[m];
  }

  TransportPlan out;
  out.plan = std::move(plan);
  out.iterations_used = cfg.outer_iters * cfg.inner_iters;
  finish_plan(out, cost, uniform_marginals(k_rows, m_cols), cfg.tol);
  return out;
}

TransportPlan algorithm1_distance(const EmbeddingMatrix& visual, const EmbeddingMatrix& textual,
                                  const SolverConfig& cfg) {
  return algorithm1_from_cost(cosine_cost(visual, textual), cfg);
}

TransportPlan solve_pair(const CandidatePair& pair, Solver solver, const SolverConfig& cfg) {
  const CostMatrix cost = cosine_cost(pair.visual_candidate, pair.textual_candidate);
  if (solver == Solver::Algorithm1) return algorithm1_from_cost(cost, cfg);
  return sinkhorn_entropic(cost, uniform_marginals(cost.rows(), cost.cols()), cfg);
}

std::size_t argmin_pair(const std::vector<CandidatePair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidate pairs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const auto& a = pairs[i];
    const auto& b = pairs[best];
    const double da = a.distance.value();
    const double db = b.distance.value();
    if (da < db || (da == db && std::pair(a.visual_segment_id, a.textual_segment_id) <
                                    std::pair(b.visual_segment_id, b.textual_segment_id))) {
      best = i;
    }
  }
  return best;
}

CandidatePair select_best_pair(std::vector<CandidatePair>& pairs, Solver solver,
                               const SolverConfig& cfg, std::size_t workers) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidate pairs");
  validate_config(cfg);

  std::vector<std::exception_ptr> failures(pairs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        pairs[i].distance = solve_pair(pairs[i], solver, cfg).distance;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, pairs.size());
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return pairs[argmin_pair(pairs)];
}

}  // namespace sccs::ot
