#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sccs/ot_align.hpp"
#include "support/oracles.hpp"

using sccs::EmbeddingMatrix;
using sccs::Error;
using sccs::ErrorCode;
using sccs::Matrix;
namespace ot = sccs::ot;
namespace st = sccs::testing;

namespace {

st::Grid to_grid(const Matrix& m) {
  st::Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

ot::SolverConfig sinkhorn_cfg(double lambda, ot::SinkhornMode mode = ot::SinkhornMode::Auto) {
  ot::SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.sinkhorn_mode = mode;
  return cfg;
}

EmbeddingMatrix random_embeddings(std::mt19937_64& rng, std::size_t rows, std::size_t dims) {
  return EmbeddingMatrix::from_rows(st::random_unit_rows(rng, rows, dims));
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) s += (x = u(rng));
  for (double& x : w) x /= s;
  return w;
}

EmbeddingMatrix angle_row(double distance) {
  // 1 - cos(theta) = distance against e1.
  const double c = 1.0 - distance;
  return EmbeddingMatrix::from_rows({{c, std::sqrt(1.0 - c * c)}});
}

}  // namespace

// ---------------------------------------------------------------------------
// cosine_cost

TEST(CosineCost, Examples) {
  const auto e1 = EmbeddingMatrix::from_rows({{1, 0}});
  EXPECT_DOUBLE_EQ(ot::cosine_cost(e1, EmbeddingMatrix::from_rows({{1, 0}}))(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(ot::cosine_cost(e1, EmbeddingMatrix::from_rows({{0, 1}}))(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(ot::cosine_cost(e1, EmbeddingMatrix::from_rows({{-1, 0}}))(0, 0), 2.0);
}

TEST(CosineCost, OrientationRowsAreVisual) {
  const auto v = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
  const auto e = EmbeddingMatrix::from_rows({{1, 0}, {0, 2}});
  const auto c = ot::cosine_cost(v, e);
  ASSERT_EQ(c.rows(), 3u);
  ASSERT_EQ(c.cols(), 2u);
  EXPECT_NEAR(c(2, 1), 1.0 - 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c(1, 0), 1.0, 1e-12);
}

TEST(CosineCost, Errors) {
  const auto a = EmbeddingMatrix::from_rows({{1, 0}});
  EXPECT_THROW(ot::cosine_cost(a, EmbeddingMatrix::from_rows({{1, 0, 0}})), Error);
  try {
    ot::cosine_cost(EmbeddingMatrix::from_rows({{1, 0}, {0, 0}}), a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNormRow);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(CosineCost, TransposeSymmetryAndRange) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_embeddings(rng, 1 + trial % 5, 4);
    const auto e = random_embeddings(rng, 1 + trial % 3, 4);
    const auto c = ot::cosine_cost(v, e);
    EXPECT_EQ(c, ot::cosine_cost(e, v).transposed());
    for (double x : c.data()) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 2.0);
    }
  }
}

// ---------------------------------------------------------------------------
// uniform_marginals

TEST(UniformMarginals, Examples) {
  const auto a = ot::uniform_marginals(1, 1);
  EXPECT_EQ(a.mu, std::vector<double>{1.0});
  EXPECT_EQ(a.nu, std::vector<double>{1.0});
  const auto b = ot::uniform_marginals(2, 4);
  EXPECT_EQ(b.mu, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(b.nu, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  const auto c = ot::uniform_marginals(3, 3);
  EXPECT_NEAR(c.mu[0] + c.mu[1] + c.mu[2], 1.0, 1e-15);
  EXPECT_NEAR(c.nu[0] + c.nu[1] + c.nu[2], 1.0, 1e-15);
  EXPECT_THROW(ot::uniform_marginals(0, 2), Error);
}

TEST(Marginals, ValidationRejectsBadWeights) {
  const Matrix c(2, 2, 0.5);
  EXPECT_THROW(ot::validate_marginals(c, {{0.5, 0.5}, {1.0}}), Error);
  EXPECT_THROW(ot::validate_marginals(c, {{0.6, 0.5}, {0.5, 0.5}}), Error);
  EXPECT_THROW(ot::validate_marginals(c, {{1.0, 0.0}, {0.5, 0.5}}), Error);
  EXPECT_NO_THROW(ot::validate_marginals(c, {{0.3, 0.7}, {0.5, 0.5}}));
}

TEST(SolverConfigValidation, RejectsNonPositive) {
  ot::SolverConfig cfg;
  EXPECT_NO_THROW(ot::validate_config(cfg));
  cfg.lambda = 0.0;
  EXPECT_THROW(ot::validate_config(cfg), Error);
  cfg = {};
  cfg.tol = 1.0;
  EXPECT_THROW(ot::validate_config(cfg), Error);
  cfg = {};
  cfg.outer_iters = 0;
  EXPECT_THROW(ot::validate_config(cfg), Error);
}

// ---------------------------------------------------------------------------
// sinkhorn_entropic

TEST(Sinkhorn, OneByOneIsForced) {
  const Matrix c(1, 1, 0.3);
  for (double lambda : {10.0, 0.1, 1e-3}) {
    const auto plan = ot::sinkhorn_entropic(c, ot::uniform_marginals(1, 1), sinkhorn_cfg(lambda));
    EXPECT_EQ(plan.plan(0, 0), 1.0);
    EXPECT_EQ(plan.distance, 0.3);
  }
}

TEST(Sinkhorn, ZeroCostGivesProductCoupling) {
  const Matrix c(3, 4, 0.0);
  const auto w = ot::uniform_marginals(3, 4);
  const auto plan = ot::sinkhorn_entropic(c, w, sinkhorn_cfg(0.1));
  EXPECT_EQ(plan.distance, 0.0);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(plan.plan(k, m), 1.0 / 12.0, 1e-9);
}

TEST(Sinkhorn, OffDiagonalCostSmallLambda) {
  const Matrix c = Matrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const auto w = ot::uniform_marginals(3, 3);
  // Oracle: the six scaled permutation vertices; identity costs 0.
  ASSERT_EQ(st::lp_by_permutations(to_grid(c)), 0.0);
  const auto plan = ot::sinkhorn_entropic(c, w, sinkhorn_cfg(1e-3));
  EXPECT_TRUE(plan.log_domain);
  EXPECT_TRUE(plan.converged);
  EXPECT_NEAR(plan.distance, 0.0, 1e-3);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(plan.plan(k, m), k == m ? 1.0 / 3.0 : 0.0, 1e-3);
}

TEST(Sinkhorn, KernelModeReportsUnderflow) {
  const Matrix c = Matrix::from_rows({{0, 2}, {2, 0}});
  try {
    ot::sinkhorn_entropic(c, ot::uniform_marginals(2, 2), sinkhorn_cfg(1e-3, ot::SinkhornMode::Kernel));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NumericalUnderflow);
  }
  EXPECT_NO_THROW(ot::sinkhorn_entropic(c, ot::uniform_marginals(2, 2), sinkhorn_cfg(1e-3)));
}

TEST(Sinkhorn, KernelAndLogDomainAgree) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = ot::cosine_cost(random_embeddings(rng, 4, 3), random_embeddings(rng, 5, 3));
    ot::MarginalPair w{random_simplex(rng, 4), random_simplex(rng, 5)};
    auto cfg = sinkhorn_cfg(0.05, ot::SinkhornMode::Kernel);
    cfg.tol = 1e-12;
    const auto a = ot::sinkhorn_entropic(c, w, cfg);
    cfg.sinkhorn_mode = ot::SinkhornMode::LogDomain;
    const auto b = ot::sinkhorn_entropic(c, w, cfg);
    ASSERT_FALSE(a.log_domain);
    ASSERT_TRUE(b.log_domain);
    for (std::size_t i = 0; i < a.plan.data().size(); ++i)
      EXPECT_NEAR(a.plan.data()[i], b.plan.data()[i], 1e-9);
  }
}

TEST(Sinkhorn, MaxItersIsFlagged) {
  std::mt19937_64 rng(61);
  const auto c = ot::cosine_cost(random_embeddings(rng, 3, 4), random_embeddings(rng, 4, 4));
  auto cfg = sinkhorn_cfg(0.1);
  cfg.max_iters = 1;
  cfg.tol = 1e-15;
  const auto plan = ot::sinkhorn_entropic(c, ot::uniform_marginals(3, 4), cfg);
  EXPECT_EQ(plan.iterations_used, 1u);
  EXPECT_FALSE(plan.converged);
}

// ---------------------------------------------------------------------------
// algorithm1_distance

TEST(Algorithm1, OneByOne) {
  const auto v = EmbeddingMatrix::from_rows({{1, 0}});
  const auto e = EmbeddingMatrix::from_rows({{0.6, 0.8}});
  for (double beta : {0.1, 0.5, 2.0}) {
    for (std::size_t n : {1u, 7u}) {
      ot::SolverConfig cfg;
      cfg.beta = beta;
      cfg.outer_iters = n;
      cfg.inner_iters = n;
      const auto plan = ot::algorithm1_distance(v, e, cfg);
      EXPECT_DOUBLE_EQ(plan.plan(0, 0), 1.0);
      EXPECT_NEAR(plan.distance, 1.0 - 0.6f, 1e-7);
    }
  }
}

TEST(Algorithm1, IdenticalInputsApproachZero) {
  const auto v = EmbeddingMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  double previous = 1.0;
  for (std::size_t n : {1u, 5u, 20u, 100u}) {
    ot::SolverConfig cfg;
    cfg.outer_iters = n;
    const double d = ot::algorithm1_distance(v, v, cfg).distance;
    EXPECT_LT(d, previous);
    previous = d;
  }
  EXPECT_LT(previous, 1e-9);
}

TEST(Algorithm1, MatchesLpOracleOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_embeddings(rng, 4, 6);
    const auto e = random_embeddings(rng, 5, 6);
    ot::SolverConfig cfg;
    cfg.beta = 0.5;
    cfg.outer_iters = 50;
    cfg.inner_iters = 1;
    const auto plan = ot::algorithm1_distance(v, e, cfg);
    const auto c = ot::cosine_cost(v, e);
    const auto exact = st::lp_by_vertex_enumeration(to_grid(c), std::vector<double>(4, 0.25),
                                                    std::vector<double>(5, 0.2));
    EXPECT_NEAR(plan.distance, exact.distance, 1e-3) << "trial " << trial;
    for (double t : plan.plan.data()) EXPECT_GE(t, 0.0);
  }
}

TEST(Algorithm1, ColumnsExactAfterFinalScaling) {
  std::mt19937_64 rng(23);
  const auto v = random_embeddings(rng, 3, 4);
  const auto e = random_embeddings(rng, 6, 4);
  const auto plan = ot::algorithm1_distance(v, e, {});
  for (std::size_t m = 0; m < 6; ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) s += plan.plan(k, m);
    EXPECT_NEAR(s, 1.0 / 6.0, 1e-15);
  }
}

TEST(Algorithm1, DivisionUnderflowIsReported) {
  // A tiny beta makes every kernel entry of a row vanish.
  const auto v = EmbeddingMatrix::from_rows({{1, 0}, {-1, 0}});
  const auto e = EmbeddingMatrix::from_rows({{1, 0}});
  ot::SolverConfig cfg;
  cfg.beta = 1e-3;
  try {
    ot::algorithm1_distance(v, e, cfg);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DivisionUnderflow);
  }
}

// ---------------------------------------------------------------------------
// lp_oracle

TEST(LpOracle, OneByOne) {
  const auto plan = ot::lp_oracle(Matrix(1, 1, 0.3), ot::uniform_marginals(1, 1));
  EXPECT_EQ(plan.distance, 0.3);
}

TEST(LpOracle, OffDiagonalUniform) {
  const Matrix c = Matrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const auto plan = ot::lp_oracle(c, ot::uniform_marginals(3, 3));
  EXPECT_EQ(plan.distance, 0.0);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(plan.plan(k, m), k == m ? 1.0 / 3.0 : 0.0, 1e-15);
}

TEST(LpOracle, TwoByTwoNonUniform) {
  const Matrix c = Matrix::from_rows({{0, 1}, {1, 0}});
  const ot::MarginalPair w{{0.7, 0.3}, {0.4, 0.6}};
  // Grid oracle: T00 = t in [0.1, 0.4] fixes the rest; cost = 1.1 - 2t.
  double best = 1e9, best_t = 0.0;
  for (int i = 0; i <= 30000; ++i) {
    const double t = 0.1 + 0.3 * i / 30000.0;
    const double d = (0.7 - t) + (0.4 - t);
    if (d < best) best = d, best_t = t;
  }
  ASSERT_NEAR(best, 0.3, 1e-12);
  ASSERT_NEAR(best_t, 0.4, 1e-12);

  const auto plan = ot::lp_oracle(c, w);
  EXPECT_NEAR(plan.distance, 0.3, 1e-12);
  EXPECT_NEAR(plan.plan(0, 0), 0.4, 1e-12);
  EXPECT_NEAR(plan.plan(0, 1), 0.3, 1e-12);
  EXPECT_NEAR(plan.plan(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(plan.plan(1, 1), 0.3, 1e-12);
}

TEST(LpOracle, TooLarge) {
  EXPECT_THROW(ot::lp_oracle(Matrix(8, 9, 1.0), ot::uniform_marginals(8, 9)), Error);
  EXPECT_NO_THROW(ot::lp_oracle(Matrix(8, 8, 1.0), ot::uniform_marginals(8, 8)));
}

TEST(LpOracle, MatchesVertexEnumeration) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::size_t> size(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = size(rng), m = size(rng) + (trial % 2);
    const auto c = ot::cosine_cost(random_embeddings(rng, k, 3), random_embeddings(rng, m, 3));
    ot::MarginalPair w{random_simplex(rng, k), random_simplex(rng, m)};
    const auto plan = ot::lp_oracle(c, w);
    const auto exact = st::lp_by_vertex_enumeration(to_grid(c), w.mu, w.nu);
    ASSERT_NEAR(plan.distance, exact.distance, 1e-12) << "trial " << trial;
    EXPECT_LE(plan.marginal_violation, 1e-12);
  }
}

TEST(LpOracle, MatchesPermutationsOnUniformSquare) {
  std::mt19937_64 rng(31);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = ot::cosine_cost(random_embeddings(rng, n, 4), random_embeddings(rng, n, 4));
      const auto plan = ot::lp_oracle(c, ot::uniform_marginals(n, n));
      EXPECT_NEAR(plan.distance, st::lp_by_permutations(to_grid(c)), 1e-12);
    }
  }
}

TEST(LpOracle, DegenerateMarginals) {
  // Northwest corner hits simultaneous row/column exhaustion repeatedly.
  const Matrix c = Matrix::from_rows({{3, 1, 2}, {1, 3, 2}, {2, 2, 0}});
  const auto w = ot::uniform_marginals(3, 3);
  const auto plan = ot::lp_oracle(c, w);
  EXPECT_NEAR(plan.distance, st::lp_by_permutations(to_grid(c)), 1e-12);
  EXPECT_NEAR(plan.distance, 2.0 / 3.0, 1e-12);
}

TEST(LpOracle, ScaleBehavior) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = ot::cosine_cost(random_embeddings(rng, 3, 3), random_embeddings(rng, 5, 3));
    const auto w = ot::uniform_marginals(3, 5);
    const double base = ot::lp_oracle(c, w).distance;
    const double s = 0.1 + trial;
    for (double& x : c.data()) x *= s;
    EXPECT_NEAR(ot::lp_oracle(c, w).distance, s * base, 1e-12 * s);
  }
}

// ---------------------------------------------------------------------------
// Cross-solver properties

TEST(OtProperties, OracleEquivalenceSmallInstances) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = random_embeddings(rng, size(rng), 5);
    const auto e = random_embeddings(rng, size(rng), 5);
    const auto c = ot::cosine_cost(v, e);
    const auto w = ot::uniform_marginals(c.rows(), c.cols());
    const double exact = ot::lp_oracle(c, w).distance;

    // Near-degenerate instances need tens of thousands of sweeps at this lambda.
    auto skcfg = sinkhorn_cfg(1e-3);
    skcfg.max_iters = 1000000;
    const auto sk = ot::sinkhorn_entropic(c, w, skcfg);
    EXPECT_NEAR(sk.distance, exact, 1e-2);
    EXPECT_TRUE(sk.converged);
    EXPECT_LE(ot::marginal_residual(sk.plan, w), 1e-6);

    ot::SolverConfig cfg;
    cfg.outer_iters = 50;
    const auto a1 = ot::algorithm1_distance(v, e, cfg);
    EXPECT_NEAR(a1.distance, exact, 1e-2);
  }
}

TEST(OtProperties, TransposeSymmetry) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_embeddings(rng, 3, 4);
    const auto e = random_embeddings(rng, 5, 4);
    const auto c = ot::cosine_cost(v, e);
    const ot::MarginalPair w{random_simplex(rng, 3), random_simplex(rng, 5)};
    const ot::MarginalPair swapped{w.nu, w.mu};
    const auto ct = ot::cosine_cost(e, v);

    const auto a = ot::lp_oracle(c, w);
    const auto b = ot::lp_oracle(ct, swapped);
    EXPECT_NEAR(a.distance, b.distance, 1e-12);
    EXPECT_NEAR(st::grid_dot(to_grid(ct), to_grid(a.plan.transposed())), b.distance, 1e-12);

    auto cfg = sinkhorn_cfg(0.05);
    cfg.tol = 1e-12;
    const auto sa = ot::sinkhorn_entropic(c, w, cfg);
    const auto sb = ot::sinkhorn_entropic(ct, swapped, cfg);
    EXPECT_NEAR(sa.distance, sb.distance, 1e-9);
    const auto sat = sa.plan.transposed();
    for (std::size_t i = 0; i < sat.data().size(); ++i) EXPECT_NEAR(sat.data()[i], sb.plan.data()[i], 1e-9);
  }
}

TEST(OtProperties, PermutationEquivariance) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_embeddings(rng, 4, 3);
    const auto e = random_embeddings(rng, 3, 3);
    std::vector<std::size_t> perm = {0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto vp = v.select(perm);

    auto cfg = sinkhorn_cfg(0.1);
    cfg.tol = 1e-12;
    const auto a = ot::sinkhorn_entropic(ot::cosine_cost(v, e), ot::uniform_marginals(4, 3), cfg);
    const auto b = ot::sinkhorn_entropic(ot::cosine_cost(vp, e), ot::uniform_marginals(4, 3), cfg);
    EXPECT_NEAR(a.distance, b.distance, 1e-12);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(b.plan(k, m), a.plan(perm[k], m), 1e-12);

    const auto p1 = ot::algorithm1_distance(v, e, {});
    const auto p2 = ot::algorithm1_distance(vp, e, {});
    EXPECT_NEAR(p1.distance, p2.distance, 1e-12);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(p2.plan(k, m), p1.plan(perm[k], m), 1e-12);

    const auto l1 = ot::lp_oracle(ot::cosine_cost(v, e), ot::uniform_marginals(4, 3));
    const auto l2 = ot::lp_oracle(ot::cosine_cost(vp, e), ot::uniform_marginals(4, 3));
    EXPECT_NEAR(l1.distance, l2.distance, 1e-12);
  }
}

TEST(OtProperties, MonotoneInLambda) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = ot::cosine_cost(random_embeddings(rng, 4, 3), random_embeddings(rng, 5, 3));
    const auto w = ot::uniform_marginals(4, 5);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 0.1, 0.01, 0.001}) {
      auto cfg = sinkhorn_cfg(lambda);
      cfg.tol = 1e-13;
      cfg.max_iters = 200000;
      const auto plan = ot::sinkhorn_entropic(c, w, cfg);
      ASSERT_TRUE(plan.converged) << "lambda " << lambda;
      EXPECT_LE(plan.distance, previous + 1e-9) << "lambda " << lambda;
      previous = plan.distance;
    }
  }
}

// ---------------------------------------------------------------------------
// select_best_pair

TEST(SelectBestPair, PicksSmallestDistance) {
  const auto e1 = EmbeddingMatrix::from_rows({{1, 0}});
  std::vector<sccs::CandidatePair> pairs = {
      {e1, angle_row(0.25), 0, 0, std::nullopt},
      {e1, angle_row(0.08), 0, 1, std::nullopt},
      {e1, angle_row(0.70), 1, 0, std::nullopt},
  };
  const auto best = ot::select_best_pair(pairs, ot::Solver::Sinkhorn, {});
  EXPECT_EQ(best.textual_segment_id, 1u);
  EXPECT_NEAR(*best.distance, 0.08, 1e-6);
  for (const auto& p : pairs) EXPECT_TRUE(p.distance.has_value());
  EXPECT_NEAR(*pairs[2].distance, 0.70, 1e-6);
}

TEST(SelectBestPair, SinglePairUnchanged) {
  const auto v = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}});
  const auto e = EmbeddingMatrix::from_rows({{1, 1}});
  std::vector<sccs::CandidatePair> pairs = {{v, e, 4, 7, std::nullopt}};
  const auto best = ot::select_best_pair(pairs, ot::Solver::Algorithm1, {});
  EXPECT_EQ(best.visual_segment_id, 4u);
  EXPECT_EQ(best.textual_segment_id, 7u);
  EXPECT_EQ(best.visual_candidate, v);
  EXPECT_TRUE(best.distance.has_value());
}

TEST(SelectBestPair, TiesGoToLowerSegmentIds) {
  const auto e1 = EmbeddingMatrix::from_rows({{1, 0}});
  const auto other = angle_row(0.4);
  std::vector<sccs::CandidatePair> pairs = {
      {e1, other, 1, 0, std::nullopt},
      {e1, other, 0, 1, std::nullopt},
      {e1, other, 0, 2, std::nullopt},
  };
  const auto best = ot::select_best_pair(pairs, ot::Solver::Sinkhorn, {});
  EXPECT_EQ(best.visual_segment_id, 0u);
  EXPECT_EQ(best.textual_segment_id, 1u);
}

TEST(SelectBestPair, EmptyIsAnError) {
  std::vector<sccs::CandidatePair> pairs;
  try {
    ot::select_best_pair(pairs, ot::Solver::Sinkhorn, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidateSet);
  }
}

TEST(SelectBestPair, WorkerCountDoesNotChangeResults) {
  std::mt19937_64 rng(59);
  std::vector<sccs::CandidatePair> base;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      base.push_back({random_embeddings(rng, 3, 8), random_embeddings(rng, 2, 8), i, j, std::nullopt});
  auto serial = base;
  const auto a = ot::select_best_pair(serial, ot::Solver::Sinkhorn, {}, 1);
  for (std::size_t workers : {2u, 3u, 16u}) {
    auto parallel = base;
    const auto b = ot::select_best_pair(parallel, ot::Solver::Sinkhorn, {}, workers);
    EXPECT_EQ(a.visual_segment_id, b.visual_segment_id);
    EXPECT_EQ(a.textual_segment_id, b.textual_segment_id);
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(*serial[i].distance, *parallel[i].distance);
  }
}
