#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "mgcomm/error.hpp"
#include "mgcomm/fixtures.hpp"
#include "mgcomm/synthesis.hpp"
#include "oracles.hpp"

using namespace mgcomm;

namespace {

SynthesisProblem canonical_problem(const SparsityMask& mask) {
  SynthesisProblem p;
  p.model = four_bus_canonical();
  p.mask = mask;
  p.beta = 5000.0;
  p.rho = 5.0;
  p.norm = NormBound::kSquared;
  return p;
}

double independent_lmi_max(const StateSpaceModel& model, const Matrix& P, const Matrix& K, double gamma) {
  const Matrix Ak = model.A + model.B * K * model.C;
  const Matrix S = Ak.transpose() * P + P * Ak + gamma * Matrix::Identity(model.n(), model.n());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  return es.eigenvalues().maxCoeff();
}

StateSpaceModel random_model(std::mt19937_64& eng, int n) {
  std::normal_distribution<double> g;
  StateSpaceModel m;
  m.A = Matrix::NullaryExpr(n, n, [&] { return g(eng); });
  m.B = Matrix::NullaryExpr(n, n, [&] { return g(eng); });
  m.C = Matrix::Identity(n, n);
  return m;
}

SparsityMask random_mask(std::mt19937_64& eng, int n, double density) {
  std::bernoulli_distribution on(density);
  SparsityMask m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (on(eng)) m.set(i, j);
  return m;
}

}  // namespace

TEST(Lyapunov, ScalarCase) {
  const Matrix P = lyapunov_P(Matrix::Constant(1, 1, -1.0), 0.0);
  EXPECT_NEAR(P(0, 0), 0.5, 1e-15);
}

TEST(Lyapunov, CanonicalAgainstKroneckerOracle) {
  const Matrix A = four_bus_canonical().A;
  const Matrix P = lyapunov_P(A, 5000.0);
  const Matrix ref = oracle::lyapunov_kron(A, 5000.0);
  EXPECT_TRUE(P.isApprox(ref, 1e-9));
  EXPECT_EQ(P, P.transpose());
  EXPECT_LE(lyapunov_residual(A, 5000.0, P), 1e-8 * 4);
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Lyapunov, RandomAgainstKroneckerOracle) {
  std::mt19937_64 eng(3);
  for (int n = 1; n <= 6; ++n) {
    const Matrix A = random_model(eng, n).A;
    const double beta = max_real(sorted_eigenvalues(A)) + 1.0;
    const Matrix P = lyapunov_P(A, beta);
    EXPECT_TRUE(P.isApprox(oracle::lyapunov_kron(A, beta), 1e-8)) << n;
    EXPECT_LE(lyapunov_residual(A, beta, P), 1e-8 * n);
  }
}

TEST(Lyapunov, UnstableShiftRejected) {
  EXPECT_THROW(lyapunov_P(four_bus_canonical().A, 0.0), Error);
}

TEST(AlphaBound, ZeroMatrices) {
  EXPECT_EQ(alpha_bound(Matrix::Zero(3, 3), Matrix::Zero(3, 3), 1.0), 0.0);
}

TEST(AlphaBound, DiagonalExample) {
  Matrix A = Matrix::Zero(2, 2), B = Matrix::Zero(2, 2);
  A.diagonal() << 2.0, -1.0;
  B.diagonal() << 1.0, 0.5;
  EXPECT_DOUBLE_EQ(alpha_bound(A, B, 1.0), 3.0);
  EXPECT_THROW(alpha_bound(A, B, 0.0), Error);
}

TEST(AlphaBound, PowerIterationCrossCheck) {
  const auto base = fixtures::microgrid_params();
  const auto model = build_from_params(base).second;
  const double nb = oracle::power_iteration_norm(model.B);
  const double na = oracle::power_iteration_norm(model.A);
  const double ref = 5.0 * nb * (na + nb * 5.0);
  EXPECT_LE(oracle::rel_err(alpha_bound(model.A, model.B, 5.0), ref), 1e-6);
}

TEST(MaxGamma, EmptyMaskClosedForm) {
  const auto prob = canonical_problem(SparsityMask(4, 4));
  const auto r = max_gamma(prob);
  const Matrix S0 = lyapunov_derivative(prob.model, r.P, Matrix::Zero(4, 4));
  Eigen::SelfAdjointEigenSolver<Matrix> es(S0);
  EXPECT_DOUBLE_EQ(r.gamma, -es.eigenvalues().maxCoeff());
  EXPECT_TRUE(r.K.isZero(0.0));
}

TEST(MaxGamma, PublishedMasks) {
  const auto r1 = max_gamma(canonical_problem(oracle::support(oracle::gain_s1())));
  EXPECT_LE(oracle::rel_err(r1.gamma, oracle::kS1Gamma), 0.05) << r1.gamma;
  const auto r2 = max_gamma(canonical_problem(oracle::support(oracle::gain_s2())));
  EXPECT_LE(oracle::rel_err(r2.gamma, oracle::kS2Gamma), 0.05) << r2.gamma;
}

TEST(MaxGamma, ResultInvariants) {
  for (const auto& K : {oracle::gain_s1(), oracle::gain_s2(), oracle::gain_s3(), oracle::gain_s4()}) {
    const auto prob = canonical_problem(oracle::support(K));
    const auto r = max_gamma(prob);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (!prob.mask(i, j)) {
          EXPECT_EQ(r.K(i, j), 0.0);
        }
    EXPECT_LE(spectral_norm(r.K), std::sqrt(prob.rho) + 1e-6);
    EXPECT_LT(independent_lmi_max(prob.model, r.P, r.K, r.gamma - 1e-6), 0.0);
    EXPECT_LT(r.report.certificate_max_eig, 0.0);
    EXPECT_LE(r.report.relative_gap, 1e-3);
    if (r.gamma > 0) {
      EXPECT_LT(r.max_real_eig(), 0.0);
      EXPECT_EQ(r.status, SynthesisStatus::kCertified);
    }
  }
}

TEST(MaxGamma, SpectralBoundRespected) {
  auto prob = canonical_problem(SparsityMask(4, 4, true));
  prob.norm = NormBound::kSpectral;
  prob.rho = 0.5;
  const auto r = max_gamma(prob);
  EXPECT_LE(spectral_norm(r.K), 0.5 + 1e-6);
}

TEST(MaxGamma, FullMaskDominatesSparse) {
  const double full = max_gamma(canonical_problem(SparsityMask(4, 4, true))).gamma;
  for (const auto& K : {oracle::gain_s1(), oracle::gain_s2(), oracle::gain_s3()})
    EXPECT_GE(full, max_gamma(canonical_problem(oracle::support(K))).gamma - 1e-6 * std::abs(full));
}

TEST(MaxGamma, MonotoneInMask) {
  std::mt19937_64 eng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    SynthesisProblem prob;
    prob.model = random_model(eng, n);
    prob.beta = max_real(sorted_eigenvalues(prob.model.A)) + 1.0;
    prob.rho = 2.0;
    prob.mask = random_mask(eng, n, 0.4);
    SparsityMask bigger = prob.mask;
    for (int i = 0; i < n; ++i) bigger.set(i, (i + trial) % n);
    const double small_gamma = max_gamma(prob).gamma;
    prob.mask = bigger;
    const double big_gamma = max_gamma(prob).gamma;
    EXPECT_GE(big_gamma, small_gamma - 1e-6 * std::max(1.0, std::abs(small_gamma))) << trial;
  }
}

TEST(MaxGamma, RejectsBadInputs) {
  auto prob = canonical_problem(SparsityMask(3, 4));
  EXPECT_THROW(max_gamma(prob), Error);
  prob = canonical_problem(SparsityMask(4, 4));
  prob.rho = 0.0;
  EXPECT_THROW(max_gamma(prob), Error);
}

TEST(MaxGammaDelay, ZeroAlphaAdmitsDelayFreeGain) {
  auto prob = canonical_problem(oracle::support(oracle::gain_s2()));
  const auto free = max_gamma(prob);
  ASSERT_GT(free.gamma, 0.0);
  prob.delay = DelayBound{0.0, std::nullopt};
  // With alpha = 0 the block reduces to S + gamma I + P^2 / tau < 0, which
  // the delay-free gain meets at level zero once tau is large enough.
  const double P2 = spectral_norm(free.P * free.P);
  const double tau = 2.0 * P2 / free.gamma;
  EXPECT_LT(lmi_max_eig(prob, free.P, free.K, 0.0, tau, 0.0), 0.0);

  const auto delayed = max_gamma_delay(prob);
  EXPECT_LE(delayed.gamma, free.gamma * (1 + 1e-6));
  EXPECT_GT(delayed.gamma, 0.0);
  EXPECT_LT(delayed.report.certificate_max_eig, 0.0);
  EXPECT_LT(delayed.max_real_eig(), 0.0);
}

TEST(MaxGammaDelay, NeedsDelayBound) {
  EXPECT_THROW(max_gamma_delay(canonical_problem(SparsityMask(4, 4, true))), Error);
}

TEST(MaxGammaDelay, AlphaFromDelaySpec) {
  auto prob = canonical_problem(oracle::support(oracle::gain_s2()));
  prob.delay = DelayBound{std::nullopt, DelaySpec::uniform(prob.mask, 1e-6)};
  const auto r = max_gamma_delay(prob);
  EXPECT_NEAR(r.alpha, 1e-6 * alpha_bound(prob.model.A, prob.model.B, std::sqrt(prob.rho)), 1e-12 * r.alpha + 1e-15);
  EXPECT_LE(spectral_norm(r.K), std::sqrt(prob.rho) + 1e-6);
}

TEST(SelectBest, LargerGammaWins) {
  std::vector<Candidate> c(2);
  c[0].result.gamma = 1.0;
  c[1].result.gamma = 2.0;
  EXPECT_EQ(select_best(c), 1u);
}

TEST(SelectBest, FewerHopsBreakTies) {
  std::vector<Candidate> c(2);
  c[0].result.gamma = 5.0;
  c[0].set.paths = {{0, 0, 0, 0}, {1, 1, 1}, {2, 2}};  // 6 hops
  c[1].result.gamma = 5.0;
  c[1].set.paths = {{0, 0, 0, 0}, {1, 1}};  // 4 hops
  EXPECT_EQ(select_best(c), 1u);
}

TEST(SelectBest, EmptyRejected) { EXPECT_THROW(select_best({}), Error); }

TEST(ZoneDesign, SingleConfigurationReturned) {
  const auto base = fixtures::microgrid_params();
  const auto model = build_from_params(base.with_load(0.35, base.line_L.back())).second;
  ConstraintSet cs;
  cs.bwc = 2;
  cs.cc = 1;
  cs.cnc = 2;
  cs.prc = 1;
  ZoneDesignOptions opt;
  opt.threads = 1;
  const auto out = zone_design({model}, {cs}, {0.1}, opt);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].constraints.parameter(), "2121");
  EXPECT_EQ(out[0].evaluated.size(), 1u);
  EXPECT_TRUE(std::find(cbscd(4, 4, cs).begin(), cbscd(4, 4, cs).end(), out[0].mask) !=
              cbscd(4, 4, cs).end());
}

TEST(ZoneDesign, DefaultGridCoversDigits) {
  const auto grid = default_constraint_grid(4);
  EXPECT_EQ(grid.size(), 4u * 4u * 5u * 5u);
  EXPECT_EQ(grid.front().parameter(), "1000");
}

TEST(ZoneDesign, FailedLinksAreCleared) {
  const auto base = fixtures::microgrid_params();
  const auto model = build_from_params(base.with_load(0.7, base.line_L.back())).second;
  ConstraintSet cs;
  cs.bwc = 3;
  cs.cc = 3;
  cs.cnc = 0;
  cs.prc = 3;
  ZoneDesignOptions opt;
  opt.threads = 1;
  opt.failed_links = {{0, 0}, {3, 2}};
  const auto out = zone_design({model}, {cs}, {0.1}, opt);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].mask(0, 0));
  EXPECT_FALSE(out[0].mask(3, 2));
}
