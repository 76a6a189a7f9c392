#include <gtest/gtest.h>

#include <cmath>

#include "ringcav/oracle.hpp"
#include "ringcav/verify.hpp"

using namespace ringcav;

TEST(Lyapunov, ResidualAndSymmetry) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto p = random_draw(5, i);
    const auto s = lyapunov_steady(p);
    const auto sys = drift_matrix(p);
    const Matrix8 r = sys.drift * s.sigma + s.sigma * sys.drift.transpose() + sys.diffusion;
    EXPECT_LT(r.norm(), 1e-10 * sys.diffusion.norm());
    EXPECT_EQ(s.sigma, s.sigma.transpose());
    EXPECT_EQ(s.sigma.llt().info(), Eigen::Success);
  }
}

TEST(Lyapunov, PairsDecouple) {
  const auto s = lyapunov_steady(figure_params(0.4, 0.3));
  EXPECT_EQ((s.sigma.block<4, 4>(0, 4).cwiseAbs().maxCoeff()), 0.0);
}

TEST(Lyapunov, WeakCouplingLimit) {
  // Cavity moments go to vacuum; the atomic population does not (it is of order λ⁰).
  auto p = figure_params(0.3, 1e-4);
  const auto s = lyapunov_steady(p);
  for (int j = 1; j <= 2; ++j) {
    const auto m = moments_from_state(s, j);
    const double W = p.Omega(j), w0 = p.omega_0, k = p.kappa;
    EXPECT_LT(m.n_a, 1e-7);
    EXPECT_LT(std::abs(m.a_sq), 1e-7);
    EXPECT_NEAR(m.n_d, (k * k + (w0 - W) * (w0 - W)) / (4.0 * w0 * W), 1e-6);
  }
}

TEST(Lyapunov, SecondPairSign) {
  const auto p = figure_params(0.9, 0.2);
  const auto o = moments_from_state(lyapunov_steady(p), 2);
  const auto c = pair_moments(2, p);
  EXPECT_NEAR(o.d_sq.real(), c.d_sq.real(), 1e-12);
  EXPECT_LT(o.d_sq.real(), 0.0);
  EXPECT_NEAR(std::abs(o.c_da - c.c_da), 0.0, 1e-12);
}

TEST(Lyapunov, Refusals) {
  auto p = figure_params(0.3, 0.2);
  p.beta = 1.1 * critical_couplings(p).beta_c1;
  EXPECT_THROW(lyapunov_steady(p), AboveThresholdError);
  EXPECT_THROW(lyapunov_steady(figure_params(0.3, 0.0)), DomainError);
  EXPECT_THROW(lyapunov_steady(figure_params(1.0, 0.2)), DomainError);
}

TEST(Evolve, StartsFromVacuum) {
  const auto traj = evolve_moments(figure_params(0.4, 0.3), 0.0, 0.01);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj[0].sigma, Matrix8::Identity() * 0.5);
  for (int j = 1; j <= 2; ++j) {
    const auto m = moments_from_state(traj[0], j);
    EXPECT_EQ(m.n_a, 0.0);
    EXPECT_EQ(m.n_d, 0.0);
  }
}

TEST(Evolve, ConvergesToSteadyState) {
  const auto p = figure_params(0.4, 0.3);
  const auto traj = evolve_moments(p, 50.0 / p.kappa, 0.01, 1000);
  const auto fin = traj.back();
  EXPECT_DOUBLE_EQ(fin.t, 50.0 / p.kappa);
  const auto ref = lyapunov_steady(p);
  EXPECT_LT((fin.sigma - ref.sigma).cwiseAbs().maxCoeff(), 1e-6);
  for (const auto& s : traj) EXPECT_EQ(s.sigma, s.sigma.transpose());
}

TEST(Evolve, UncertaintyHoldsAlongTrajectory) {
  const auto traj = evolve_moments(figure_params(0.6, 0.35), 30.0, 0.01, 50);
  for (const auto& s : traj) {
    for (int j = 1; j <= 2; ++j) {
      const auto m = moments_from_state(s, j);
      // ⟨a†a⟩(⟨a†a⟩ + 1) ≥ |⟨a²⟩|² for any state.
      EXPECT_GE(m.n_a * (m.n_a + 1.0) + 1e-12, std::norm(m.a_sq));
      EXPECT_GE(m.n_a, -1e-14);
      EXPECT_GE(m.n_d, -1e-14);
    }
  }
}

TEST(Evolve, DivergesAboveThreshold) {
  auto p = figure_params(0.3, 0.2);
  p.beta = 1.1 * critical_couplings(p).beta_c1;
  const auto traj = evolve_moments(p, 200.0, 0.01, 2000);
  double last = -1.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double n = moments_from_state(traj[i], 1).n_a;
    EXPECT_GT(n, last);
    last = n;
  }
  EXPECT_GT(last, 1e3);
}

TEST(Evolve, RejectsOversizedStep) {
  EXPECT_THROW(evolve_moments(figure_params(0.3, 0.2), 400.0, 3.0), NumericalError);
  EXPECT_THROW(evolve_moments(figure_params(0.3, 0.2), 1.0, 0.0), DomainError);
  EXPECT_THROW(evolve_moments(figure_params(0.3, 0.2), -1.0, 0.1), DomainError);
}

TEST(ThresholdSearch, MatchesClosedForm) {
  for (double a : {0.0, 0.1, 0.5, 0.8}) {
    const auto p = figure_params(a, 0.1);
    for (int j = 1; j <= 2; ++j) {
      const double bc = critical_coupling(p, j);
      EXPECT_NEAR(threshold_search(p, j, 1e-3, 2.0 * bc), bc, 1e-9);
    }
  }
}

TEST(ThresholdSearch, RejectsBadBracket) {
  const auto p = figure_params(0.3, 0.1);
  const double bc = critical_coupling(p, 1);
  EXPECT_THROW(threshold_search(p, 1, 1.5 * bc, 2.0 * bc), DomainError);
  EXPECT_THROW(threshold_search(p, 1, 0.1 * bc, 0.5 * bc), DomainError);
  EXPECT_THROW(threshold_search(p, 3, 0.1, 0.2), DomainError);
}

TEST(Campaign, PassesAndIsDeterministic) {
  const auto a = run_verification(20, 1);
  EXPECT_TRUE(a.pass());
  EXPECT_LT(a.max_errors.at("n_a1"), 1e-8);
  const auto b = run_verification(20, 1);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_NE(to_json(run_verification(1, 2)).dump(), to_json(run_verification(1, 1)).dump());
}

TEST(Campaign, IncludesThermalDraws) {
  const auto rep = run_verification(11, 4, false);
  EXPECT_EQ(rep.draws[0].params.alpha_k, 0.0);
  EXPECT_EQ(rep.draws[10].params.alpha_k, 0.0);
  EXPECT_TRUE(rep.draws[0].errors.count("g2_thermal_abs"));
  EXPECT_THROW(run_verification(0, 1), DomainError);
}

TEST(Campaign, DrawsStayBelowThreshold) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto p = random_draw(9, i);
    EXPECT_TRUE(below_threshold(p));
    EXPECT_GT(p.beta, 0.0);
  }
}
