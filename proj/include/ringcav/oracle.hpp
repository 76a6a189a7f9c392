#pragma once

// Brute-force reference solvers for the closed forms: the Lyapunov steady
// state of the 8x8 quadrature covariance, direct RK4 integration of the moment
// equations, and bisection for the instability threshold. None of these use
// the closed-form moment or threshold expressions.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "ringcav/drift.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/params.hpp"
#include "ringcav/steady.hpp"

namespace ringcav {

struct MomentState {
  Matrix8 sigma = Matrix8::Identity() * 0.5;  ///< symmetrized covariance, vacuum = I/2
  double t = 0.0;
};

/// Solves AΣ + ΣAᵀ + Q = 0 as a 64x64 linear system.
inline MomentState lyapunov_steady(const SystemParams& p) {
  validate(p);
  for (int j = 1; j <= 2; ++j) {
    if (p.lambda(j) == 0.0) throw DomainError("lyapunov_steady: pair " + std::to_string(j) + " is uncoupled (marginal)");
    if (branch_margin(p, j) >= 0.0) throw AboveThresholdError(j, p.beta, critical_or_nan(p, j));
  }
  const auto sys = drift_matrix(p);
  const Matrix8 I = Matrix8::Identity();
  Eigen::Matrix<double, 64, 64> K;
  // vec(AΣ) = (I ⊗ A) vec Σ, vec(ΣAᵀ) = (A ⊗ I) vec Σ, column-major.
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) K.block<8, 8>(8 * r, 8 * c) = I(r, c) * sys.drift + sys.drift(r, c) * I;
  const Eigen::Map<const Eigen::Matrix<double, 64, 1>> q(sys.diffusion.data());
  const Eigen::Matrix<double, 64, 1> x = K.fullPivLu().solve(-q);

  MomentState out;
  out.sigma = Eigen::Map<const Matrix8>(x.data());
  out.sigma = (out.sigma + out.sigma.transpose()).eval() / 2.0;
  const Matrix8 res = sys.drift * out.sigma + out.sigma * sys.drift.transpose() + sys.diffusion;
  if (res.norm() > 1e-10 * sys.diffusion.norm()) throw NumericalError("lyapunov_steady: residual above tolerance");
  return out;
}

/// Moments of pair j read off the quadrature covariance.
inline PairMoments moments_from_state(const MomentState& s, int branch) {
  check_branch(branch);
  const int o = 4 * (branch - 1);
  const auto S = [&](int i, int k) { return s.sigma(o + i, o + k); };
  // Indices: 0 x_a, 1 p_a, 2 x_d, 3 p_d.
  PairMoments m;
  m.n_a = (S(0, 0) + S(1, 1) - 1.0) / 2.0;
  m.n_d = (S(2, 2) + S(3, 3) - 1.0) / 2.0;
  m.a_sq = cplx{S(0, 0) - S(1, 1), 2.0 * S(0, 1)} / 2.0;
  m.d_sq = cplx{S(2, 2) - S(3, 3), 2.0 * S(2, 3)} / 2.0;
  m.m_da = cplx{S(2, 0) + S(3, 1), S(2, 1) - S(3, 0)} / 2.0;
  m.c_da = cplx{S(2, 0) - S(3, 1), S(2, 1) + S(3, 0)} / 2.0;
  return m;
}

/// Classical RK4 with fixed step from the vacuum; the last step is shortened to
/// land on t_end. Every record_every-th state is kept, plus the final one.
inline std::vector<MomentState> evolve_moments(const SystemParams& p, double t_end, double dt,
                                               int record_every = 1) {
  validate(p);
  if (!(dt > 0.0)) throw DomainError("evolve_moments: dt must be > 0");
  if (!(t_end >= 0.0)) throw DomainError("evolve_moments: t_end must be >= 0");
  if (record_every < 1) throw DomainError("evolve_moments: record_every must be >= 1");

  const auto sys = drift_matrix(p);
  const bool stable = stability_margin(p) < 0.0;
  auto rhs = [&](const Matrix8& s) -> Matrix8 {
    const Matrix8 as = sys.drift * s;
    return as + as.transpose() + sys.diffusion;  // exactly symmetric
  };

  std::vector<MomentState> out;
  MomentState state;
  out.push_back(state);
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  for (long n = 0; n < steps; ++n) {
    const double h = std::min(dt, t_end - state.t);
    const Matrix8 k1 = rhs(state.sigma);
    const Matrix8 k2 = rhs(state.sigma + 0.5 * h * k1);
    const Matrix8 k3 = rhs(state.sigma + 0.5 * h * k2);
    const Matrix8 k4 = rhs(state.sigma + h * k3);
    state.sigma += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    state.t = n + 1 == steps ? t_end : state.t + h;

    if (!state.sigma.allFinite() || (stable && state.sigma.cwiseAbs().maxCoeff() > 1e12)) {
      throw NumericalError("evolve_moments: moments blew up; step size too large");
    }
    if ((n + 1) % record_every == 0 || n + 1 == steps) out.push_back(state);
  }
  return out;
}

/// Bisection in beta on the sign of the pair-j stability margin, to 1e-10.
inline double threshold_search(const SystemParams& p, int branch, double beta_lo, double beta_hi) {
  check_branch(branch);
  auto margin = [&](double b) {
    SystemParams q = p;
    q.beta = b;
    return branch_margin(q, branch);
  };
  if (!(beta_lo < beta_hi) || !(margin(beta_lo) < 0.0) || !(margin(beta_hi) >= 0.0)) {
    throw DomainError("threshold_search: stability margin does not change sign over the bracket");
  }
  double lo = beta_lo, hi = beta_hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ringcav
