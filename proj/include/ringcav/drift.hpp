#pragma once

// Linear quantum Langevin equations of the two pairs in real quadratures
// x = (c + c†)/√2, p = i(c† − c)/√2, ordered
//
//     (x_a1, p_a1, x_d1, p_d1, x_a2, p_a2, x_d2, p_d2).
//
// The symmetrized covariance obeys dΣ/dt = AΣ + ΣAᵀ + Q with Q = κ on the
// cavity quadratures. Only the cavity modes are damped.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <complex>

#include "ringcav/params.hpp"

namespace ringcav {

using Matrix4 = Eigen::Matrix4d;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

struct PairBlock {
  Matrix4 drift = Matrix4::Zero();
  Matrix4 diffusion = Matrix4::Zero();
};

struct DriftSystem {
  Matrix8 drift = Matrix8::Zero();
  Matrix8 diffusion = Matrix8::Zero();
};

/// 4x4 drift and diffusion of pair j over (x_a, p_a, x_d, p_d).
inline PairBlock pair_block(const SystemParams& p, int branch) {
  check_branch(branch);
  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double c = 2.0 * p.lambda(branch);

  PairBlock b;
  auto& A = b.drift;
  A(0, 0) = -k;
  A(0, 1) = W;
  A(1, 0) = -W;
  A(1, 1) = -k;
  A(2, 3) = w0;
  A(3, 2) = -w0;
  if (branch == 1) {
    // x_a x_d coupling drives the momenta
    A(1, 2) = -c;
    A(3, 0) = -c;
  } else {
    // p_a p_d coupling drives the positions
    A(0, 3) = c;
    A(2, 1) = c;
  }
  b.diffusion(0, 0) = k;
  b.diffusion(1, 1) = k;
  return b;
}

inline DriftSystem drift_matrix(const SystemParams& p) {
  DriftSystem s;
  for (int j = 1; j <= 2; ++j) {
    const auto b = pair_block(p, j);
    const int o = 4 * (j - 1);
    s.drift.block<4, 4>(o, o) = b.drift;
    s.diffusion.block<4, 4>(o, o) = b.diffusion;
  }
  return s;
}

inline std::array<std::complex<double>, 4> pair_eigenvalues(const SystemParams& p, int branch) {
  if (p.lambda(branch) == 0.0) {
    // Exact spectrum of the uncoupled oscillators; avoids round-off on the imaginary axis.
    const double W = p.Omega(branch);
    return {{{-p.kappa, W}, {-p.kappa, -W}, {0.0, p.omega_0}, {0.0, -p.omega_0}}};
  }
  Eigen::EigenSolver<Matrix4> es(pair_block(p, branch).drift, false);
  std::array<std::complex<double>, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

/// Largest real part among the drift eigenvalues of pair j.
inline double branch_margin(const SystemParams& p, int branch) {
  const auto ev = pair_eigenvalues(p, branch);
  double m = ev[0].real();
  for (const auto& e : ev) m = std::max(m, e.real());
  return m;
}

/// Negative iff both pairs relax to a unique steady state; 0 for an uncoupled collective mode.
inline double stability_margin(const SystemParams& p) { return std::max(branch_margin(p, 1), branch_margin(p, 2)); }

/// Coefficients c[0..4] of det(μ − A_j) = Σ c_k μ^k, from the closed form
/// ((κ+μ)² + Ω²)(μ² + ω₀²) − 4λ²ω₀Ω.
inline std::array<double, 5> characteristic_coefficients(const SystemParams& p, int branch) {
  check_branch(branch);
  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double l = p.lambda(branch);
  const double q = k * k + W * W;
  return {q * w0 * w0 - 4.0 * l * l * w0 * W, 2.0 * k * w0 * w0, q + w0 * w0, 2.0 * k, 1.0};
}

}  // namespace ringcav
