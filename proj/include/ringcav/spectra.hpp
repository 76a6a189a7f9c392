#pragma once

// Frequency-domain solution of the pair equations and the output-field
// statistics built from it. Everything is in the frame rotating at the mean
// laser frequency; nu is the rotating-frame frequency.
//
// Intracavity solution, s_1 = +1, s_2 = −1:
//
//     a_j(nu) = [M_j1(nu) a_in(nu) + s_j M_j2 a_in†(−nu)] / D_j(nu)
//
// Output: a_out = √(2κ) a − a_in = A_j(nu) a_in(nu) + B_j(nu) a_in†(−nu).
// The sideband densities n_j(nu) = |B_j(nu)|² and m_j(nu) = A_j(nu) B_j(−nu)
// fill the right/left covariance
//
//     f1 = 1/2 + (n1 + n2)/2,  f3 = (n1 − n2)/2,  f2 = (m1 + m2)/2,  f4 = (m1 − m2)/2
//
// over (a_R(nu), a_R(−nu)†, a_L(nu), a_L(−nu)†), vacuum input ⟨a_in a_in†⟩ = δ.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "ringcav/errors.hpp"
#include "ringcav/params.hpp"

namespace ringcav {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

// --- transfer functions ------------------------------------------------------

inline cplx transfer_denominator(const SystemParams& p, int branch, cplx nu) {
  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double l = p.lambda(branch);
  return (k - kI * (nu - W)) * (k - kI * (nu + W)) * (nu * nu - w0 * w0) + 4.0 * l * l * w0 * W;
}

inline cplx transfer_m1(const SystemParams& p, int branch, double nu) {
  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double l = p.lambda(branch);
  return std::sqrt(2.0 * k) * ((k - kI * (nu + W)) * (nu * nu - w0 * w0) - 2.0 * kI * l * l * w0);
}

inline cplx transfer_m2(const SystemParams& p, int branch) {
  const double l = p.lambda(branch);
  return -2.0 * kI * std::sqrt(2.0 * p.kappa) * l * l * p.omega_0;
}

struct TransferPoint {
  double nu = 0.0;
  cplx D1, D2, M11, M12, M21, M22;
};

inline TransferPoint transfer_functions(const SystemParams& p, double nu) {
  validate(p);
  require_below_threshold(p);
  TransferPoint t;
  t.nu = nu;
  t.D1 = transfer_denominator(p, 1, nu);
  t.D2 = transfer_denominator(p, 2, nu);
  t.M11 = transfer_m1(p, 1, nu);
  t.M12 = transfer_m2(p, 1);
  t.M21 = transfer_m1(p, 2, nu);
  t.M22 = transfer_m2(p, 2);
  for (int j = 1; j <= 2; ++j) {
    if (p.lambda(j) > 0.0 && (j == 1 ? t.D1 : t.D2) == 0.0) {
      throw ConsistencyError("transfer denominator vanishes on the real axis below threshold");
    }
  }
  return t;
}

inline double branch_sign(int branch) { return branch == 1 ? 1.0 : -1.0; }

/// Intracavity coefficients: a_j(nu) = c a_in(nu) + e a_in†(−nu).
struct IntracavityCoefficients {
  cplx c, e;
};

inline IntracavityCoefficients intracavity_coefficients(const SystemParams& p, int branch, double nu) {
  const double k = p.kappa;
  const double W = p.Omega(branch);
  if (p.lambda(branch) == 0.0) return {std::sqrt(2.0 * k) / (k - kI * (nu - W)), 0.0};
  const cplx D = transfer_denominator(p, branch, nu);
  if (D == 0.0) throw ConsistencyError("transfer denominator vanishes on the real axis");
  return {transfer_m1(p, branch, nu) / D, branch_sign(branch) * transfer_m2(p, branch) / D};
}

/// Output coefficients: a_out,j(nu) = A a_in(nu) + B a_in†(−nu).
struct OutputAmplitudes {
  cplx A, B;
};

inline OutputAmplitudes output_amplitudes(const SystemParams& p, int branch, double nu) {
  const auto ic = intracavity_coefficients(p, branch, nu);
  const double r = std::sqrt(2.0 * p.kappa);
  return {r * ic.c - 1.0, r * ic.e};
}

struct SidebandDensities {
  double n = 0.0;  ///< |B(nu)|²
  cplx m{};        ///< A(nu) B(−nu)
};

inline SidebandDensities sideband_densities(const SystemParams& p, int branch, double nu) {
  if (p.lambda(branch) == 0.0) return {};
  const auto plus = output_amplitudes(p, branch, nu);
  const auto minus = output_amplitudes(p, branch, -nu);
  return {std::norm(plus.B), plus.A * minus.B};
}

// --- output covariance -------------------------------------------------------

using Matrix4c = Eigen::Matrix4cd;

struct OutputCovariancePoint {
  double nu = 0.0;
  double f1 = 0.5;
  cplx f2{};
  double f3 = 0.0;
  cplx f4{};
  Matrix4c V = Matrix4c::Identity() * 0.5;
  Eigen::Matrix4d quadrature = Eigen::Matrix4d::Identity() * 0.5;  ///< over (X_R, P_R, X_L, P_L)
};

/// Complex covariance -> real quadrature covariance with x = (a + a†)/√2, p = i(a† − a)/√2.
inline Eigen::Matrix4d quadrature_form(const Matrix4c& V) {
  Matrix4c L = Matrix4c::Zero();
  const double r = 1.0 / std::sqrt(2.0);
  for (int m = 0; m < 2; ++m) {
    L(2 * m, 2 * m) = r;
    L(2 * m, 2 * m + 1) = r;
    L(2 * m + 1, 2 * m) = -kI * r;
    L(2 * m + 1, 2 * m + 1) = kI * r;
  }
  const Matrix4c S = L * V * L.adjoint();
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if (S.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ConsistencyError("output covariance has a non-real quadrature form");
  }
  Eigen::Matrix4d out = S.real();
  return (out + out.transpose()) / 2.0;
}

inline OutputCovariancePoint output_covariance(const SystemParams& p, double nu) {
  validate(p);
  require_below_threshold(p);
  const auto s1 = sideband_densities(p, 1, nu);
  const auto s2 = sideband_densities(p, 2, nu);

  OutputCovariancePoint c;
  c.nu = nu;
  c.f1 = 0.5 + (s1.n + s2.n) / 2.0;
  c.f3 = (s1.n - s2.n) / 2.0;
  c.f2 = (s1.m + s2.m) / 2.0;
  c.f4 = (s1.m - s2.m) / 2.0;

  const cplx f1 = c.f1, f3 = c.f3, f2 = c.f2, f4 = c.f4;
  c.V << f1, f2, f3, f4,                                     //
      std::conj(f2), f1, std::conj(f4), f3,                   //
      f3, f4, f1, f2,                                         //
      std::conj(f4), f3, std::conj(f2), f1;
  c.quadrature = quadrature_form(c.V);
  return c;
}

// --- symplectic analysis -----------------------------------------------------

struct SymplecticSpectrum {
  double nu_minus = 0.5;
  double nu_plus = 0.5;
};

/// Symplectic eigenvalues of a two-mode covariance. For positive-definite input
/// they are the moduli of the eigenvalues of the Hermitian i σ^½ Ω σ^½, which
/// stays accurate when ν₋ ≈ ν₊ (pure states); otherwise the local invariants.
inline SymplecticSpectrum two_mode_symplectic(const Eigen::Matrix4d& s) {
  SymplecticSpectrum out;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s);
  if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0) {
    const Eigen::Matrix4d root = es.operatorSqrt();
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    const Matrix4c h = kI * (root * omega * root).cast<cplx>();
    const Eigen::Vector4d ev = Eigen::SelfAdjointEigenSolver<Matrix4c>(h, Eigen::EigenvaluesOnly).eigenvalues();
    out.nu_minus = ev(2);  // ascending: −ν₊, −ν₋, ν₋, ν₊
    out.nu_plus = ev(3);
    return out;
  }
  const double detA = s.block<2, 2>(0, 0).determinant();
  const double detB = s.block<2, 2>(2, 2).determinant();
  const double detC = s.block<2, 2>(0, 2).determinant();
  const double det = s.determinant();
  const double seralian = detA + detB + 2.0 * detC;
  const double disc = std::max(0.0, seralian * seralian - 4.0 * det);
  const double big = (seralian + std::sqrt(disc)) / 2.0;
  out.nu_plus = std::sqrt(std::max(0.0, big));
  out.nu_minus = big > 0.0 ? std::sqrt(std::max(0.0, det / big)) : 0.0;
  return out;
}

/// Partial transposition of the second mode: P_L -> −P_L.
inline Eigen::Matrix4d partial_transpose(const Eigen::Matrix4d& s) {
  const Eigen::Vector4d f(1.0, 1.0, 1.0, -1.0);
  return f.asDiagonal() * s * f.asDiagonal();
}

struct LogNegativity {
  double V_s = 0.5;
  double E_n = 0.0;
};

inline LogNegativity log_negativity(const Eigen::Matrix4d& sigma) {
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (sigma.llt().info() != Eigen::Success) throw ConsistencyError("quadrature covariance is not positive definite");
  if (two_mode_symplectic(sigma).nu_minus < 0.5 - 1e-9 * scale) {
    throw ConsistencyError("quadrature covariance violates the uncertainty relation");
  }
  LogNegativity out;
  out.V_s = two_mode_symplectic(partial_transpose(sigma)).nu_minus;
  // Rounding alone leaves V_s a few ulps off 1/2 for separable states.
  if (std::abs(2.0 * out.V_s - 1.0) < 1e-14) out.V_s = 0.5;
  out.E_n = std::max(0.0, -std::log2(2.0 * out.V_s));
  return out;
}

inline LogNegativity log_negativity(const SystemParams& p, double nu) {
  return log_negativity(output_covariance(p, nu).quadrature);
}

// --- squeezing spectrum ------------------------------------------------------

struct SqueezingValues {
  double S_theta = 0.0;
  double S_theta_perp = 0.0;
};

/// S(nu, θ) = n1 + n2 + Re(e^{−2iθ}(m1 − m2)): normally ordered variance sum
/// of X_1^θ and P_2^θ at the paired sidebands (nu, −nu).
inline double squeezing_value(const OutputCovariancePoint& c, double theta) {
  return 2.0 * (c.f1 - 0.5) + 2.0 * (std::exp(-2.0 * kI * theta) * c.f4).real();
}

inline SqueezingValues squeezing_spectrum(const OutputCovariancePoint& c, double theta) {
  return {squeezing_value(c, theta), squeezing_value(c, theta + std::numbers::pi / 2.0)};
}

inline SqueezingValues squeezing_spectrum(const SystemParams& p, double nu, double theta) {
  return squeezing_spectrum(output_covariance(p, nu), theta);
}

struct SpectralPoint {
  double nu = 0.0;
  double f1 = 0.5;
  cplx f2{};
  double f3 = 0.0;
  cplx f4{};
  double S_theta = 0.0;
  double S_theta_perp = 0.0;
  double V_s = 0.5;
  double E_n = 0.0;
};

inline SpectralPoint spectral_point(const SystemParams& p, double nu, double theta) {
  const auto c = output_covariance(p, nu);
  const auto s = squeezing_spectrum(c, theta);
  const auto e = log_negativity(c.quadrature);
  return {nu, c.f1, c.f2, c.f3, c.f4, s.S_theta, s.S_theta_perp, e.V_s, e.E_n};
}

// --- quadrature angle --------------------------------------------------------

enum class ThetaObjective { min_s_at_zero, min_s_global };

/// Frequencies beyond this hold no structure: every root of D_j lies well inside.
inline double spectral_window(const SystemParams& p) {
  return 2.0 * std::max({p.omega_0, std::abs(p.Omega(1)), std::abs(p.Omega(2))}) + 10.0 * p.kappa;
}

namespace detail {

/// Grid scan followed by Brent refinement on the neighbouring cells.
template <typename F>
double grid_brent_argmin(F f, double lo, double hi, int points) {
  double best_x = lo;
  double best_f = f(lo);
  const double step = (hi - lo) / (points - 1);
  for (int i = 1; i < points; ++i) {
    const double x = lo + i * step;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  const auto r = boost::math::tools::brent_find_minima(f, a, b, 40);
  return r.second <= best_f ? r.first : best_x;
}

inline double wrap_pi(double theta) {
  theta = std::fmod(theta, std::numbers::pi);
  if (theta < 0.0) theta += std::numbers::pi;
  return theta;
}

}  // namespace detail

/// Quadrature angle in [0, π) minimizing S. min_s_at_zero minimizes S(0, θ);
/// min_s_global minimizes over both nu and θ, first locating the frequency
/// of deepest squeezing n(nu) − |m(nu)| and then the angle there.
inline double optimize_theta(const SystemParams& p, ThetaObjective objective = ThetaObjective::min_s_global) {
  validate(p);
  require_below_threshold(p);
  if (p.beta == 0.0) return 0.0;

  double nu_star = 0.0;
  if (objective == ThetaObjective::min_s_global) {
    auto envelope = [&](double nu) {
      const auto c = output_covariance(p, nu);
      return 2.0 * (c.f1 - 0.5) - 2.0 * std::abs(c.f4);
    };
    // S is even in nu.
    nu_star = detail::grid_brent_argmin(envelope, 0.0, spectral_window(p), 4001);
  }
  const auto c = output_covariance(p, nu_star);
  const double theta =
      detail::grid_brent_argmin([&](double t) { return squeezing_value(c, t); }, 0.0, std::numbers::pi, 721);
  return detail::wrap_pi(theta);
}

// --- resonances --------------------------------------------------------------

struct Resonance {
  int branch = 1;
  cplx root{};
  double residual = 0.0;
};

/// Coefficients of D_j in ascending powers of nu.
inline std::array<cplx, 5> denominator_coefficients(const SystemParams& p, int branch) {
  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double l = p.lambda(branch);
  const double q = k * k + W * W;
  return {cplx{-q * w0 * w0 + 4.0 * l * l * w0 * W, 0.0}, cplx{0.0, 2.0 * k * w0 * w0}, cplx{q + w0 * w0, 0.0},
          cplx{0.0, -2.0 * k}, cplx{-1.0, 0.0}};
}

inline std::vector<Resonance> resonances(const SystemParams& p) {
  validate(p);
  require_below_threshold(p);
  std::vector<Resonance> out;
  for (int j = 1; j <= 2; ++j) {
    const auto c = denominator_coefficients(p, j);
    Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
    for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i] / c[4];
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(companion, false);
    if (es.info() != Eigen::Success) throw NumericalError("resonances: eigenvalue iteration did not converge");

    double cmax = 0.0;
    for (const auto& x : c) cmax = std::max(cmax, std::abs(x));
    for (int i = 0; i < 4; ++i) {
      cplx z = es.eigenvalues()(i);
      for (int it = 0; it < 3; ++it) {
        const cplx f = transfer_denominator(p, j, z);
        const cplx df = c[1] + z * (2.0 * c[2] + z * (3.0 * c[3] + z * 4.0 * c[4]));
        if (df == 0.0) break;
        const cplx next = z - f / df;
        if (std::abs(transfer_denominator(p, j, next)) >= std::abs(f)) break;
        z = next;
      }
      const double residual = std::abs(transfer_denominator(p, j, z));
      if (residual > 1e-9 * cmax) {
        throw NumericalError("resonances: branch " + std::to_string(j) + " root residual " +
                             std::to_string(residual) + " exceeds tolerance");
      }
      out.push_back({j, z, residual});
    }
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
    if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
    if (a.branch != b.branch) return a.branch < b.branch;
    return a.root.imag() < b.root.imag();
  });
  return out;
}

// --- collective-mode response ------------------------------------------------

inline constexpr double kCollectivePoleGuard = 1e-6;

/// d_j(nu) = λ_j (a_j(nu) ± a_j(−nu)†)/(nu − ω₀), expressed on the inputs:
/// d_j(nu) = c a_in(nu) + e a_in†(−nu). Rejects nu within the pole guard of ω₀.
inline IntracavityCoefficients collective_coefficients(const SystemParams& p, int branch, double nu) {
  if (std::abs(nu - p.omega_0) < kCollectivePoleGuard) {
    throw DomainError("collective response requested within the pole guard of omega_0");
  }
  const double l = p.lambda(branch);
  if (l == 0.0) return {0.0, 0.0};
  const auto at = intracavity_coefficients(p, branch, nu);
  const auto mirror = intracavity_coefficients(p, branch, -nu);
  const double s = branch_sign(branch);
  const double g = l / (nu - p.omega_0);
  return {g * (at.c + s * std::conj(mirror.e)), g * (at.e + s * std::conj(mirror.c))};
}

// --- Wiener-Khinchin integration ---------------------------------------------

namespace detail {

/// Adaptive 61-point Gauss-Kronrod (GSL QAG) on [a, b]. Returns the integral
/// and adds the absolute error estimate to *abserr. Roundoff or subdivision
/// limits are not fatal here: the caller judges the accumulated error.
template <typename F>
double qag(F f, double a, double b, double rel_tol, double* abserr) {
  constexpr std::size_t kLimit = 2000;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(kLimit), &gsl_integration_workspace_free);
  if (!ws) throw NumericalError("qag: workspace allocation failed");
  gsl_function gf;
  gf.function = [](double x, void* ctx) { return (*static_cast<F*>(ctx))(x); };
  gf.params = &f;
  double result = 0.0, err = 0.0;
  const auto previous = gsl_set_error_handler_off();
  const int status = gsl_integration_qag(&gf, a, b, 0.0, rel_tol, kLimit, GSL_INTEG_GAUSS61, ws.get(), &result, &err);
  gsl_set_error_handler(previous);
  if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER && status != GSL_ESING) {
    throw NumericalError(std::string("qag: ") + gsl_strerror(status));
  }
  *abserr += err;
  return result;
}

}  // namespace detail

enum class IntracavityMoment {
  number,            ///< <a_j†a_j>, density |e(nu)|²
  square,            ///< <a_j a_j>, density c(nu) e(−nu)
  collective_number  ///< <d_j†d_j>, density |e_d(nu)|²
};

struct IntegrationResult {
  cplx value{};
  double error = 0.0;  ///< quadrature error estimate plus tail bound
};

/// (1/2π) ∫ density dnu over |nu| ≤ window (default 50 max(κ, ω₀, Ω₁)), split at
/// the resonance frequencies. Beyond the window the density is bounded by its
/// edge value times (window/nu)², which gives the tail term of the error.
inline IntegrationResult integrate_intracavity_spectrum(const SystemParams& p, int branch, IntracavityMoment moment,
                                                        double window = 0.0, double rel_tol = 1e-10) {
  check_branch(branch);
  validate(p);
  require_below_threshold(p);
  if (p.lambda(branch) == 0.0) return {};
  if (window <= 0.0) window = 50.0 * std::max({p.kappa, p.omega_0, p.Omega(1)});

  auto density = [&](double nu) -> cplx {
    switch (moment) {
      case IntracavityMoment::number:
        return std::norm(intracavity_coefficients(p, branch, nu).e);
      case IntracavityMoment::square:
        return intracavity_coefficients(p, branch, nu).c * intracavity_coefficients(p, branch, -nu).e;
      case IntracavityMoment::collective_number: {
        // Removable pole: interpolate across the guard band from its edges.
        const double g = 2.0 * kCollectivePoleGuard;
        const double off = nu - p.omega_0;
        if (std::abs(off) >= g) return std::norm(collective_coefficients(p, branch, nu).e);
        const double lo = std::norm(collective_coefficients(p, branch, p.omega_0 - g).e);
        const double hi = std::norm(collective_coefficients(p, branch, p.omega_0 + g).e);
        return lo + (hi - lo) * (off + g) / (2.0 * g);
      }
    }
    return 0.0;
  };

  std::vector<double> cuts{-window, window};
  for (const auto& r : resonances(p)) {
    if (r.branch != branch || std::abs(r.root.real()) >= window) continue;
    // Geometric flanks: a narrow peak (small |Im|) and its slowly decaying
    // wings each get cells matched to their local scale.
    cuts.push_back(r.root.real());
    for (double off = -r.root.imag(); off < window; off *= 4.0) {
      for (const double x : {r.root.real() - off, r.root.real() + off})
        if (std::abs(x) < window) cuts.push_back(x);
    }
  }
  if (moment == IntracavityMoment::collective_number && p.omega_0 < window) cuts.push_back(p.omega_0);
  std::sort(cuts.begin(), cuts.end());
  // Near-coincident cuts (e.g. two roots on the imaginary axis) would leave cells too small to converge.
  const double min_gap = 1e-9 * window;
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [&](double a, double b) { return b - a < min_gap; }), cuts.end());
  cuts.back() = window;

  // Occupation densities are real; only the pair-squeezing density needs an imaginary part.
  const bool complex_valued = moment == IntracavityMoment::square;
  double re = 0.0, im = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    re += detail::qag([&](double x) { return density(x).real(); }, cuts[i], cuts[i + 1], rel_tol, &err);
    if (complex_valued) {
      im += detail::qag([&](double x) { return density(x).imag(); }, cuts[i], cuts[i + 1], rel_tol, &err);
    }
  }

  // Tails: power law fitted between window/2 and window, summed beyond the window.
  // The error term keeps the cruder bound f(window) (window/nu)².
  double tail = 0.0, tail_bound = 0.0;
  for (const double edge : {window, -window}) {
    const double f_edge = std::abs(density(edge));
    const double f_half = std::abs(density(edge / 2.0));
    tail_bound += f_edge * window;
    if (f_edge > 0.0 && f_half > 0.0) {
      const double q = std::log(f_half / f_edge) / std::log(2.0);
      if (q > 1.5) tail += density(edge).real() * window / (q - 1.0);
    }
  }
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);

  IntegrationResult out;
  out.value = cplx{re + tail, im} * inv2pi;
  out.error = (err + tail_bound) * inv2pi;
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()) ||
      out.error > 1e-5 * std::max(std::abs(out.value), 1e-12)) {
    throw NumericalError("intracavity integration did not reach tolerance: error estimate " +
                         std::to_string(out.error));
  }
  return out;
}

}  // namespace ringcav
