#pragma once

// Effective-model parameters of two counter-propagating cavity modes coupled to
// a Raman-driven atomic ensemble. After rotating to the superposition modes
// a_{1,2} = (a_R ± a_L)/√2 the system splits into two independent Dicke pairs
//
//     H_j = Omega_j a_j†a_j + omega_0 d_j†d_j + lambda_j (a_j + a_j†)(d_j + d_j†)   (j = 1)
//     H_j = Omega_j a_j†a_j + omega_0 d_j†d_j − lambda_j (a_j − a_j†)(d_j − d_j†)   (j = 2)
//
// with lambda_{1,2} = beta √(1 ± alpha_k) and Omega_{1,2} = omega ± alpha_k delta.
// Rates are plain reals; the figure presets use omega = omega_0 = 1 = 5 kappa.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "ringcav/errors.hpp"

namespace ringcav {

struct SystemParams {
  double omega = 1.0;
  double omega_0 = 1.0;
  double delta = 0.1 * std::numbers::pi;
  double beta = 0.0;
  double alpha_k = 0.0;
  double phi_N = 0.0;
  double kappa = 0.2;

  double lambda(int branch) const { return beta * std::sqrt(branch == 1 ? 1.0 + alpha_k : 1.0 - alpha_k); }
  double Omega(int branch) const { return branch == 1 ? omega + alpha_k * delta : omega - alpha_k * delta; }

  double lambda_1() const { return lambda(1); }
  double lambda_2() const { return lambda(2); }
  double Omega_1() const { return Omega(1); }
  double Omega_2() const { return Omega(2); }
};

inline bool operator==(const SystemParams& a, const SystemParams& b) {
  return a.omega == b.omega && a.omega_0 == b.omega_0 && a.delta == b.delta && a.beta == b.beta &&
         a.alpha_k == b.alpha_k && a.phi_N == b.phi_N && a.kappa == b.kappa;
}

/// omega_0 = omega = 1, delta = 0.1π, kappa = 0.2: the parameter set shared by all figures.
inline SystemParams figure_params(double alpha_k, double beta) {
  SystemParams p;
  p.alpha_k = alpha_k;
  p.beta = beta;
  return p;
}

inline void check_branch(int branch) {
  if (branch != 1 && branch != 2) throw DomainError("branch must be 1 or 2, got " + std::to_string(branch));
}

inline void validate(const SystemParams& p) {
  const double fields[] = {p.omega, p.omega_0, p.delta, p.beta, p.alpha_k, p.phi_N, p.kappa};
  for (double v : fields) {
    if (!std::isfinite(v)) throw DomainError("parameters must be finite");
  }
  if (!(p.kappa > 0.0)) throw DomainError("kappa must be > 0");
  if (p.beta < 0.0) throw DomainError("beta must be >= 0");
  if (p.alpha_k < 0.0 || p.alpha_k > 1.0) throw DomainError("alpha_k must lie in [0, 1]");
}

/// h_j = omega_0 (kappa² + Omega_j²) − 4 lambda_j² Omega_j; positive exactly below threshold j.
inline double threshold_function(const SystemParams& p, int branch) {
  check_branch(branch);
  const double l = p.lambda(branch);
  const double W = p.Omega(branch);
  return p.omega_0 * (p.kappa * p.kappa + W * W) - 4.0 * l * l * W;
}

/// Critical beta of one branch; infinity when the branch is uncoupled (alpha_k = 1, branch 2).
inline double critical_coupling(const SystemParams& p, int branch) {
  check_branch(branch);
  const double W = p.Omega(branch);
  if (!(W > 0.0)) throw DomainError("Omega_" + std::to_string(branch) + " must be > 0 for a finite threshold");
  if (!(p.omega_0 > 0.0)) throw DomainError("omega_0 must be > 0 for a finite threshold");
  const double s = branch == 1 ? 1.0 + p.alpha_k : 1.0 - p.alpha_k;
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(p.omega_0 * (p.kappa * p.kappa + W * W) / W) / (2.0 * std::sqrt(s));
}

struct CriticalCouplings {
  double beta_c1 = 0.0;
  double beta_c2 = 0.0;
};

inline CriticalCouplings critical_couplings(const SystemParams& p) {
  return {critical_coupling(p, 1), critical_coupling(p, 2)};
}

/// Branch j is below threshold. An uncoupled branch (lambda_j = 0) counts as below.
inline bool below_threshold(const SystemParams& p, int branch) {
  return p.lambda(branch) == 0.0 || threshold_function(p, branch) > 0.0;
}

inline bool below_threshold(const SystemParams& p) { return below_threshold(p, 1) && below_threshold(p, 2); }

inline double critical_or_nan(const SystemParams& p, int branch) {
  try {
    return critical_coupling(p, branch);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline void require_below_threshold(const SystemParams& p, int branch) {
  if (!below_threshold(p, branch)) throw AboveThresholdError(branch, p.beta, critical_or_nan(p, branch));
}

inline void require_below_threshold(const SystemParams& p) {
  require_below_threshold(p, 1);
  require_below_threshold(p, 2);
}

// --- raw atomic parameters ---------------------------------------------------

struct RawParams {
  double g = 0.0;
  double N = 1.0;
  double Delta = 0.0;
  double Omega_u = 0.0;
  double Omega_s = 0.0;
  double Delta_c = 0.0;
  double omega_1 = 0.0;
  double omega_d = 0.0;
  double kappa = 0.2;
  double alpha_k = 0.0;
  double phi_N = 0.0;
};

/// Adiabatic elimination is trustworthy when the detuning dominates every other rate.
inline bool dispersive_regime(const RawParams& raw, double ratio = 10.0) {
  const double largest = std::max({std::abs(raw.Omega_u), std::abs(raw.Omega_s), std::abs(raw.g)});
  return std::abs(raw.Delta) >= ratio * largest;
}

inline SystemParams derive_params(const RawParams& raw) {
  if (raw.Delta == 0.0) throw DomainError("derive_params: Delta must be nonzero");
  if (!(raw.kappa > 0.0)) throw DomainError("derive_params: kappa must be > 0");
  if (!(raw.N >= 1.0)) throw DomainError("derive_params: N must be >= 1");
  if (raw.alpha_k < 0.0 || raw.alpha_k > 1.0) throw DomainError("derive_params: alpha_k must lie in [0, 1]");

  const double shift = raw.N * raw.g * raw.g / raw.Delta;
  const double beta_u = std::sqrt(raw.N) * raw.g * raw.Omega_u / (2.0 * raw.Delta);
  const double beta_s = std::sqrt(raw.N) * raw.g * raw.Omega_s / (2.0 * raw.Delta);
  if (std::abs(beta_u - beta_s) > 1e-12 * std::max(1.0, std::abs(beta_u))) {
    throw UnsupportedConfigError("derive_params: beta_u != beta_s; the effective model needs equal Raman couplings");
  }

  SystemParams p;
  p.omega = raw.Delta_c + shift;
  p.omega_0 = raw.omega_1 - raw.omega_d + (raw.Omega_u * raw.Omega_u - raw.Omega_s * raw.Omega_s) / (4.0 * raw.Delta);
  p.delta = shift;
  p.beta = std::abs(beta_u);
  p.alpha_k = raw.alpha_k;
  p.phi_N = raw.phi_N;
  p.kappa = raw.kappa;
  return p;
}

// --- JSON --------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const SystemParams& p) {
  j = nlohmann::json{{"omega", p.omega}, {"omega0", p.omega_0}, {"delta", p.delta}, {"beta", p.beta},
                     {"alpha_k", p.alpha_k}, {"phi_N", p.phi_N},  {"kappa", p.kappa}};
}

inline void from_json(const nlohmann::json& j, SystemParams& p) {
  static const char* const keys[] = {"omega", "omega0", "delta", "beta", "alpha_k", "phi_N", "kappa"};
  if (!j.is_object()) throw DomainError("parameter record must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw DomainError("unknown parameter key '" + key + "'");
    if (!value.is_number()) throw DomainError("parameter '" + key + "' must be a number");
  }
  for (const char* k : keys) {
    if (!j.contains(k)) throw DomainError(std::string("missing parameter key '") + k + "'");
  }
  p.omega = j.at("omega").get<double>();
  p.omega_0 = j.at("omega0").get<double>();
  p.delta = j.at("delta").get<double>();
  p.beta = j.at("beta").get<double>();
  p.alpha_k = j.at("alpha_k").get<double>();
  p.phi_N = j.at("phi_N").get<double>();
  p.kappa = j.at("kappa").get<double>();
}

inline void to_json(nlohmann::json& j, const RawParams& r) {
  j = nlohmann::json{{"g", r.g},           {"N", r.N},           {"Delta", r.Delta},     {"Omega_u", r.Omega_u},
                     {"Omega_s", r.Omega_s}, {"Delta_c", r.Delta_c}, {"omega_1", r.omega_1}, {"omega_d", r.omega_d},
                     {"kappa", r.kappa},   {"alpha_k", r.alpha_k}, {"phi_N", r.phi_N}};
}

inline void from_json(const nlohmann::json& j, RawParams& r) {
  if (!j.is_object()) throw DomainError("raw parameter record must be a JSON object");
  auto get = [&](const char* key, double& out, bool required) {
    if (!j.contains(key)) {
      if (required) throw DomainError(std::string("missing raw parameter key '") + key + "'");
      return;
    }
    if (!j.at(key).is_number()) throw DomainError(std::string("raw parameter '") + key + "' must be a number");
    out = j.at(key).get<double>();
  };
  get("g", r.g, true);
  get("N", r.N, true);
  get("Delta", r.Delta, true);
  get("Omega_u", r.Omega_u, true);
  get("Omega_s", r.Omega_s, true);
  get("Delta_c", r.Delta_c, true);
  get("omega_1", r.omega_1, true);
  get("omega_d", r.omega_d, true);
  get("kappa", r.kappa, true);
  get("alpha_k", r.alpha_k, false);
  get("phi_N", r.phi_N, false);
}

}  // namespace ringcav
