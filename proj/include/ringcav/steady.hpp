#pragma once

// Closed-form steady-state moments of the two pairs and the equal-time
// coherence observables of the right/left cavity modes built from them.
// Fourth-order moments use Gaussian factorization throughout.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringcav/errors.hpp"
#include "ringcav/format.hpp"
#include "ringcav/params.hpp"

namespace ringcav {

using cplx = std::complex<double>;

struct PairMoments {
  double n_a = 0.0;  ///< <a†a>
  double n_d = 0.0;  ///< <d†d>
  cplx m_da{};       ///< <d†a>
  cplx c_da{};       ///< <d a>
  cplx a_sq{};       ///< <a a>
  cplx d_sq{};       ///< <d d>
};

/// Steady-state second moments of pair j.
///
/// An uncoupled pair (beta = 0, or branch 2 at alpha_k = 1) keeps its initial
/// vacuum: its collective mode is undamped, so the limit lambda -> 0+ (which
/// leaves a finite n_d) is not the state the system actually reaches.
inline PairMoments pair_moments(int branch, const SystemParams& p) {
  check_branch(branch);
  validate(p);
  const double l = p.lambda(branch);
  if (l == 0.0) return {};
  require_below_threshold(p, branch);

  const double k = p.kappa;
  const double W = p.Omega(branch);
  const double w0 = p.omega_0;
  const double h = threshold_function(p, branch);
  const double s = branch == 1 ? -1.0 : 1.0;  // (−1)^j
  const double l2 = l * l;
  const double q = k * k + W * W;
  const cplx z{W, k};

  PairMoments m;
  m.n_a = l2 * q / (2.0 * W * h);
  m.n_d = ((2.0 * l2 * W + w0 * (k * k + (w0 - W) * (w0 - W))) * h + 8.0 * l2 * l2 * W * W) / (4.0 * w0 * w0 * W * h);
  m.m_da = -l * (z * q - h) / (4.0 * W * h);
  m.c_da = s * l * (z * q + h) / (4.0 * W * h);
  m.a_sq = -s * l2 * z * z / (2.0 * W * h);
  m.d_sq = -s * l2 * q / (2.0 * w0 * h);
  return m;
}

struct CavityMoments {
  double n_R = 0.0;  ///< <a_R†a_R> = <a_L†a_L>
  cplx coh_RL{};     ///< <a_R†a_L>
  cplx sq_RR{};      ///< <a_R a_R>
  cplx sq_RL{};      ///< <a_R a_L>
};

inline CavityMoments cavity_moments(const PairMoments& m1, const PairMoments& m2) {
  return {(m1.n_a + m2.n_a) / 2.0, cplx{(m1.n_a - m2.n_a) / 2.0, 0.0}, (m1.a_sq + m2.a_sq) / 2.0,
          (m1.a_sq - m2.a_sq) / 2.0};
}

inline CavityMoments cavity_moments(const SystemParams& p) {
  require_below_threshold(p);
  return cavity_moments(pair_moments(1, p), pair_moments(2, p));
}

/// The mode-coherence coefficient U, so that <a_R†a_L> = alpha_k U.
/// Written directly in omega, delta, kappa, beta, independent of the pair moments.
inline double coherence_u(const SystemParams& p) {
  validate(p);
  const double a2 = p.alpha_k * p.alpha_k;
  const double b2 = p.beta * p.beta;
  const double w = p.omega;
  const double d = p.delta;
  const double k = p.kappa;
  const double w0 = p.omega_0;

  const double u1 = b2 * (w - a2 * d);
  const double u2 = a2 * d * d + k * k + w * w;
  const double u3 = u2 * w0 - 4.0 * b2 * (a2 * d + w);
  const double w1 = b2 * (w - d);
  const double w2 = 2.0 * w * d;
  const double w3 = 4.0 * b2 * (w + d) - w2 * w0;

  const double num = w1 * (a2 * w2 * w3 + u2 * u3) + u1 * (u3 * w2 + u2 * w3);
  const double den = 2.0 * (w * w - a2 * d * d) * (u3 * u3 - a2 * w3 * w3);
  return num / den;
}

struct CoherenceDegree {
  double gamma_RL = 0.0;
  double visibility = 0.0;
};

inline CoherenceDegree coherence_degree(const PairMoments& m1, const PairMoments& m2) {
  const double total = m1.n_a + m2.n_a;
  if (!(total > 0.0)) throw UndefinedObservableError("coherence degree undefined: cavity modes are empty");
  const double g = std::abs(m1.n_a - m2.n_a) / total;
  return {g, g};
}

inline CoherenceDegree coherence_degree(const SystemParams& p) {
  require_below_threshold(p);
  return coherence_degree(pair_moments(1, p), pair_moments(2, p));
}

struct AnomalousCoherences {
  double eta_RR = 0.0;
  double eta_RL = 0.0;
};

inline AnomalousCoherences anomalous_coherences(const PairMoments& m1, const PairMoments& m2) {
  const double total = m1.n_a + m2.n_a;
  if (!(total > 0.0)) throw UndefinedObservableError("anomalous coherence undefined: cavity modes are empty");
  return {std::abs(m1.a_sq + m2.a_sq) / total, std::abs(m1.a_sq - m2.a_sq) / total};
}

inline AnomalousCoherences anomalous_coherences(const SystemParams& p) {
  require_below_threshold(p);
  return anomalous_coherences(pair_moments(1, p), pair_moments(2, p));
}

struct G2Functions {
  double g2_RR = 0.0;
  double g2_LL = 0.0;
  double g2_RL = 0.0;
};

inline G2Functions g2_functions(const PairMoments& m1, const PairMoments& m2) {
  const auto g = coherence_degree(m1, m2);
  const auto e = anomalous_coherences(m1, m2);
  const double auto_corr = 2.0 + e.eta_RR * e.eta_RR;
  return {auto_corr, auto_corr, 1.0 + g.gamma_RL * g.gamma_RL + e.eta_RL * e.eta_RL};
}

inline G2Functions g2_functions(const SystemParams& p) {
  require_below_threshold(p);
  return g2_functions(pair_moments(1, p), pair_moments(2, p));
}

inline double chi_rl(const PairMoments& m1, const PairMoments& m2) {
  const auto g = g2_functions(m1, m2);
  return g.g2_RR * g.g2_LL / (g.g2_RL * g.g2_RL);
}

/// <a†²a²><d†²d²> / <a†d†ad>² for one pair.
inline double chi_pair(const PairMoments& m) {
  const double aa = 2.0 * m.n_a * m.n_a + std::norm(m.a_sq);
  const double dd = 2.0 * m.n_d * m.n_d + std::norm(m.d_sq);
  const double ad = m.n_a * m.n_d + std::norm(m.m_da) + std::norm(m.c_da);
  if (!(ad > 0.0)) throw UndefinedObservableError("pair Cauchy-Schwarz ratio undefined: pair is in vacuum");
  return aa * dd / (ad * ad);
}

inline double chi_rl(const SystemParams& p) {
  require_below_threshold(p);
  return chi_rl(pair_moments(1, p), pair_moments(2, p));
}

inline double chi_pair(const SystemParams& p, int branch) { return chi_pair(pair_moments(branch, p)); }

struct CauchySchwarz {
  double chi_RL = 0.0;
  double chi_11 = 0.0;
  double chi_22 = 0.0;
};

inline CauchySchwarz cauchy_schwarz(const SystemParams& p) {
  require_below_threshold(p);
  const auto m1 = pair_moments(1, p);
  const auto m2 = pair_moments(2, p);
  return {chi_rl(m1, m2), chi_pair(m1), chi_pair(m2)};
}

/// Normally ordered variance sum of X_1^θ and P_2^θ. Quadrature phases
/// phi_j = arctan(kappa/Omega_j).
inline double total_field_variance_sum(const SystemParams& p, double theta) {
  require_below_threshold(p);
  const auto m1 = pair_moments(1, p);
  const auto m2 = pair_moments(2, p);
  const double c1 = std::cos(theta + std::atan(p.kappa / p.Omega(1)));
  const double c2 = std::cos(theta + std::atan(p.kappa / p.Omega(2)));
  return m1.n_a * c1 * c1 + m2.n_a * c2 * c2;
}

// --- observable record -------------------------------------------------------

/// Normalized quantities are empty where they are 0/0.
struct CavityObservables {
  double n_R = 0.0;
  cplx coh_RL{};
  std::optional<double> gamma_RL, visibility;
  std::optional<double> eta_RR, eta_RL;
  std::optional<double> g2_RR, g2_LL, g2_RL;
  std::optional<double> chi_RL, chi_11, chi_22;
  double U_value = 0.0;
};

inline CavityObservables observables(const SystemParams& p) {
  validate(p);
  require_below_threshold(p);
  const auto m1 = pair_moments(1, p);
  const auto m2 = pair_moments(2, p);
  const auto c = cavity_moments(m1, m2);

  CavityObservables o;
  o.n_R = c.n_R;
  o.coh_RL = c.coh_RL;
  o.U_value = coherence_u(p);
  if (m1.n_a + m2.n_a > 0.0) {
    const auto g = coherence_degree(m1, m2);
    const auto e = anomalous_coherences(m1, m2);
    const auto g2 = g2_functions(m1, m2);
    o.gamma_RL = g.gamma_RL;
    o.visibility = g.visibility;
    o.eta_RR = e.eta_RR;
    o.eta_RL = e.eta_RL;
    o.g2_RR = g2.g2_RR;
    o.g2_LL = g2.g2_LL;
    o.g2_RL = g2.g2_RL;
    o.chi_RL = chi_rl(m1, m2);
  }
  try {
    o.chi_11 = chi_pair(m1);
  } catch (const UndefinedObservableError&) {
  }
  try {
    o.chi_22 = chi_pair(m2);
  } catch (const UndefinedObservableError&) {
  }
  return o;
}

inline const std::vector<std::string>& observables_csv_columns() {
  static const std::vector<std::string> cols{
      "alpha_k", "beta",   "n_R",   "Re coh_RL", "Im coh_RL", "gamma_RL", "visibility", "eta_RR", "eta_RL",
      "g2_RR",   "g2_LL", "g2_RL", "chi_RL",    "chi_11",    "chi_22",   "U_value",    "error"};
  return cols;
}

inline constexpr const char* kUndefinedMarker = "undefined";

/// One CSV row. With no observables the row carries only the key and the error text.
inline std::string observables_csv_row(const SystemParams& p, const CavityObservables* o, const std::string& error) {
  std::vector<std::string> f{format_double(p.alpha_k), format_double(p.beta)};
  if (o == nullptr) {
    f.resize(observables_csv_columns().size() - 1);
    f.push_back(error);
    return join_csv(f);
  }
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(kUndefinedMarker); };
  f.push_back(format_double(o->n_R));
  f.push_back(format_double(o->coh_RL.real()));
  f.push_back(format_double(o->coh_RL.imag()));
  for (const auto* v : {&o->gamma_RL, &o->visibility, &o->eta_RR, &o->eta_RL, &o->g2_RR, &o->g2_LL, &o->g2_RL,
                        &o->chi_RL, &o->chi_11, &o->chi_22}) {
    f.push_back(opt(*v));
  }
  f.push_back(format_double(o->U_value));
  f.push_back(error);
  return join_csv(f);
}

inline nlohmann::json observables_json(const SystemParams& p, const CavityObservables* o, const std::string& error) {
  nlohmann::json j;
  j["alpha_k"] = p.alpha_k;
  j["beta"] = p.beta;
  if (o != nullptr) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    j["n_R"] = o->n_R;
    j["coh_RL"] = {o->coh_RL.real(), o->coh_RL.imag()};
    j["gamma_RL"] = opt(o->gamma_RL);
    j["visibility"] = opt(o->visibility);
    j["eta_RR"] = opt(o->eta_RR);
    j["eta_RL"] = opt(o->eta_RL);
    j["g2_RR"] = opt(o->g2_RR);
    j["g2_LL"] = opt(o->g2_LL);
    j["g2_RL"] = opt(o->g2_RL);
    j["chi_RL"] = opt(o->chi_RL);
    j["chi_11"] = opt(o->chi_11);
    j["chi_22"] = opt(o->chi_22);
    j["U_value"] = o->U_value;
  }
  j["error"] = error;
  return j;
}

}  // namespace ringcav
