#pragma once

// Seeded campaign comparing the closed forms against the oracle engines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ringcav/oracle.hpp"
#include "ringcav/params.hpp"
#include "ringcav/random.hpp"
#include "ringcav/spectra.hpp"
#include "ringcav/steady.hpp"

namespace ringcav {

struct VerifyTolerances {
  double moments_rel = 1e-8;
  double coherence_rel = 1e-10;
  double threshold_abs = 1e-6;
  double wiener_khinchin_rel = 1e-4;
  double endpoint_abs = 1e-9;
};

/// Random below-threshold draw. Every tenth draw (index 0, 10, ...) has alpha_k = 0.
///   omega, omega_0 in [0.5, 1.5], delta in [0, 0.5], kappa in [0.05, 0.5],
///   alpha_k in [0, 0.95], phi_N in [−π, π), beta in [0.05, 0.95] min(beta_c1, beta_c2).
inline SystemParams random_draw(std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, index));
  SystemParams p;
  p.omega = rng.uniform(0.5, 1.5);
  p.omega_0 = rng.uniform(0.5, 1.5);
  p.delta = rng.uniform(0.0, 0.5);
  p.kappa = rng.uniform(0.05, 0.5);
  p.alpha_k = rng.uniform(0.0, 0.95);
  p.phi_N = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double frac = rng.uniform(0.05, 0.95);
  if (index % 10 == 0) p.alpha_k = 0.0;
  const auto bc = critical_couplings(p);
  p.beta = frac * std::min(bc.beta_c1, bc.beta_c2);
  return p;
}

struct DrawReport {
  std::uint64_t index = 0;
  SystemParams params;
  std::map<std::string, double> errors;  ///< relative unless the key says otherwise
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  VerifyTolerances tol;
  std::vector<DrawReport> draws;
  std::map<std::string, double> max_errors;
  bool pass() const {
    return std::all_of(draws.begin(), draws.end(), [](const DrawReport& d) { return d.pass(); });
  }
};

namespace detail {

inline double rel_err(cplx value, cplx reference) {
  const double scale = std::abs(reference);
  const double diff = std::abs(value - reference);
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace detail

inline DrawReport verify_draw(const SystemParams& p, std::uint64_t index, const VerifyTolerances& tol,
                              bool wiener_khinchin = true) {
  DrawReport r;
  r.index = index;
  r.params = p;
  auto record = [&](const std::string& key, double err, double limit) {
    r.errors[key] = err;
    if (!(err <= limit)) r.failures.push_back(key);
  };

  const auto oracle = lyapunov_steady(p);
  for (int j = 1; j <= 2; ++j) {
    const auto c = pair_moments(j, p);
    const auto o = moments_from_state(oracle, j);
    const std::string s = std::to_string(j);
    record("n_a" + s, detail::rel_err(c.n_a, o.n_a), tol.moments_rel);
    record("n_d" + s, detail::rel_err(c.n_d, o.n_d), tol.moments_rel);
    record("m_da" + s, detail::rel_err(c.m_da, o.m_da), tol.moments_rel);
    record("c_da" + s, detail::rel_err(c.c_da, o.c_da), tol.moments_rel);
    record("a_sq" + s, detail::rel_err(c.a_sq, o.a_sq), tol.moments_rel);
    record("d_sq" + s, detail::rel_err(c.d_sq, o.d_sq), tol.moments_rel);

    const double bc = critical_coupling(p, j);
    const double numeric = threshold_search(p, j, 1e-3 * bc, 2.0 * bc);
    record("beta_c" + s + "_abs", std::abs(numeric - bc), tol.threshold_abs);

    if (wiener_khinchin) {
      const auto n = integrate_intracavity_spectrum(p, j, IntracavityMoment::number);
      const auto a = integrate_intracavity_spectrum(p, j, IntracavityMoment::square);
      record("wk_n_a" + s, detail::rel_err(n.value, c.n_a), tol.wiener_khinchin_rel);
      record("wk_a_sq" + s, detail::rel_err(a.value, c.a_sq), tol.wiener_khinchin_rel);
    }
  }

  const auto cm = cavity_moments(p);
  record("coh_RL_dual_route", detail::rel_err(cm.coh_RL, p.alpha_k * coherence_u(p)), tol.coherence_rel);

  // No squeezing of the total field: the minimum must not go below zero.
  double vmin = total_field_variance_sum(p, 0.0);
  for (int i = 1; i < 10000; ++i) {
    vmin = std::min(vmin, total_field_variance_sum(p, 2.0 * std::numbers::pi * i / 10000.0));
  }
  record("variance_sum_negative_part_abs", std::max(0.0, -vmin), 0.0);

  if (p.alpha_k == 0.0) {
    const auto g = g2_functions(p);
    const double e = std::max({std::abs(g.g2_RR - 2.0), std::abs(g.g2_LL - 2.0), std::abs(g.g2_RL - 2.0)});
    record("g2_thermal_abs", e, tol.endpoint_abs);
  }
  return r;
}

inline VerifyReport run_verification(std::uint64_t draws, std::uint64_t seed, bool wiener_khinchin = true,
                                     const VerifyTolerances& tol = {}) {
  if (draws < 1) throw DomainError("verification needs at least one draw");
  VerifyReport rep;
  rep.seed = seed;
  rep.tol = tol;
  for (std::uint64_t i = 0; i < draws; ++i) {
    auto d = verify_draw(random_draw(seed, i), i, tol, wiener_khinchin);
    for (const auto& [k, v] : d.errors) rep.max_errors[k] = std::max(rep.max_errors[k], v);
    rep.draws.push_back(std::move(d));
  }
  return rep;
}

inline nlohmann::json to_json(const VerifyReport& rep) {
  nlohmann::json j;
  j["seed"] = rep.seed;
  j["draws"] = rep.draws.size();
  j["tolerances"] = {{"moments_rel", rep.tol.moments_rel},
                     {"coherence_rel", rep.tol.coherence_rel},
                     {"threshold_abs", rep.tol.threshold_abs},
                     {"wiener_khinchin_rel", rep.tol.wiener_khinchin_rel},
                     {"endpoint_abs", rep.tol.endpoint_abs}};
  j["max_errors"] = rep.max_errors;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& d : rep.draws) {
    results.push_back({{"index", d.index}, {"params", d.params}, {"errors", d.errors}, {"failures", d.failures},
                       {"pass", d.pass()}});
  }
  j["results"] = std::move(results);
  j["pass"] = rep.pass();
  return j;
}

}  // namespace ringcav
