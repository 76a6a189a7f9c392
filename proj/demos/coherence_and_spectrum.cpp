// Walks one parameter set from atom positions to output-field entanglement.
#include <cstdio>

#include "ringcav/ringcav.hpp"

int main() {
  using namespace ringcav;

  // A tight Gaussian cloud keeps most of the phase matching.
  const auto cloud = sample_ensemble(2000, GaussianCloud{0.05}, 7);
  const auto pm = alpha_from_positions(cloud);
  std::printf("alpha_k = %.4f  phi_N = %.4f\n", pm.alpha_mag, pm.phi_N);

  SystemParams p = figure_params(pm.alpha_mag, 0.3);
  p.phi_N = pm.phi_N;
  const auto bc = critical_couplings(p);
  std::printf("beta_c1 = %.6f  beta_c2 = %.6f\n", bc.beta_c1, bc.beta_c2);

  const auto obs = observables(p);
  std::printf("n_R = %.6f  gamma_RL = %.6f  g2_RR = %.6f  g2_RL = %.6f  chi_RL = %.6f\n", obs.n_R, *obs.gamma_RL,
              *obs.g2_RR, *obs.g2_RL, *obs.chi_RL);

  const double theta = optimize_theta(p);
  std::printf("theta* = %.4f\n", theta);
  for (double dnu : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) {
    const auto s = spectral_point(p, -dnu, theta);
    std::printf("delta_nu = %5.2f  S = %9.5f  E_n = %.5f\n", dnu, s.S_theta, s.E_n);
  }
}
