#pragma once

// Finite-size phase-matching factor of an atomic ensemble in a ring cavity.
//
// Positions are in units of the cavity wavelength, so the cavity wave vector
// has magnitude 2π. The ensemble average
//
//     alpha_k e^{i phi_N} = (1/N) sum_j exp(+2i k_c . r_j)
//
// is 1 for a point-like ensemble and vanishes for an ensemble spread over
// many wavelengths.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ringcav/errors.hpp"
#include "ringcav/format.hpp"
#include "ringcav/random.hpp"

namespace ringcav {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Cavity axis along z, |k_c| = 2π per wavelength.
inline constexpr Vec3 kDefaultWaveVector{0.0, 0.0, 2.0 * std::numbers::pi};

struct EnsembleGeometry {
  std::vector<Vec3> positions;
  Vec3 k_c = kDefaultWaveVector;

  std::size_t n_atoms() const noexcept { return positions.size(); }
};

struct PhaseMatching {
  double alpha_mag = 0.0;  ///< |alpha_k| in [0, 1]
  double phi_N = 0.0;      ///< argument in (-pi, pi]; 0 when alpha_mag is at round-off level
};

inline PhaseMatching alpha_from_positions(const EnsembleGeometry& geom) {
  if (geom.positions.empty()) throw DomainError("alpha_from_positions: ensemble has no atoms");

  std::complex<double> sum{0.0, 0.0};
  for (const auto& r : geom.positions) {
    sum += std::polar(1.0, 2.0 * dot(geom.k_c, r));
  }
  const auto avg = sum / static_cast<double>(geom.positions.size());

  PhaseMatching out;
  out.alpha_mag = std::min(1.0, std::abs(avg));
  constexpr double kZero = 8.0 * std::numeric_limits<double>::epsilon();
  if (out.alpha_mag > kZero) {
    out.phi_N = std::arg(avg);
    if (out.phi_N <= -std::numbers::pi) out.phi_N = std::numbers::pi;
  }
  return out;
}

// --- samplers -------------------------------------------------------------

struct PointDistribution {};

/// Atoms uniform on [0, length) along the k_c direction.
struct UniformSegment {
  double length = 0.0;
};

/// Isotropic Gaussian cloud centred at the origin, standard deviation sigma per axis.
struct GaussianCloud {
  double sigma = 0.0;
};

using Distribution = std::variant<PointDistribution, UniformSegment, GaussianCloud>;

inline std::string describe(const Distribution& dist) {
  struct {
    std::string operator()(const PointDistribution&) const { return "point"; }
    std::string operator()(const UniformSegment& d) const { return "uniform-segment(" + format_double(d.length) + ")"; }
    std::string operator()(const GaussianCloud& d) const { return "gaussian-cloud(" + format_double(d.sigma) + ")"; }
  } visitor;
  return std::visit(visitor, dist);
}

inline EnsembleGeometry sample_ensemble(std::size_t n, const Distribution& dist, std::uint64_t seed,
                                        const Vec3& k_c = kDefaultWaveVector) {
  if (n == 0) throw DomainError("sample_ensemble: n must be at least 1");

  EnsembleGeometry geom;
  geom.k_c = k_c;
  geom.positions.reserve(n);
  Rng rng(seed);

  if (std::holds_alternative<PointDistribution>(dist)) {
    geom.positions.assign(n, Vec3{0.0, 0.0, 0.0});
  } else if (const auto* seg = std::get_if<UniformSegment>(&dist)) {
    if (!(seg->length >= 0.0)) throw DomainError("sample_ensemble: segment length must be >= 0");
    const double k = norm(k_c);
    if (k == 0.0) throw DomainError("sample_ensemble: uniform segment needs a nonzero k_c");
    const Vec3 axis{k_c[0] / k, k_c[1] / k, k_c[2] / k};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = seg->length * rng.uniform();
      geom.positions.push_back({t * axis[0], t * axis[1], t * axis[2]});
    }
  } else {
    const auto& cloud = std::get<GaussianCloud>(dist);
    if (!(cloud.sigma >= 0.0)) throw DomainError("sample_ensemble: sigma must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
      const double x = cloud.sigma * rng.gaussian();
      const double y = cloud.sigma * rng.gaussian();
      const double z = cloud.sigma * rng.gaussian();
      geom.positions.push_back({x, y, z});
    }
  }
  return geom;
}

struct ConvergenceRow {
  std::size_t n = 0;
  double mean_alpha = 0.0;
  double std_alpha = 0.0;  ///< sample standard deviation over trials (0 for a single trial)
};

/// Mean and spread of |alpha_k| over independent ensembles. Trial t at size n
/// draws from seed derive_seed(seed, n, t), so rows do not depend on each other.
inline std::vector<ConvergenceRow> convergence_scan(const Distribution& dist, const std::vector<std::size_t>& n_values,
                                                    std::size_t trials, std::uint64_t seed,
                                                    const Vec3& k_c = kDefaultWaveVector) {
  if (trials == 0) throw DomainError("convergence_scan: trials must be at least 1");
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_values.size());
  for (const auto n : n_values) {
    std::vector<double> mags(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      mags[t] = alpha_from_positions(sample_ensemble(n, dist, derive_seed(seed, n, t), k_c)).alpha_mag;
    }
    double mean = 0.0;
    for (double m : mags) mean += m;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double m : mags) var += (m - mean) * (m - mean);
    const double sd = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    rows.push_back({n, mean, sd});
  }
  return rows;
}

// --- CSV ------------------------------------------------------------------

inline void write_positions_csv(std::ostream& os, const EnsembleGeometry& geom) {
  os << "x,y,z\n";
  for (const auto& r : geom.positions) {
    os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << '\n';
  }
}

inline std::vector<Vec3> read_positions_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("positions CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z") throw DomainError("positions CSV: header must be 'x,y,z', got '" + line + "'");

  std::vector<Vec3> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw DomainError("positions CSV line " + std::to_string(lineno) + ": expected 3 fields");
    }
    out.push_back({parse_double(fields[0]), parse_double(fields[1]), parse_double(fields[2])});
  }
  return out;
}

}  // namespace ringcav
