#pragma once

// Static spacetimes in the Newtonian limit and sampled worldlines.
//
// The metric is never stored. A static metric in the weak-field limit is
// fully described along a trajectory by the potential phi(x(t)) and the
// centre-of-mass momentum p(t), sampled against the laboratory coordinate
// time t of the static observers. Units: c is explicit (default 1),
// hbar = k_B = 1.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace tdfr {

struct StaticSpacetime {
  double c = 1.0;
  // False drops the p^2/2m^2 term (large-mass, gravitational-only mode).
  bool include_kinetic = true;
};

struct WorldlineSample {
  double t = 0.0;
  double phi = 0.0;
  double p = 0.0;
};

class Worldline {
 public:
  /// Throws ArgumentError unless there are >= 2 finite samples with strictly
  /// increasing t and mass > 0.
  Worldline(std::vector<WorldlineSample> samples, double mass);

  std::span<const WorldlineSample> samples() const noexcept { return samples_; }
  double mass() const noexcept { return mass_; }
  double t_start() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }

 private:
  std::vector<WorldlineSample> samples_;
  double mass_;
};

/// dtau/dt = 1 + phi/c^2 - p^2/(2 m^2 c^2).
///
/// Throws ArgumentError for m <= 0 or c <= 0 and WeakFieldError when the
/// result is not positive.
double dilation_factor(double phi, double p, double m, double c = 1.0);

/// Signature of a dilation law; the default is dilation_factor. Swappable so
/// the verification suite can be checked against a deliberately wrong law.
using DilationLaw = std::function<double(double phi, double p, double m, double c)>;

/// Exact static-metric energy sqrt(-g_tt (H_rest^2 + p^2)).
double static_hamiltonian(double g_tt, double p_sq, double h_rest);

/// H_rest = m + internal energy.
double rest_energy(double m, double internal_energy);

/// Per-sample dilation factors and the proper time they accumulate.
///
/// Between samples alpha is linear in t, so tau(t) is its exact piecewise
/// quadratic integral and tau at the sample points is the trapezoidal sum.
class DilationProfile {
 public:
  DilationProfile(std::vector<double> t, std::vector<double> alpha);

  std::span<const double> times() const noexcept { return t_; }
  std::span<const double> alphas() const noexcept { return alpha_; }
  /// Proper time elapsed at each sample, starting at 0.
  std::span<const double> taus() const noexcept { return tau_; }

  double tau_total() const { return tau_.back(); }
  double t_start() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  double initial_alpha() const { return alpha_.front(); }
  double final_alpha() const { return alpha_.back(); }

  double alpha_at(double t) const;
  double tau_at(double t) const;

 private:
  std::size_t interval(double t) const;

  std::vector<double> t_;
  std::vector<double> alpha_;
  std::vector<double> tau_;
};

/// Dilation profile of `w` in `st`. Throws WeakFieldError if |phi|/c^2 >= 0.5
/// at any sample or if any alpha <= 0.
DilationProfile dilation_profile(const Worldline& w, const StaticSpacetime& st,
                                 const DilationLaw& law = {});

/// Reads a `t,phi,p` CSV table. Throws IoError when the file cannot be opened
/// and ArgumentError for malformed content.
std::vector<WorldlineSample> read_worldline_csv(const std::filesystem::path& path);

}  // namespace tdfr
