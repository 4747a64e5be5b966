#include "tdfr/spacetime.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "tdfr/errors.hpp"

namespace tdfr {

Worldline::Worldline(std::vector<WorldlineSample> samples, double mass)
    : samples_(std::move(samples)), mass_(mass) {
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
    throw ArgumentError("worldline mass must be positive and finite");
  }
  if (samples_.size() < 2) {
    throw ArgumentError("worldline needs at least 2 samples, got " +
                        std::to_string(samples_.size()));
  }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (!std::isfinite(s.t) || !std::isfinite(s.phi) || !std::isfinite(s.p)) {
      throw ArgumentError("worldline sample " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(s.t > samples_[k - 1].t)) {
      throw ArgumentError("worldline times must be strictly increasing (sample " +
                          std::to_string(k) + ")");
    }
  }
}

double dilation_factor(double phi, double p, double m, double c) {
  if (!(m > 0.0)) throw ArgumentError("dilation_factor: mass must be positive");
  if (!(c > 0.0)) throw ArgumentError("dilation_factor: c must be positive");
  const double c2 = c * c;
  const double alpha = 1.0 + phi / c2 - (p * p) / (2.0 * m * m * c2);
  if (!(alpha > 0.0)) {
    throw WeakFieldError("dilation factor " + std::to_string(alpha) +
                         " <= 0: outside the Newtonian-limit regime");
  }
  return alpha;
}

double static_hamiltonian(double g_tt, double p_sq, double h_rest) {
  if (!(g_tt < 0.0)) throw ArgumentError("static_hamiltonian: g_tt must be negative");
  if (!(h_rest > 0.0)) throw ArgumentError("static_hamiltonian: H_rest must be positive");
  if (p_sq < 0.0) throw ArgumentError("static_hamiltonian: p^2 must be non-negative");
  return std::sqrt(-g_tt * (h_rest * h_rest + p_sq));
}

double rest_energy(double m, double internal_energy) {
  if (!(m > 0.0)) throw ArgumentError("rest_energy: mass must be positive");
  return m + internal_energy;
}

DilationProfile::DilationProfile(std::vector<double> t, std::vector<double> alpha)
    : t_(std::move(t)), alpha_(std::move(alpha)) {
  if (t_.size() < 2 || t_.size() != alpha_.size()) {
    throw ArgumentError("dilation profile needs >= 2 matching (t, alpha) samples");
  }
  tau_.assign(t_.size(), 0.0);
  for (std::size_t k = 0; k < t_.size(); ++k) {
    if (!(alpha_[k] > 0.0)) {
      throw WeakFieldError("dilation factor <= 0 at sample " + std::to_string(k));
    }
    if (k == 0) continue;
    const double h = t_[k] - t_[k - 1];
    if (!(h > 0.0)) throw ArgumentError("dilation profile times must be strictly increasing");
    tau_[k] = tau_[k - 1] + 0.5 * (alpha_[k] + alpha_[k - 1]) * h;
  }
}

std::size_t DilationProfile::interval(double t) const {
  // Index i with t_i <= t <= t_{i+1}; clamps outside the sampled range.
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(t_.begin(), it));
  return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, t_.size() - 2);
}

double DilationProfile::alpha_at(double t) const {
  const std::size_t i = interval(t);
  const double h = t_[i + 1] - t_[i];
  const double w = (t - t_[i]) / h;
  return (1.0 - w) * alpha_[i] + w * alpha_[i + 1];
}

double DilationProfile::tau_at(double t) const {
  if (t <= t_.front()) return 0.0;
  if (t >= t_.back()) return tau_.back();
  const std::size_t i = interval(t);
  const double h = t_[i + 1] - t_[i];
  const double d = t - t_[i];
  const double slope = (alpha_[i + 1] - alpha_[i]) / h;
  return tau_[i] + alpha_[i] * d + 0.5 * slope * d * d;
}

DilationProfile dilation_profile(const Worldline& w, const StaticSpacetime& st,
                                 const DilationLaw& law) {
  if (!(st.c > 0.0)) throw ArgumentError("spacetime: c must be positive");
  const double c2 = st.c * st.c;
  std::vector<double> t;
  std::vector<double> alpha;
  t.reserve(w.samples().size());
  alpha.reserve(w.samples().size());
  for (const auto& s : w.samples()) {
    if (!(std::abs(s.phi) / c2 < 0.5)) {
      throw WeakFieldError("|phi|/c^2 = " + std::to_string(std::abs(s.phi) / c2) +
                           " >= 0.5 at t = " + std::to_string(s.t) +
                           ": outside the weak-field regime");
    }
    const double p = st.include_kinetic ? s.p : 0.0;
    const double a = law ? law(s.phi, p, w.mass(), st.c) : dilation_factor(s.phi, p, w.mass(), st.c);
    if (!(a > 0.0)) {
      throw WeakFieldError("dilation factor <= 0 at t = " + std::to_string(s.t));
    }
    t.push_back(s.t);
    alpha.push_back(a);
  }
  return DilationProfile(std::move(t), std::move(alpha));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ArgumentError("worldline csv line " + std::to_string(line) + ": bad number '" +
                        std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<WorldlineSample> read_worldline_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open worldline csv " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("worldline csv " + path.string() + " is empty");
  {
    std::string header;
    for (char ch : line) {
      if (ch != ' ' && ch != '\t' && ch != '\r') header += ch;
    }
    if (header != "t,phi,p") {
      throw ArgumentError("worldline csv header must be 't,phi,p', got '" + line + "'");
    }
  }

  std::vector<WorldlineSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string_view rest(line);
    double fields[3];
    for (int f = 0; f < 3; ++f) {
      const auto comma = rest.find(',');
      if ((f < 2) == (comma == std::string_view::npos)) {
        throw ArgumentError("worldline csv line " + std::to_string(lineno) +
                            ": expected 3 columns");
      }
      fields[f] = parse_field(rest.substr(0, comma), lineno);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    samples.push_back({fields[0], fields[1], fields[2]});
  }
  return samples;
}

}  // namespace tdfr
