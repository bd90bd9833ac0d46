#include "semiflow/spaces.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace semiflow {

double field_norm(const SpectralField& f, const NormSpec& spec) {
  const Basis& b = *f.basis;
  const double s = spec.order;
  if (spec.p == 2.0) {
    double acc = 0.0;
    for (int k = 0; k < b.num_modes(); ++k) {
      const double m = std::pow(1.0 + b.eigenvalue(k), s);
      acc += m * f.coeffs[k] * f.coeffs[k];
    }
    return std::sqrt(acc);
  }
  // Bessel-multiplier realization: scale coefficients, then grid L_p.
  std::vector<double> scaled(f.coeffs.size());
  for (int k = 0; k < b.num_modes(); ++k) {
    scaled[k] = std::pow(1.0 + b.eigenvalue(k), 0.5 * s) * f.coeffs[k];
  }
  const std::vector<double> grid = b.to_grid(scaled);
  if (std::isinf(spec.p)) {
    double m = 0.0;
    for (double v : grid) m = std::max(m, std::fabs(v));
    return m;
  }
  if (!(spec.p >= 1.0)) {
    throw std::invalid_argument("field_norm: integrability must be >= 1");
  }
  double acc = 0.0;
  for (double v : grid) acc += std::pow(std::fabs(v), spec.p);
  return std::pow(acc * b.quad_weight(), 1.0 / spec.p);
}

double field_norm(const SpectralField& f, double order) {
  return field_norm(f, NormSpec::spectral(order));
}

SystemState::SystemState(std::vector<SpectralField> comps)
    : components(std::move(comps)),
      offsets(components.size(), 0.0),
      theta_weights(components.size(), 2.0),
      integrabilities(components.size(), 2.0) {}

SystemState::SystemState(std::vector<SpectralField> comps,
                         std::vector<double> offs)
    : components(std::move(comps)),
      offsets(std::move(offs)),
      theta_weights(components.size(), 2.0),
      integrabilities(components.size(), 2.0) {
  if (offsets.size() != components.size()) {
    throw std::invalid_argument("SystemState: offsets size mismatch");
  }
}

double SystemState::norm_at(double theta) const {
  double m = 0.0;
  for (int i = 0; i < arity(); ++i) {
    m = std::max(m, field_norm(components[i],
                               offsets[i] + theta_weights[i] * theta));
  }
  return m;
}

double SystemState::norm_at(double theta, double p) const {
  double m = 0.0;
  for (int i = 0; i < arity(); ++i) {
    NormSpec spec{offsets[i] + theta_weights[i] * theta, p};
    m = std::max(m, field_norm(components[i], spec));
  }
  return m;
}

SystemState& SystemState::operator+=(const SystemState& other) {
  if (arity() != other.arity()) {
    throw std::invalid_argument("SystemState: arity mismatch");
  }
  for (int i = 0; i < arity(); ++i) components[i] += other.components[i];
  return *this;
}

SystemState& SystemState::operator-=(const SystemState& other) {
  if (arity() != other.arity()) {
    throw std::invalid_argument("SystemState: arity mismatch");
  }
  for (int i = 0; i < arity(); ++i) components[i] -= other.components[i];
  return *this;
}

SystemState& SystemState::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

SystemState operator+(SystemState a, const SystemState& b) {
  a += b;
  return a;
}

SystemState operator-(SystemState a, const SystemState& b) {
  a -= b;
  return a;
}

SystemState operator*(double s, SystemState x) {
  x *= s;
  return x;
}

namespace {

double default_alpha0(const ExponentBudget& b, ProblemMode mode) {
  if (!std::isnan(b.alpha0)) return b.alpha0;
  if (mode == ProblemMode::Quasilinear) {
    if (b.alpha >= b.xi) return b.xi;
    return b.beta + 0.95 * (b.alpha - b.beta);
  }
  return (b.alpha > 0.0) ? 0.95 * b.alpha : 0.0;
}

double default_gamma0(const ExponentBudget& b) {
  if (!std::isnan(b.gamma0)) return b.gamma0;
  return (b.gamma > 0.0) ? 0.5 * b.gamma : 0.0;
}

}  // namespace

std::vector<std::string> validate_budget(const ExponentBudget& b,
                                         ProblemMode mode) {
  std::vector<std::string> bad;
  auto require = [&bad](bool ok, const char* name) {
    if (!ok) bad.emplace_back(name);
  };

  require(b.q >= 1.0, "q-lower");
  if (mode == ProblemMode::Quasilinear) {
    require(b.beta >= 0.0 && b.beta <= b.xi, "beta-range");
    require(b.xi < 1.0, "xi-upper");
    require(b.gamma > 0.0, "gamma-lower");
    require(b.gamma < 1.0, "gamma-upper");
    require(b.alpha > b.beta, "alpha-lower");
    require(b.alpha < 1.0, "alpha-upper");
  } else {
    require(b.alpha >= 0.0 && b.alpha <= b.xi, "alpha-range");
    require(b.xi <= 1.0, "xi-upper");
    require(b.gamma >= 0.0, "gamma-lower");
    require(b.gamma < 1.0, "gamma-upper");
    require(!(b.gamma == 0.0 && b.xi == 1.0), "gamma-xi-corner");
  }
  require((b.xi - b.alpha) * b.q <
              std::min(1.0, 1.0 + b.gamma - b.alpha),
          "lipschitz-window");

  if (b.has_weight()) {
    const double a0 = default_alpha0(b, mode);
    const double g0 = default_gamma0(b);
    require(b.mu > 0.0, "weight-positive");
    require(b.mu > b.xi - a0, "weight-lower");
    require(b.mu < std::min(1.0 / b.q, (1.0 + g0 - b.alpha) / b.q),
            "weight-upper");
  }
  return bad;
}

ExponentBudget derive_weight(ExponentBudget b, ProblemMode mode) {
  b.alpha0 = default_alpha0(b, mode);
  b.gamma0 = default_gamma0(b);
  if (std::isnan(b.mu)) {
    const double lo = std::max(0.0, b.xi - b.alpha0);
    const double hi =
        std::min(1.0 / b.q, (1.0 + b.gamma0 - b.alpha) / b.q);
    if (!(lo < hi)) {
      throw std::invalid_argument("derive_weight: empty weight window");
    }
    b.mu = 0.5 * (lo + hi);
  }
  return b;
}

double WeightedTrajectory::weighted_norm() const { return weighted_norm(mu, xi); }

double WeightedTrajectory::weighted_norm(double nu, double order) const {
  double m = 0.0;
  for (size_t j = 1; j < times.size(); ++j) {
    m = std::max(m, std::pow(times[j], nu) * states[j].norm_at(order));
  }
  return m;
}

double WeightedTrajectory::sup_norm() const {
  double m = 0.0;
  for (const auto& s : states) m = std::max(m, s.norm_at(beta));
  return m;
}

double dwt_metric(const WeightedTrajectory& u, const WeightedTrajectory& v) {
  if (u.times.size() != v.times.size() || u.times != v.times ||
      u.mu != v.mu || u.xi != v.xi || u.beta != v.beta) {
    throw std::invalid_argument("dwt_metric: mesh or budget mismatch");
  }
  double sup_part = 0.0;
  double weighted_part = 0.0;
  for (size_t j = 0; j < u.times.size(); ++j) {
    const SystemState d = u.states[j] - v.states[j];
    sup_part = std::max(sup_part, d.norm_at(u.beta));
    if (j >= 1) {
      weighted_part = std::max(
          weighted_part, std::pow(u.times[j], u.mu) * d.norm_at(u.xi));
    }
  }
  return sup_part + weighted_part;
}

SpectralField rough_initial_data(const BasisPtr& basis, double target_order,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SpectralField f(basis);
  for (int k = 0; k < basis->num_modes(); ++k) {
    const double sign = (rng() & 1u) ? 1.0 : -1.0;
    const double keff = basis->mode_magnitude(k);
    f.coeffs[k] = sign *
                  std::pow(1.0 + basis->eigenvalue(k), -0.5 * target_order) /
                  (std::sqrt(keff) * (1.0 + std::log(keff)));
  }
  return f;
}

}  // namespace semiflow
