#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "semiflow/spectral.hpp"

// The interpolation scale with computable norms, product-space states,
// exponent budgets, and time-weighted trajectory norms.

namespace semiflow {

/// Norm selector: fractional order s together with the integrability index.
/// p = 2 uses the exact spectral formula; finite p != 2 and p = inf apply
/// the multiplier (1+lambda)^{s/2} and take the grid L_p / max norm.
struct NormSpec {
  double order = 0.0;
  double p = 2.0;  // 2, finite p, or infinity()

  static NormSpec spectral(double s) { return {s, 2.0}; }
  static NormSpec grid_lp(double s, double p) { return {s, p}; }
  static NormSpec grid_inf(double s) {
    return {s, std::numeric_limits<double>::infinity()};
  }
};

/// Norm of a scalar field in H^s realized by the spectral multiplier
/// (1 + lambda_k)^{s/2}.
double field_norm(const SpectralField& f, const NormSpec& spec);
double field_norm(const SpectralField& f, double order);  // p = 2

/// Product-space state: one field per component, with per-component base
/// order (offset) and order-vs-theta slope. The product norm is the max of
/// the component norms at order offset_i + theta_weight_i * theta.
struct SystemState {
  std::vector<SpectralField> components;
  std::vector<double> offsets;
  std::vector<double> theta_weights;     // usually 2; 0 = theta-independent
  std::vector<double> integrabilities;   // p per component (bookkeeping)

  SystemState() = default;
  explicit SystemState(std::vector<SpectralField> comps);
  SystemState(std::vector<SpectralField> comps, std::vector<double> offs);

  int arity() const { return static_cast<int>(components.size()); }

  /// max over components of the spectral norm at order offset_i + w_i*theta.
  double norm_at(double theta) const;
  /// Same, overriding the integrability of every component.
  double norm_at(double theta, double p) const;

  SystemState& operator+=(const SystemState& other);
  SystemState& operator-=(const SystemState& other);
  SystemState& operator*=(double s);
};

SystemState operator+(SystemState a, const SystemState& b);
SystemState operator-(SystemState a, const SystemState& b);
SystemState operator*(double s, SystemState x);

enum class ProblemMode { Quasilinear, Semilinear };

/// The exponent tuple governing the nonlinearity and the Picard weight.
/// alpha0, gamma0, mu may be NaN, meaning "derive a default later"; the
/// weight-window checks only apply when they are set.
struct ExponentBudget {
  double beta = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double xi = 0.0;
  double q = 1.0;
  double mu = std::nan("");
  double alpha0 = std::nan("");
  double gamma0 = std::nan("");

  bool has_weight() const { return !std::isnan(mu); }
};

/// Returns the names of all violated inequalities; empty means ok.
std::vector<std::string> validate_budget(const ExponentBudget& b,
                                         ProblemMode mode);

/// Fills in alpha0, gamma0, mu (only where NaN) with defaults inside the
/// admissible weight window. Throws if the window is empty.
ExponentBudget derive_weight(ExponentBudget b, ProblemMode mode);

/// Graded-mesh trajectory with the time-weighted and sup norms.
struct WeightedTrajectory {
  std::vector<double> times;        // 0 = t0 < t1 < ... < tN = T
  std::vector<SystemState> states;  // one per node, including t0
  double mu = 0.0;
  double xi = 0.0;
  double beta = 0.0;

  int num_nodes() const { return static_cast<int>(times.size()); }
  double horizon() const { return times.back(); }

  /// max_{j>=1} t_j^mu * ||u(t_j)||_xi
  double weighted_norm() const;
  /// max_j ||u(t_j)||_beta (includes the initial node)
  double sup_norm() const;
  /// As above but for arbitrary weight/order (the embedding checks).
  double weighted_norm(double nu, double order) const;
};

/// d(u,v) = sup-beta norm of the difference + weighted xi norm of the
/// difference. Requires identical meshes and evaluation orders.
double dwt_metric(const WeightedTrajectory& u, const WeightedTrajectory& v);

/// Seeded borderline-regularity data: lies in H^s for the given s but in no
/// higher order as the cutoff grows (log-squared tail).
SpectralField rough_initial_data(const BasisPtr& basis, double target_order,
                                 std::uint64_t seed);

}  // namespace semiflow
