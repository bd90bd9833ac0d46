#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semiflow/evolution.hpp"
#include "semiflow/spaces.hpp"
#include "semiflow/spectral.hpp"

// Concrete parabolic systems: the two cross-diffusion chemotaxis systems run
// through the semilinear path (constant linear part, cross-diffusion in the
// nonlinearity), the density-suppressed-motility system run through the
// quasilinear path (state-dependent linear part), and small synthetic models
// used as solver oracles.

namespace semiflow {

/// Polynomial source g(x,u,v) = sum_l c_l(x) u^{m_l} v^{k_l}. A term's
/// coefficient is either the constant c or, when coeff_field has a basis,
/// a band-limited spatially varying coefficient.
struct SourceTerm {
  double c = 0.0;
  int m = 0;  // power of u
  int k = 0;  // power of v
  SpectralField coeff_field;  // optional; empty basis means constant c
};
using SourceSpec = std::vector<SourceTerm>;

/// A parabolic system w' = A(w)w + f(w) together with its product-space
/// scale and exponent budget.
struct ModelSpec {
  std::string name;
  int arity = 1;
  ProblemMode mode = ProblemMode::Semilinear;
  BasisPtr basis;
  std::vector<double> offsets;
  std::vector<double> theta_weights;
  std::vector<double> integrabilities;
  ExponentBudget budget;
  bool state_dependent_a = false;
  std::function<GeneratorSpec(const SystemState&)> a_builder;
  std::function<SystemState(const SystemState&)> f_eval;

  /// Wrap raw fields into a SystemState carrying this model's scale.
  SystemState make_state(std::vector<SpectralField> comps) const;
};

/// Parabolic-parabolic chemotaxis system (two components):
///   u' = div(grad u - cross * u grad v) + g(x,u,v),  v' = u + (Delta-1)v.
/// Hypotheses: p > n/2, q > n, n/p - n/q < 1, polynomial powers m_l <= 2.
ModelSpec pp_model(BasisPtr basis, double p, double q, double eps,
                   SourceSpec g = {}, double cross = 1.0);

/// Degenerate system (three components, middle equation has no diffusion):
///   u' = div(grad u - u grad w), v' = u - v, w' = v + (Delta-1)w.
/// s is the base regularity of u; tau the order of the w-component; `a`
/// (the u-component base order) defaults to the midpoint of its admissible
/// interval when NaN.
ModelSpec degenerate_model(BasisPtr basis, double p, double q, double s,
                           double tau, double a = std::nan(""));

/// Density-suppressed motility system (three components, quasilinear):
///   u' = div(chi(v) grad u) + div(u chi'(v) grad v) + u g(m),
///   v' = Delta v + u - v,   m' = Delta m - u g(m).
/// chi defaults to chi0 + 1/(1+v^2); g defaults to m/sqrt(1+m^2).
ModelSpec motility_model(BasisPtr basis, double p, double eps, double kappa,
                         double chi0 = 0.1,
                         std::function<double(double)> chi = nullptr,
                         std::function<double(double)> chi_prime = nullptr,
                         std::function<double(double)> g = nullptr);

/// Synthetic: pure heat system (f = 0) with a caller-supplied budget;
/// used as the exactly solvable oracle model.
ModelSpec heat_model(BasisPtr basis, int arity, ExponentBudget budget);

/// Synthetic scalar surrogate u' = -u + 1 on the ground mode (exact solution
/// u(t) = 1 - e^{-t} from zero data).
ModelSpec scalar_relaxation_model(BasisPtr basis);

/// Dealiased pseudospectral evaluation of the model nonlinearity, with a
/// finiteness check on the result.
SystemState eval_nonlinearity(const ModelSpec& model, const SystemState& w);

/// div(a grad b) evaluated pseudospectrally as grad(a).grad(b) + a Lap(b).
SpectralField div_a_grad_b(const SpectralField& a, const SpectralField& b);

/// Total mass: the integral of the field over the domain (grid quadrature,
/// exact for band-limited fields).
double mass(const SpectralField& f);

/// Initial-data profiles (projected onto the basis).
SpectralField constant_field(const BasisPtr& basis, double value);
SpectralField cosine_field(const BasisPtr& basis, double amplitude, int k);
/// Gaussian bump of the given amplitude centered in the domain; width is
/// relative to the shortest side.
SpectralField bump_field(const BasisPtr& basis, double amplitude,
                         double width = 0.12);

}  // namespace semiflow
