#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "semiflow/models.hpp"
#include "semiflow/spaces.hpp"
#include "semiflow/special.hpp"

// Quantitative verification layer: power-law exponent fits (smoothing
// rates, Hoelder moduli, time-weight decay), empirical Lipschitz probes of
// the structural nonlinearity estimate, and blow-up monitoring in the
// criterion norms.

namespace semiflow {

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int samples = 0;
};

/// Least-squares line in log-log coordinates over samples with t inside
/// [window_lo, window_hi]. Requires >= 5 usable samples, all values > 0.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& samples,
                        double window_lo, double window_hi);

/// Hoelder modulus of the trajectory at evaluation order theta, anchored at
/// t = 0 (where the modulus is worst): fits ||u(t)-u(0)||_theta ~ t^e.
/// A constant trajectory reports exponent = +infinity.
FitResult holder_exponent(const WeightedTrajectory& traj, double theta);

/// One probe sample: the attained xi-norm scale of the pair and the
/// quotient ||f(w)-f(v)||_gamma / D(w,v) where D is the structural bound
///   [1 + ||w||_xi^{q-1} + ||v||_xi^{q-1}] *
///   [(1 + ||w||_xi + ||v||_xi) ||w-v||_beta + ||w-v||_xi]
/// with unit constant.
struct ProbeRow {
  double xi_scale = 0.0;
  double quotient = 0.0;
};
struct ProbeResult {
  std::vector<ProbeRow> rows;
  double max_quotient = 0.0;
};

/// Draws seeded random state pairs with base-norm <= R and xi-norms spanning
/// [cap_lo, cap_hi]; q_override (NaN = model budget q) re-tests the same
/// samples against a different superlinearity exponent.
ProbeResult lipschitz_probe(const ModelSpec& model, double R, int samples,
                            std::uint64_t seed,
                            double q_override = std::nan(""),
                            double cap_lo = 1.0, double cap_hi = 100.0);

struct BlowupVerdict {
  bool triggered = false;
  NormSpec norm_used;
  std::vector<std::pair<double, double>> history;  // (t, norm)
  double trigger_time = 0.0;
  double trigger_value = 0.0;
};

/// Watches the named norm of one component along the run; triggers on
/// threshold crossing or on reported integrator step underflow.
BlowupVerdict blowup_monitor(const WeightedTrajectory& traj,
                             const NormSpec& norm, double threshold,
                             bool step_underflow = false, int component = 0);

/// Fits ||u(t)||_xi ~ t^{-e}; membership in the weighted class holds iff
/// e < mu - 0.02 (so t^mu ||u(t)||_xi decays numerically).
struct DecayCheck {
  FitResult fit;
  double decay_exponent = 0.0;  // e
  bool member = false;
};
DecayCheck weighted_decay_check(const WeightedTrajectory& traj, double mu,
                                double xi, double window_lo = 0.0,
                                double window_hi =
                                    std::numeric_limits<double>::infinity());

}  // namespace semiflow
