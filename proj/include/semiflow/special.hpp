#pragma once

// Special functions used by the singular quadrature and the analysis layer.

namespace semiflow {

/// Euler Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
/// Evaluated via log-Gamma; relative error below 1e-12 in the tested range.
double beta_function(double a, double b);

/// Regularized incomplete Beta function I_x(a,b) for x in [0,1], a,b > 0.
double reg_incomplete_beta(double x, double a, double b);

/// Unregularized incomplete Beta integral int_0^x t^{a-1}(1-t)^{b-1} dt.
double incomplete_beta(double x, double a, double b);

}  // namespace semiflow
