#include <doctest.h>

#include <cmath>
#include <random>

#include "semiflow/spaces.hpp"

using namespace semiflow;

namespace {

BasisPtr neumann1d(int K, double L = 1.0) {
  BasisSpec spec;
  spec.dim = 1;
  spec.lengths = {L, 1.0};
  spec.bc = Bc::Neumann;
  spec.modes = {K, 1};
  spec.grid = {2 * K, 2};
  return Basis::build(spec);
}

SpectralField random_field(const BasisPtr& b, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(b);
  for (auto& c : f.coeffs) c = gauss(rng);
  return f;
}

}  // namespace

TEST_CASE("spectral norms: constants, single modes, interpolation bound") {
  auto b = neumann1d(8);
  SpectralField one(b);
  one.coeffs[0] = 1.0;  // the constant 1 on (0,1)
  for (double s : {0.0, 0.5, 1.0, 2.0, -1.0}) {
    CHECK(field_norm(one, s) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SpectralField mode(b);
  mode.coeffs[1] = 1.0;  // sqrt(2) cos(pi x)
  CHECK(field_norm(mode, 1.0) ==
        doctest::Approx(std::sqrt(1.0 + M_PI * M_PI)).epsilon(1e-13));

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const SpectralField f = random_field(b, rng);
    CHECK(field_norm(f, 0.5) <=
          std::sqrt(field_norm(f, 0.0) * field_norm(f, 1.0)) + 1e-12);
  }
}

TEST_CASE("log-convexity is exact for spectral norms") {
  auto b = neumann1d(12);
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const SpectralField f = random_field(b, rng);
    const double t1 = 0.2, t2 = 1.4, lam = 0.65;
    const double mid = (1.0 - lam) * t1 + lam * t2;
    const double lhs = field_norm(f, mid);
    const double rhs = std::pow(field_norm(f, t1), 1.0 - lam) *
                       std::pow(field_norm(f, t2), lam);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("norms are nondecreasing in the order") {
  auto b = neumann1d(12);
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const SpectralField f = random_field(b, rng);
    double prev = 0.0;
    for (double s : {0.0, 0.25, 0.5, 1.0, 1.5}) {
      const double cur = field_norm(f, s);
      CHECK(cur >= prev - 1e-13);
      prev = cur;
    }
  }
}

TEST_CASE("grid L_p and L_inf norms") {
  auto b = neumann1d(8);
  SpectralField one(b);
  one.coeffs[0] = 1.0;
  CHECK(field_norm(one, NormSpec::grid_lp(0.0, 4.0)) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(field_norm(one, NormSpec::grid_inf(0.0)) ==
        doctest::Approx(1.0).epsilon(1e-13));
  // For p = 2 the quadrature route must agree with Parseval.
  std::mt19937_64 rng(21);
  const SpectralField f = random_field(b, rng);
  CHECK(field_norm(f, NormSpec::grid_lp(0.3, 2.0)) ==
        doctest::Approx(field_norm(f, 0.3)).epsilon(1e-12));
}

TEST_CASE("product norm takes the max across components with slopes") {
  auto b = neumann1d(6);
  SpectralField f(b), g(b);
  f.coeffs[1] = 1.0;
  g.coeffs[0] = 2.0;
  SystemState s({f, g});
  s.offsets = {0.0, 1.0};
  s.theta_weights = {2.0, 0.0};  // middle-component style: theta-independent
  const double n0 = field_norm(f, 0.8);
  CHECK(s.norm_at(0.4) == doctest::Approx(std::max(n0, 2.0)).epsilon(1e-13));
  // The second component's order never moves with theta.
  CHECK(s.norm_at(0.9) ==
        doctest::Approx(std::max(field_norm(f, 1.8), 2.0)).epsilon(1e-13));
}

TEST_CASE("validate_budget accepts the quadratic chemotaxis ladder") {
  const double eps = 0.05;
  ExponentBudget b;
  b.gamma = eps / 3.0;
  b.alpha = eps;
  b.beta = eps;
  b.xi = (1.0 + eps) / 2.0;
  b.q = 2.0;
  CHECK(validate_budget(b, ProblemMode::Semilinear).empty());
  // The proof's margin: 2(xi - alpha) = 1 - eps < 1 - 2 eps / 3.
  CHECK(2.0 * (b.xi - b.alpha) <
        std::min(1.0, 1.0 + b.gamma - b.alpha));
}

TEST_CASE("validate_budget degenerate and boundary cases") {
  ExponentBudget ok;
  ok.beta = 0.1;
  ok.gamma = 0.5;
  ok.alpha = 0.3;
  ok.xi = 0.3;  // xi = alpha
  ok.q = 1.0;
  CHECK(validate_budget(ok, ProblemMode::Quasilinear).empty());

  ExponentBudget bad = ok;
  bad.alpha = 0.25;
  bad.xi = 0.75;  // (xi - alpha) q = 0.5 with q = 2 -> 1.0, not < 1
  bad.gamma = 0.9;
  bad.q = 2.0;
  const auto v = validate_budget(bad, ProblemMode::Quasilinear);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "lipschitz-window");
}

TEST_CASE("weight window rejects mu q = 1") {
  ExponentBudget b;
  b.beta = 0.0;
  b.gamma = 0.2;
  b.alpha = 0.3;
  b.xi = 0.3;
  b.q = 2.0;
  b.alpha0 = 0.25;
  b.gamma0 = 0.1;
  b.mu = 0.5;  // mu q = 1 sits exactly on the upper bound
  const auto v = validate_budget(b, ProblemMode::Quasilinear);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "weight-upper");
}

TEST_CASE("semilinear corner (gamma, xi) = (0, 1) is rejected") {
  ExponentBudget b;
  b.gamma = 0.0;
  b.alpha = 0.9;
  b.xi = 1.0;
  b.q = 1.0;
  const auto v = validate_budget(b, ProblemMode::Semilinear);
  CHECK(std::find(v.begin(), v.end(), "gamma-xi-corner") != v.end());
}

TEST_CASE("derive_weight fills a value inside the window or throws") {
  ExponentBudget b;
  b.beta = 0.0;
  b.gamma = 0.2;
  b.alpha = 0.3;
  b.xi = 0.3;
  b.q = 2.0;
  const ExponentBudget d = derive_weight(b, ProblemMode::Quasilinear);
  CHECK(d.has_weight());
  CHECK(validate_budget(d, ProblemMode::Quasilinear).empty());

  ExponentBudget empty;  // xi far above alpha0 window
  empty.beta = 0.0;
  empty.gamma = 0.1;
  empty.alpha = 0.1;
  empty.xi = 0.9;
  empty.q = 2.0;
  CHECK_THROWS_AS(derive_weight(empty, ProblemMode::Quasilinear),
                  std::invalid_argument);
}

namespace {

WeightedTrajectory make_traj(const BasisPtr& b, int nodes, double T,
                             double mu, double xi, double beta) {
  WeightedTrajectory u;
  u.mu = mu;
  u.xi = xi;
  u.beta = beta;
  for (int j = 0; j <= nodes; ++j) {
    u.times.push_back(T * j / nodes);
    SpectralField f(b);
    f.coeffs[0] = 1.0 + 0.1 * j;
    f.coeffs[1] = 0.05 * j;
    u.states.emplace_back(std::vector<SpectralField>{f});
  }
  return u;
}

}  // namespace

TEST_CASE("dwt_metric: identity, shift formula, homogeneity, mismatch") {
  auto b = neumann1d(6);
  const WeightedTrajectory u = make_traj(b, 10, 1.0, 0.3, 0.3, 0.0);
  CHECK(dwt_metric(u, u) == 0.0);

  const double delta = 1e-3;
  WeightedTrajectory v = u;
  for (auto& s : v.states) s.components[0].coeffs[0] += delta;
  // Difference is delta times the ground mode: beta-norm delta at every
  // node, weighted part max_j t_j^mu * delta = T^mu * delta.
  CHECK(dwt_metric(u, v) ==
        doctest::Approx(delta * (1.0 + std::pow(1.0, 0.3))).epsilon(1e-12));
  CHECK(dwt_metric(u, v) == doctest::Approx(2e-3).epsilon(1e-12));

  WeightedTrajectory u2 = u, v2 = v;
  for (auto& s : u2.states) s *= 2.0;
  for (auto& s : v2.states) s *= 2.0;
  CHECK(dwt_metric(u2, v2) ==
        doctest::Approx(2.0 * dwt_metric(u, v)).epsilon(1e-12));

  WeightedTrajectory w = make_traj(b, 12, 1.0, 0.3, 0.3, 0.0);
  CHECK_THROWS_AS(dwt_metric(u, w), std::invalid_argument);
}

TEST_CASE("embedding: C_nu norm <= T^(nu-mu) C_mu norm for nu >= mu") {
  auto b = neumann1d(6);
  const double T = 0.7;
  const WeightedTrajectory u = make_traj(b, 16, T, 0.3, 0.5, 0.0);
  for (double nu : {0.3, 0.4, 0.6, 0.9}) {
    CHECK(u.weighted_norm(nu, u.xi) <=
          std::pow(T, nu - u.mu) * u.weighted_norm() + 1e-12);
  }
}

TEST_CASE("rough data: bounded at its own order, divergent above") {
  auto b128 = neumann1d(128);
  auto b256 = neumann1d(256);
  const SpectralField f128 = rough_initial_data(b128, 0.0, 42);
  const SpectralField f256 = rough_initial_data(b256, 0.0, 42);

  // Partial-sum oracle of the series sum (1+lam_k)^s c_k^2.
  auto series = [](const SpectralField& f, double s) {
    double acc = 0.0;
    for (int k = 0; k < f.basis->num_modes(); ++k) {
      acc += std::pow(1.0 + f.basis->eigenvalue(k), s) * f.coeffs[k] *
             f.coeffs[k];
    }
    return std::sqrt(acc);
  };
  CHECK(field_norm(f128, 0.0) ==
        doctest::Approx(series(f128, 0.0)).epsilon(1e-12));

  const double r0 = field_norm(f256, 0.0) / field_norm(f128, 0.0);
  CHECK(r0 > 0.99);
  CHECK(r0 < 1.01);
  const double r5 = field_norm(f256, 0.5) / field_norm(f128, 0.5);
  CHECK(r5 > 1.05);

  // Determinism: same seed gives bit-identical coefficients.
  const SpectralField again = rough_initial_data(b128, 0.0, 42);
  for (int k = 0; k < b128->num_modes(); ++k) {
    CHECK(again.coeffs[k] == f128.coeffs[k]);
  }
}
