#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "semiflow/evolution.hpp"

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

SystemState random_state(const BasisPtr& b, int arity, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SpectralField> comps;
  for (int c = 0; c < arity; ++c) {
    SpectralField f(b);
    for (auto& v : f.coeffs) v = gauss(rng);
    comps.push_back(f);
  }
  return SystemState(std::move(comps));
}

double state_dist(const SystemState& a, const SystemState& b) {
  double acc = 0.0;
  for (int c = 0; c < a.arity(); ++c) {
    for (size_t k = 0; k < a.components[c].coeffs.size(); ++k) {
      const double d = a.components[c].coeffs[k] - b.components[c].coeffs[k];
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

Eigen::VectorXd flatten(const SystemState& s) {
  const int K = s.components[0].basis->num_modes();
  Eigen::VectorXd x(s.arity() * K);
  for (int c = 0; c < s.arity(); ++c) {
    for (int k = 0; k < K; ++k) x(c * K + k) = s.components[c].coeffs[k];
  }
  return x;
}

}  // namespace

TEST_CASE("diagonal heat semigroup damps each mode exactly") {
  auto b = neumann1d(6);
  auto gen = GeneratorSpec::diagonal(b, {1.0});
  std::mt19937_64 rng(3);
  const SystemState x = random_state(b, 1, rng);
  const double t = 0.1;
  const SystemState y = apply_semigroup(gen, t, x);
  for (int k = 0; k < b->num_modes(); ++k) {
    CHECK(y.components[0].coeffs[k] ==
          doctest::Approx(std::exp(-t * b->eigenvalue(k)) *
                          x.components[0].coeffs[k])
              .epsilon(1e-13));
  }
  // The first nonconstant mode decays by e^{-0.1 pi^2}.
  SystemState e1 = x;
  for (auto& c : e1.components[0].coeffs) c = 0.0;
  e1.components[0].coeffs[1] = 1.0;
  const SystemState ye = apply_semigroup(gen, t, e1);
  CHECK(ye.components[0].coeffs[1] ==
        doctest::Approx(std::exp(-0.1 * M_PI * M_PI)).epsilon(1e-13));
}

TEST_CASE("triangular block exponential has the closed 2x2 form") {
  auto b = neumann1d(4);
  auto gen = GeneratorSpec::triangular(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0});
  // On the constant mode (lambda = 0) the block is [[0,0],[1,-1]], whose
  // exponential is [[1,0],[1-e^{-t}, e^{-t}]].
  SystemState x(std::vector<SpectralField>{SpectralField(b), SpectralField(b)});
  x.components[0].coeffs[0] = 1.0;
  const double t = 0.7;
  const SystemState y = apply_semigroup(gen, t, x);
  CHECK(y.components[0].coeffs[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(y.components[1].coeffs[0] ==
        doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-13));

  // Independent 2x2 eigendecomposition oracle on every mode.
  std::mt19937_64 rng(11);
  const SystemState z = random_state(b, 2, rng);
  const SystemState w = apply_semigroup(gen, t, z);
  for (int k = 0; k < b->num_modes(); ++k) {
    const double lam = b->eigenvalue(k);
    Eigen::Matrix2d A;
    A << -lam, 0.0, 1.0, -lam - 1.0;
    Eigen::EigenSolver<Eigen::Matrix2d> es(A);
    const Eigen::Matrix2cd V = es.eigenvectors();
    const Eigen::Vector2cd mu = es.eigenvalues();
    Eigen::Vector2cd v0(z.components[0].coeffs[k], z.components[1].coeffs[k]);
    Eigen::Vector2cd c = V.partialPivLu().solve(v0);
    c(0) *= std::exp(t * mu(0));
    c(1) *= std::exp(t * mu(1));
    const Eigen::Vector2cd out = V * c;
    CHECK(std::fabs(out(0).real() - w.components[0].coeffs[k]) < 1e-11);
    CHECK(std::fabs(out(1).real() - w.components[1].coeffs[k]) < 1e-11);
  }
}

TEST_CASE("t = 0 gives the identity for every kind") {
  auto b = neumann1d(5);
  std::mt19937_64 rng(17);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  chi.coeffs[1] = 0.2;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::diagonal(b, {1.0, 0.5}, {0.0, -1.0}),
      GeneratorSpec::triangular(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0}),
      GeneratorSpec::variable(b, {1.0}, {0.0}, chi)};
  for (const auto& gen : gens) {
    const SystemState x = random_state(b, gen.arity, rng);
    const SystemState y = apply_semigroup(gen, 0.0, x);
    CHECK(state_dist(x, y) < 1e-14);
  }
  CHECK_THROWS_AS(apply_semigroup(gens[0], -0.1,
                                  random_state(b, 2, rng)),
                  std::invalid_argument);
}

TEST_CASE("semigroup law and constant-path evolution operator") {
  auto b = neumann1d(6);
  std::mt19937_64 rng(23);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  chi.coeffs[2] = 0.15;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::diagonal(b, {1.0}, {-0.3}),
      GeneratorSpec::triangular(b, {1.0, 2.0}, {0.0, 0.0, 1.0, -1.0}),
      GeneratorSpec::variable(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0}, chi)};
  for (const auto& gen : gens) {
    const SystemState x = random_state(b, gen.arity, rng);
    const double s = 0.13, t = 0.29;
    const SystemState two_step =
        apply_semigroup(gen, t, apply_semigroup(gen, s, x));
    const SystemState one_step = apply_semigroup(gen, s + t, x);
    CHECK(state_dist(two_step, one_step) < 1e-11);

    GeneratorPath path;
    path.times = {0.0, 0.1, 0.25, 0.42};
    path.gens = {gen, gen, gen};
    const SystemState via_path = evolution_op(path, 0.0, 0.42, x);
    const SystemState direct = apply_semigroup(gen, 0.42, x);
    CHECK(state_dist(via_path, direct) < 1e-12);
    // Partial windows also agree.
    const SystemState mid = evolution_op(path, 0.05, 0.3, x);
    CHECK(state_dist(mid, apply_semigroup(gen, 0.25, x)) < 1e-12);
  }
}

TEST_CASE("evolution operator composes cells earliest-first") {
  auto b = neumann1d(4);
  std::mt19937_64 rng(29);
  const SystemState x = random_state(b, 2, rng);
  auto g1 = GeneratorSpec::triangular(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0});
  auto g2 = GeneratorSpec::triangular(b, {2.0, 0.5}, {0.0, 0.0, -1.0, 0.0});
  GeneratorPath path;
  path.times = {0.0, 0.4, 1.0};
  path.gens = {g1, g2};
  const SystemState got = evolution_op(path, 0.0, 1.0, x);
  const SystemState want =
      apply_semigroup(g2, 0.6, apply_semigroup(g1, 0.4, x));
  CHECK(state_dist(got, want) < 1e-12);
}

TEST_CASE("frozen-coefficient products converge under mesh refinement") {
  auto b = neumann1d(4);
  std::mt19937_64 rng(31);
  const SystemState x = random_state(b, 1, rng);
  // Time-dependent diagonal generator a(t) = 1 + t: the exact evolution
  // damps mode k by exp(-lambda_k int_0^1 (1+s) ds) = exp(-1.5 lambda_k).
  auto path_for = [&](int N) {
    GeneratorPath path;
    for (int j = 0; j <= N; ++j) path.times.push_back(static_cast<double>(j) / N);
    for (int j = 0; j < N; ++j) {
      const double tl = path.times[j];
      path.gens.push_back(GeneratorSpec::diagonal(b, {1.0 + tl}));
    }
    return path;
  };
  SystemState exact = x;
  for (int k = 0; k < b->num_modes(); ++k) {
    exact.components[0].coeffs[k] *= std::exp(-1.5 * b->eigenvalue(k));
  }
  const double e8 = state_dist(evolution_op(path_for(8), 0.0, 1.0, x), exact);
  const double e16 = state_dist(evolution_op(path_for(16), 0.0, 1.0, x), exact);
  const double e32 = state_dist(evolution_op(path_for(32), 0.0, 1.0, x), exact);
  CHECK(e16 < e8);
  CHECK(e32 < e16);
  CHECK(e8 / e16 > 1.7);  // first-order freezing: the error roughly halves
  CHECK(e16 / e32 > 1.7);
}

TEST_CASE("dense oracle agrees with the closed-form semigroups") {
  auto b = neumann1d(6);
  std::mt19937_64 rng(37);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  chi.coeffs[1] = 0.25;
  chi.coeffs[3] = -0.1;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::diagonal(b, {1.0, 0.3}, {0.0, -0.5}),
      GeneratorSpec::triangular(b, {1.0, 1.0, 1.0},
                                {0.0, 0.0, 0.0,
                                 1.0, -1.0, 0.0,
                                 0.0, 1.0, -1.0}),
      GeneratorSpec::variable(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0}, chi)};
  for (const auto& gen : gens) {
    const SystemState x = random_state(b, gen.arity, rng);
    for (double t : {0.01, 0.3, 1.0}) {
      const SystemState fast = apply_semigroup(gen, t, x);
      const SystemState slow = dense_oracle(gen, t, x);
      CHECK(state_dist(fast, slow) < 1e-10 * (1.0 + flatten(x).norm()));
    }
  }
}

TEST_CASE("matrix exponential matches the eigendecomposition route") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd A(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) A(i, j) = gauss(rng);
    const Eigen::MatrixXd E = matrix_exponential(A);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    const Eigen::MatrixXcd V = es.eigenvectors();
    const Eigen::MatrixXcd O =
        V * es.eigenvalues().array().exp().matrix().asDiagonal() *
        V.partialPivLu().solve(Eigen::MatrixXcd::Identity(8, 8));
    CHECK((E - O.real()).norm() < 1e-10 * (1.0 + E.norm()));
  }
}

TEST_CASE("unit conductivity reduces the variable kind to the heat flow") {
  auto b = neumann1d(8);
  SpectralField one(b);
  one.coeffs[0] = 1.0;  // chi == 1 on (0,1)
  auto var = GeneratorSpec::variable(b, {1.0}, {0.0}, one);
  auto diag = GeneratorSpec::diagonal(b, {1.0});
  std::mt19937_64 rng(43);
  const SystemState x = random_state(b, 1, rng);
  for (double t : {0.05, 0.5}) {
    CHECK(state_dist(apply_semigroup(var, t, x),
                     apply_semigroup(diag, t, x)) < 1e-10);
  }
}

TEST_CASE("apply_generator matches the assembled dense matrix") {
  auto b = neumann1d(5);
  std::mt19937_64 rng(47);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  chi.coeffs[2] = 0.2;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::diagonal(b, {1.0, 2.0}, {0.1, -0.4}),
      GeneratorSpec::triangular(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0}),
      GeneratorSpec::variable(b, {1.0, 1.0, 1.0},
                              {0.0, 0.0, 0.0,
                               1.0, -1.0, 0.0,
                               0.0, 0.0, 0.0},
                              chi)};
  for (const auto& gen : gens) {
    const SystemState x = random_state(b, gen.arity, rng);
    const Eigen::VectorXd got = flatten(apply_generator(gen, x));
    const Eigen::VectorXd want = assemble_dense(gen) * flatten(x);
    CHECK((got - want).norm() < 1e-11 * (1.0 + want.norm()));
  }
}

TEST_CASE("propagator reproduces apply_semigroup for all kinds") {
  auto b = neumann1d(6);
  std::mt19937_64 rng(53);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  chi.coeffs[1] = 0.3;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::diagonal(b, {0.7}, {-0.2}),
      GeneratorSpec::triangular(b, {1.0, 1.0}, {0.0, 0.0, 1.0, -1.0}),
      GeneratorSpec::variable(b, {1.0}, {0.0}, chi)};
  for (const auto& gen : gens) {
    Propagator prop(gen);
    const SystemState x = random_state(b, gen.arity, rng);
    for (double t : {0.0, 0.02, 0.37, 2.0}) {
      CHECK(state_dist(prop.apply(t, x), apply_semigroup(gen, t, x)) < 1e-10);
    }
  }
}

TEST_CASE("smoothing table: contraction at theta = 0 and the exact gain") {
  auto b = neumann1d(32);
  auto gen = GeneratorSpec::diagonal(b, {1.0});
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(1e-3 * std::pow(1.26, i));

  const SmoothingTable t0 = measure_smoothing(gen, 0.0, grid);
  for (double n : t0.norms) CHECK(n <= 1.0 + 1e-13);

  const SmoothingTable t5 = measure_smoothing(gen, 0.5, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    // Brute-force oracle: the best per-mode gain measured through the
    // semigroup itself and the norm at order 2 theta = 1.
    double best = 0.0;
    for (int k = 0; k < b->num_modes(); ++k) {
      SystemState e(std::vector<SpectralField>{SpectralField(b)});
      e.components[0].coeffs[k] = 1.0;
      const SystemState out = apply_semigroup(gen, grid[i], e);
      best = std::max(best, field_norm(out.components[0], 1.0));
    }
    CHECK(t5.norms[i] == doctest::Approx(best).epsilon(1e-12));
    CHECK(t5.weighted[i] ==
          doctest::Approx(std::pow(grid[i], 0.5) * t5.norms[i])
              .epsilon(1e-13));
  }
  // The weighted gain stays bounded even at very large times.
  const SmoothingTable late = measure_smoothing(gen, 0.5, {1e3});
  CHECK(late.weighted[0] <= 1e3);
  CHECK(std::isfinite(late.weighted[0]));
}

TEST_CASE("smoothing rejects the variable kind") {
  auto b = neumann1d(4);
  SpectralField chi(b);
  chi.coeffs[0] = 1.0;
  auto gen = GeneratorSpec::variable(b, {1.0}, {0.0}, chi);
  CHECK_THROWS_AS(measure_smoothing(gen, 0.5, {0.1}), std::invalid_argument);
}
