#include "semiflow/mild.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "semiflow/evolution.hpp"
#include "semiflow/special.hpp"

namespace semiflow {

MeshSpec MeshSpec::graded(double T, int N, double r) {
  if (!(T > 0.0) || N < 1 || !(r >= 1.0)) {
    throw std::invalid_argument("MeshSpec: need T > 0, N >= 1, r >= 1");
  }
  return MeshSpec{T, N, r};
}

double MeshSpec::default_grading(double mu, double q) {
  const double b = mu * q;
  if (!(b < 1.0)) {
    throw std::invalid_argument("MeshSpec: weight exponent mu*q must be < 1");
  }
  return std::max(1.0, 1.5 / (1.0 - b));
}

std::vector<double> MeshSpec::nodes() const {
  std::vector<double> t(N + 1);
  for (int j = 0; j <= N; ++j) {
    t[j] = T * std::pow(static_cast<double>(j) / N, r);
  }
  t[N] = T;
  return t;
}

void MeshSpec::check_weight(double mu, double q) const {
  const double b = mu * q;
  if (!(b < 1.0)) {
    throw std::invalid_argument("MeshSpec: weight exponent mu*q must be < 1");
  }
  if (r < (1.0 - 1e-9) / (1.0 - b)) {
    throw std::invalid_argument(
        "MeshSpec: grading r too weak for the weight (need r >= 1/(1-mu q))");
  }
}

std::array<double, 2> singular_weights(double a, double b, double cell_lo,
                                       double cell_hi, double t) {
  if (!(a > -1.0) || !(b < 1.0)) {
    throw std::invalid_argument(
        "singular_weights: need a > -1 and b < 1 (weight window violated)");
  }
  if (!(cell_lo >= 0.0) || !(cell_hi > cell_lo) || cell_hi > t * (1 + 1e-12)) {
    throw std::invalid_argument("singular_weights: cell must lie in [0, t]");
  }
  const double x0 = cell_lo / t;
  const double x1 = std::min(1.0, cell_hi / t);
  // Moments M_m = int_cell (t-s)^a s^{m-b} ds via the incomplete Beta
  // function after s = t x.
  double M[2];
  for (int m = 0; m < 2; ++m) {
    const double aa = m - b + 1.0;
    const double bb = a + 1.0;
    M[m] = std::pow(t, a + m - b + 1.0) *
           (incomplete_beta(x1, aa, bb) - incomplete_beta(x0, aa, bb));
  }
  const double h = cell_hi - cell_lo;
  return {(cell_hi * M[0] - M[1]) / h, (M[1] - cell_lo * M[0]) / h};
}

namespace {

SystemState zero_like(const SystemState& s) {
  SystemState z = s;
  for (auto& c : z.components) {
    std::fill(c.coeffs.begin(), c.coeffs.end(), 0.0);
  }
  return z;
}

// One full application of the fixed-point map F over the mesh:
// F(u)(t_{j+1}) = U(t_{j+1},0) u0 + sum of per-cell Duhamel integrals, with
// the generator frozen at the left node of each cell and the nonlinearity
// interpolated linearly in the weighted variable t^{mu q} f(u(t)).
WeightedTrajectory apply_fixed_point_map(const ModelSpec& model,
                                         const SystemState& u0,
                                         const WeightedTrajectory& u,
                                         double b) {
  constexpr int kSub = 64;  // sub-intervals per mesh cell
  const std::vector<double>& t = u.times;
  const int N = static_cast<int>(t.size()) - 1;

  // Frozen per-cell propagators.
  std::vector<std::unique_ptr<Propagator>> props;
  if (model.state_dependent_a) {
    props.reserve(N);
    for (int j = 0; j < N; ++j) {
      props.emplace_back(
          std::make_unique<Propagator>(model.a_builder(u.states[j])));
    }
  } else {
    props.emplace_back(std::make_unique<Propagator>(model.a_builder(u0)));
  }
  auto prop = [&](int j) -> const Propagator& {
    return model.state_dependent_a ? *props[j] : *props[0];
  };

  // Weighted nonlinearity values w_j = t_j^b f(u(t_j)); the t=0 node uses
  // the first positive node's weight so the linear interpolant stays O(1).
  std::vector<SystemState> w(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double tw = (j == 0) ? std::pow(t[1], b) : std::pow(t[j], b);
    w[j] = tw * eval_nonlinearity(model, u.states[j]);
  }

  WeightedTrajectory out = u;
  out.states[0] = u0;
  SystemState orbit = u0;
  SystemState duhamel = zero_like(u0);
  for (int j = 0; j < N; ++j) {
    const double h = t[j + 1] - t[j];
    const Propagator& P = prop(j);
    // Cell integral: data g(s) = exp((t_{j+1}-s)A) w_lin(s), integrated
    // against the kernel s^{-b} exactly per sub-interval.
    SystemState cell = zero_like(u0);
    SystemState g_prev = P.apply(h, w[j]);
    for (int i = 0; i < kSub; ++i) {
      const double s0 = t[j] + h * i / kSub;
      // pin the last sub-node to the cell end: t[j] + h can overshoot
      // t[j+1] by one ulp, which would make the propagator time negative
      const double s1 = (i + 1 == kSub) ? t[j + 1] : t[j] + h * (i + 1) / kSub;
      const double frac = static_cast<double>(i + 1) / kSub;
      const SystemState wlin = (1.0 - frac) * w[j] + frac * w[j + 1];
      const SystemState g_next = P.apply(t[j + 1] - s1, wlin);
      const auto wq = singular_weights(0.0, b, s0, s1, t[j + 1]);
      cell += wq[0] * g_prev + wq[1] * g_next;
      g_prev = g_next;
    }
    orbit = P.apply(h, orbit);
    duhamel = P.apply(h, duhamel) + cell;
    out.states[j + 1] = orbit + duhamel;
  }
  return out;
}

}  // namespace

std::pair<WeightedTrajectory, PicardReport> picard_solve(
    const ModelSpec& model, const SystemState& u0_in, const MeshSpec& mesh,
    double tol, int max_iter) {
  ExponentBudget budget = model.budget;
  if (!budget.has_weight()) budget = derive_weight(budget, model.mode);
  {
    const auto bad = validate_budget(budget, model.mode);
    if (!bad.empty()) {
      std::string msg = "picard_solve: budget invalid:";
      for (const auto& v : bad) msg += " " + v;
      throw std::invalid_argument(msg);
    }
  }
  const double b = budget.mu * budget.q;
  mesh.check_weight(budget.mu, budget.q);

  SystemState u0 = model.make_state(u0_in.components);

  WeightedTrajectory u;
  u.times = mesh.nodes();
  u.mu = budget.mu;
  u.xi = budget.xi;
  u.beta = budget.beta;
  {
    // Initial iterate: frozen-coefficient semigroup orbit of u0.
    Propagator P(model.a_builder(u0));
    u.states.reserve(u.times.size());
    for (double t : u.times) u.states.push_back(P.apply(t, u0));
  }

  PicardReport report;
  double prev_delta = std::nan("");
  bool small_delta = false;
  for (int m = 0; m < max_iter; ++m) {
    WeightedTrajectory next;
    try {
      next = apply_fixed_point_map(model, u0, u, b);
    } catch (const std::exception& e) {
      throw NonConvergenceError(
          std::string("picard_solve: iteration diverged (") + e.what() + ")",
          report);
    }
    const double delta = dwt_metric(next, u);
    ++report.iterates;
    if (!std::isnan(prev_delta) && prev_delta > 0.0) {
      report.contraction_ratios.push_back(delta / prev_delta);
    }
    u = std::move(next);
    if (!std::isfinite(delta) || delta > 1e10) {
      throw NonConvergenceError("picard_solve: iterates blowing up", report);
    }
    prev_delta = delta;
    if (delta < tol) {
      small_delta = true;
      break;
    }
  }
  if (!small_delta && !report.contraction_ratios.empty() &&
      report.contraction_ratios.back() >= 1.0) {
    throw NonConvergenceError(
        "picard_solve: max_iter reached without contraction", report);
  }
  // Residual recomputed from scratch against the final iterate.
  report.final_residual =
      dwt_metric(apply_fixed_point_map(model, u0, u, b), u);
  report.converged = report.final_residual < tol;
  return {std::move(u), std::move(report)};
}

namespace {

Eigen::VectorXd flatten(const SystemState& s) {
  const int K = s.components[0].basis->num_modes();
  Eigen::VectorXd x(s.arity() * K);
  for (int i = 0; i < s.arity(); ++i) {
    for (int k = 0; k < K; ++k) x[i * K + k] = s.components[i].coeffs[k];
  }
  return x;
}

SystemState unflatten(const SystemState& like, const Eigen::VectorXd& x) {
  SystemState out = like;
  const int K = like.components[0].basis->num_modes();
  for (int i = 0; i < like.arity(); ++i) {
    for (int k = 0; k < K; ++k) out.components[i].coeffs[k] = x[i * K + k];
  }
  return out;
}

Eigen::VectorXd generator_diagonal(const GeneratorSpec& gen) {
  const int K = gen.basis->num_modes();
  Eigen::VectorXd d(gen.arity * K);
  for (int i = 0; i < gen.arity; ++i) {
    for (int k = 0; k < K; ++k) {
      if (gen.kind == GeneratorSpec::Kind::Variable && i == 0) {
        d[k] = gen.dense0(k, k) + gen.coupling[0];
      } else {
        d[i * K + k] = gen.coupling[i * gen.arity + i] -
                       gen.diffusivities[i] * gen.basis->eigenvalue(k);
      }
    }
  }
  return d;
}

}  // namespace

ReferenceResult integrate_reference(const ModelSpec& model,
                                    const SystemState& u0_in, double T,
                                    int steps, double local_tol) {
  if (!(T > 0.0) || steps < 1) {
    throw std::invalid_argument("integrate_reference: need T > 0, steps >= 1");
  }
  const SystemState u0 = model.make_state(u0_in.components);
  const GeneratorSpec gen0 = model.a_builder(u0);
  const Eigen::VectorXd D = generator_diagonal(gen0);

  // Full right-hand side minus the frozen diagonal part D.
  auto n_eval = [&](const Eigen::VectorXd& y) {
    const SystemState s = unflatten(u0, y);
    const GeneratorSpec& g =
        model.state_dependent_a ? model.a_builder(s) : gen0;
    const Eigen::VectorXd ay = flatten(apply_generator(g, s));
    const Eigen::VectorXd f = flatten(eval_nonlinearity(model, s));
    return (ay + f - D.cwiseProduct(y)).eval();
  };
  auto efac = [&](double s) {
    return (s * D.array()).exp().matrix().eval();
  };

  // Dormand-Prince 5(4) pair with exponential (Lawson) treatment of D.
  static const double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0,
                              1.0};
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0};
  static const double b4[7] = {5179.0 / 57600,    0,           7571.0 / 16695,
                               393.0 / 640,       -92097.0 / 339200,
                               187.0 / 2100,      1.0 / 40};

  ReferenceResult result;
  WeightedTrajectory& traj = result.trajectory;
  traj.mu = model.budget.mu;
  traj.xi = model.budget.xi;
  traj.beta = model.budget.beta;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  Eigen::VectorXd y = flatten(u0);
  double t_now = 0.0;
  double h = T / (100.0 * steps);
  const double h_min = std::max(1e-14 * T, 1e-280);
  long step_count = 0;

  for (int out = 1; out <= steps; ++out) {
    const double t_target = T * out / steps;
    while (t_now < t_target - 1e-14 * T) {
      if (++step_count > 5000000) {
        throw std::runtime_error("integrate_reference: step budget exhausted");
      }
      const double h_try = std::min(h, t_target - t_now);
      bool ok = false;
      double grow = 0.2;
      Eigen::VectorXd y5;
      try {
        Eigen::VectorXd k[7];
        for (int i = 0; i < 7; ++i) {
          Eigen::VectorXd Yi = efac(c[i] * h_try).cwiseProduct(y);
          for (int j = 0; j < i; ++j) {
            if (A[i][j] == 0.0) continue;
            Yi += h_try * A[i][j] *
                  efac((c[i] - c[j]) * h_try).cwiseProduct(k[j]);
          }
          k[i] = n_eval(Yi);
        }
        y5 = efac(h_try).cwiseProduct(y);
        Eigen::VectorXd y4 = y5;
        for (int i = 0; i < 7; ++i) {
          const Eigen::VectorXd term =
              efac((1.0 - c[i]) * h_try).cwiseProduct(k[i]);
          if (b5[i] != 0.0) y5 += h_try * b5[i] * term;
          if (b4[i] != 0.0) y4 += h_try * b4[i] * term;
        }
        const double err = (y5 - y4).norm();
        const double scale = local_tol * (1.0 + y5.norm());
        ok = std::isfinite(err) && err <= scale;
        grow = (err > 0.0 && std::isfinite(err))
                   ? 0.9 * std::pow(scale / err, 0.2)
                   : 5.0;
      } catch (const std::exception&) {
        grow = 0.2;  // non-finite evaluation: retry with a smaller step
      }
      if (ok) {
        t_now += h_try;
        y = y5;
      }
      h = h_try * std::clamp(grow, 0.2, 5.0);
      if (!ok && h < h_min) {
        result.step_underflow = true;
        result.stop_time = t_now;
        return result;
      }
    }
    t_now = t_target;
    traj.times.push_back(t_target);
    traj.states.push_back(unflatten(u0, y));
  }
  result.stop_time = t_now;
  return result;
}

}  // namespace semiflow
