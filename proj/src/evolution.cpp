#include "semiflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semiflow {

namespace {

void check_square(const std::vector<double>& coupling, int m,
                  const char* what) {
  if (static_cast<int>(coupling.size()) != m * m) {
    throw std::invalid_argument(std::string(what) + ": coupling must be m x m");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (coupling[i * m + j] != 0.0) {
        throw std::invalid_argument(std::string(what) +
                                    ": coupling must be lower-triangular");
      }
    }
  }
}

void check_state(const GeneratorSpec& gen, const SystemState& state) {
  if (state.arity() != gen.arity) {
    throw std::invalid_argument("generator/state arity mismatch");
  }
  for (const auto& c : state.components) {
    if (!c.basis || !c.basis->compatible(*gen.basis)) {
      throw std::invalid_argument("generator/state basis mismatch");
    }
  }
}

// sinh(h)/h, stable near zero.
double sinhc(double h) {
  if (std::fabs(h) < 1e-4) {
    const double h2 = h * h;
    return 1.0 + h2 / 6.0 + h2 * h2 / 120.0;
  }
  return std::sinh(h) / h;
}

// First divided difference of exp: (e^a - e^b)/(a - b), confluent-safe.
double exp_dd1(double a, double b) {
  return std::exp(0.5 * (a + b)) * sinhc(0.5 * (a - b));
}

// Second divided difference of exp over {a,b,c}, confluent-safe. Symmetric
// in its arguments; for well-separated nodes uses the recursive definition,
// otherwise a Taylor expansion in complete homogeneous symmetric polynomials
// of the deviations from the mean.
double exp_dd2(double a, double b, double c) {
  double x[3] = {a, b, c};
  std::sort(x, x + 3, std::greater<double>());
  if (x[0] - x[2] > 1e-3) {
    return (exp_dd1(x[0], x[1]) - exp_dd1(x[1], x[2])) / (x[0] - x[2]);
  }
  const double mu = (a + b + c) / 3.0;
  const double d0 = a - mu, d1 = b - mu, d2 = c - mu;
  double factorial = 2.0;  // (n+2)! running value
  double sum = 0.0;
  for (int n = 0; n <= 6; ++n) {
    if (n > 0) factorial *= (n + 2);
    double h = 0.0;  // complete homogeneous symmetric polynomial, degree n
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const int k = n - i - j;
        h += std::pow(d0, i) * std::pow(d1, j) * std::pow(d2, k);
      }
    }
    sum += h / factorial;
  }
  return std::exp(mu) * sum;
}

// Exponential of a lower-triangular matrix via divided differences of exp
// over path products (exact for m <= 3; larger blocks fall back to the
// general matrix exponential).
Eigen::MatrixXd exp_lower_triangular(const Eigen::MatrixXd& L) {
  const int m = static_cast<int>(L.rows());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
  if (m > 3) return matrix_exponential(L);
  for (int i = 0; i < m; ++i) F(i, i) = std::exp(L(i, i));
  if (m >= 2) {
    F(1, 0) = L(1, 0) * exp_dd1(L(1, 1), L(0, 0));
  }
  if (m == 3) {
    F(2, 1) = L(2, 1) * exp_dd1(L(2, 2), L(1, 1));
    F(2, 0) = L(2, 0) * exp_dd1(L(2, 2), L(0, 0)) +
              L(2, 1) * L(1, 0) * exp_dd2(L(2, 2), L(1, 1), L(0, 0));
  }
  return F;
}

Eigen::MatrixXd mode_block(const GeneratorSpec& gen, int k) {
  const int m = gen.arity;
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) M(i, j) = gen.coupling[i * m + j];
    M(i, i) -= gen.diffusivities[i] * gen.basis->eigenvalue(k);
  }
  return M;
}

Eigen::VectorXd flatten(const SystemState& state) {
  const int K = state.components[0].basis->num_modes();
  Eigen::VectorXd x(state.arity() * K);
  for (int i = 0; i < state.arity(); ++i) {
    for (int k = 0; k < K; ++k) x[i * K + k] = state.components[i].coeffs[k];
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

}  // namespace

GeneratorSpec GeneratorSpec::diagonal(BasisPtr basis, std::vector<double> diff,
                                      std::vector<double> shifts) {
  GeneratorSpec g;
  g.kind = Kind::Diagonal;
  g.basis = std::move(basis);
  g.arity = static_cast<int>(diff.size());
  g.diffusivities = std::move(diff);
  if (shifts.empty()) shifts.assign(g.arity, 0.0);
  if (static_cast<int>(shifts.size()) != g.arity) {
    throw std::invalid_argument("GeneratorSpec: shifts size mismatch");
  }
  g.coupling.assign(g.arity * g.arity, 0.0);
  for (int i = 0; i < g.arity; ++i) g.coupling[i * g.arity + i] = shifts[i];
  return g;
}

GeneratorSpec GeneratorSpec::triangular(BasisPtr basis,
                                        std::vector<double> diff,
                                        std::vector<double> coupling) {
  GeneratorSpec g;
  g.kind = Kind::Triangular;
  g.basis = std::move(basis);
  g.arity = static_cast<int>(diff.size());
  g.diffusivities = std::move(diff);
  check_square(coupling, g.arity, "GeneratorSpec::triangular");
  g.coupling = std::move(coupling);
  return g;
}

GeneratorSpec GeneratorSpec::variable(BasisPtr basis, std::vector<double> diff,
                                      std::vector<double> coupling,
                                      const SpectralField& chi) {
  GeneratorSpec g;
  g.kind = Kind::Variable;
  g.basis = std::move(basis);
  g.arity = static_cast<int>(diff.size());
  g.diffusivities = std::move(diff);
  check_square(coupling, g.arity, "GeneratorSpec::variable");
  g.coupling = std::move(coupling);
  if (!chi.basis || !chi.basis->compatible(*g.basis)) {
    throw std::invalid_argument(
        "GeneratorSpec::variable: coefficient field basis mismatch");
  }

  // Galerkin matrix of z -> div(chi grad z) = grad(chi).grad(z) + chi
  // Laplacian(z), assembled column-by-column through the grid.
  const Basis& b = *g.basis;
  const int K = b.num_modes();
  const int G = b.num_grid();
  const std::vector<double> chi_grid = b.to_grid(chi.coeffs);
  std::vector<std::vector<double>> grad_chi(b.dim());
  for (int ax = 0; ax < b.dim(); ++ax) {
    grad_chi[ax] = b.gradient_grid(chi.coeffs, ax);
  }
  g.dense0.resize(K, K);
  std::vector<double> unit(K, 0.0);
  for (int j = 0; j < K; ++j) {
    unit[j] = 1.0;
    const std::vector<double> ej = b.to_grid(unit);
    std::vector<double> vals(G, 0.0);
    for (int ax = 0; ax < b.dim(); ++ax) {
      const std::vector<double> dej = b.gradient_grid(unit, ax);
      for (int p = 0; p < G; ++p) vals[p] += grad_chi[ax][p] * dej[p];
    }
    const double lam = b.eigenvalue(j);
    for (int p = 0; p < G; ++p) vals[p] -= lam * chi_grid[p] * ej[p];
    const std::vector<double> col = b.from_grid(vals);
    for (int i = 0; i < K; ++i) g.dense0(i, j) = col[i];
    unit[j] = 0.0;
  }
  return g;
}

Eigen::MatrixXd assemble_dense(const GeneratorSpec& gen) {
  const int K = gen.basis->num_modes();
  const int m = gen.arity;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * K, m * K);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (i == j) {
        if (gen.kind == GeneratorSpec::Kind::Variable && i == 0) {
          A.block(0, 0, K, K) = gen.dense0;
          A.block(0, 0, K, K).diagonal().array() += gen.coupling[0];
        } else {
          for (int k = 0; k < K; ++k) {
            A(i * K + k, i * K + k) = gen.coupling[i * m + i] -
                                      gen.diffusivities[i] *
                                          gen.basis->eigenvalue(k);
          }
        }
      } else if (gen.coupling[i * m + j] != 0.0) {
        for (int k = 0; k < K; ++k) {
          A(i * K + k, j * K + k) = gen.coupling[i * m + j];
        }
      }
    }
  }
  return A;
}

SystemState apply_generator(const GeneratorSpec& gen, const SystemState& x) {
  check_state(gen, x);
  const int K = gen.basis->num_modes();
  const int m = gen.arity;
  SystemState out = x;
  for (int i = 0; i < m; ++i) {
    std::vector<double>& y = out.components[i].coeffs;
    if (gen.kind == GeneratorSpec::Kind::Variable && i == 0) {
      Eigen::Map<const Eigen::VectorXd> c(x.components[0].coeffs.data(), K);
      Eigen::VectorXd z = gen.dense0 * c + gen.coupling[0] * c;
      for (int k = 0; k < K; ++k) y[k] = z[k];
    } else {
      for (int k = 0; k < K; ++k) {
        y[k] = (gen.coupling[i * m + i] -
                gen.diffusivities[i] * gen.basis->eigenvalue(k)) *
               x.components[i].coeffs[k];
      }
    }
    for (int j = 0; j < i; ++j) {
      const double c = gen.coupling[i * m + j];
      if (c == 0.0) continue;
      for (int k = 0; k < K; ++k) y[k] += c * x.components[j].coeffs[k];
    }
  }
  return out;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A) {
  // Scaling and squaring with the order-13 Pade approximant.
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const int n = static_cast<int>(A.rows());
  const double theta13 = 5.371920351148152;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  Eigen::MatrixXd As = A;
  if (norm1 > theta13) {
    s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    As /= std::ldexp(1.0, s);
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = As * As;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A4 * A2;
  const Eigen::MatrixXd U =
      As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
            b[5] * A4 + b[3] * A2 + b[1] * I);
  const Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                            b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXd F = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) F = F * F;
  return F;
}

SystemState apply_semigroup(const GeneratorSpec& gen, double t,
                            const SystemState& state) {
  if (t < 0.0) throw std::invalid_argument("apply_semigroup: t must be >= 0");
  check_state(gen, state);
  const int K = gen.basis->num_modes();
  const int m = gen.arity;
  SystemState out = state;

  switch (gen.kind) {
    case GeneratorSpec::Kind::Diagonal: {
      for (int i = 0; i < m; ++i) {
        const double shift = gen.coupling[i * m + i];
        for (int k = 0; k < K; ++k) {
          out.components[i].coeffs[k] *= std::exp(
              t * (shift - gen.diffusivities[i] * gen.basis->eigenvalue(k)));
        }
      }
      return out;
    }
    case GeneratorSpec::Kind::Triangular: {
      for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXd F = exp_lower_triangular(t * mode_block(gen, k));
        Eigen::VectorXd c(m);
        for (int i = 0; i < m; ++i) c[i] = state.components[i].coeffs[k];
        const Eigen::VectorXd y = F * c;
        for (int i = 0; i < m; ++i) out.components[i].coeffs[k] = y[i];
      }
      return out;
    }
    case GeneratorSpec::Kind::Variable: {
      const Eigen::MatrixXd F = matrix_exponential(t * assemble_dense(gen));
      return unflatten(state, F * flatten(state));
    }
  }
  throw std::logic_error("apply_semigroup: unknown generator kind");
}

SystemState evolution_op(const GeneratorPath& path, double s, double t,
                         const SystemState& state) {
  if (s > t) throw std::invalid_argument("evolution_op: requires s <= t");
  if (path.times.size() != path.gens.size() + 1 || path.gens.empty()) {
    throw std::invalid_argument("evolution_op: malformed path");
  }
  if (s < path.times.front() - 1e-12 || t > path.times.back() + 1e-12) {
    throw std::invalid_argument("evolution_op: [s,t] outside the path mesh");
  }
  SystemState out = state;
  for (size_t j = 0; j < path.gens.size(); ++j) {
    const double lo = std::max(s, path.times[j]);
    const double hi = std::min(t, path.times[j + 1]);
    if (hi > lo) out = apply_semigroup(path.gens[j], hi - lo, out);
  }
  return out;
}

SmoothingTable measure_smoothing(const GeneratorSpec& gen, double theta,
                                 const std::vector<double>& t_grid) {
  if (theta < 0.0 || theta > 1.0) {
    throw std::invalid_argument("measure_smoothing: theta must be in [0,1]");
  }
  if (gen.kind == GeneratorSpec::Kind::Variable) {
    throw std::invalid_argument(
        "measure_smoothing: diagonal or triangular generators only");
  }
  const int K = gen.basis->num_modes();
  const int m = gen.arity;
  SmoothingTable table;
  for (double t : t_grid) {
    if (t < 0.0) throw std::invalid_argument("measure_smoothing: t >= 0");
    double norm = 0.0;
    for (int k = 0; k < K; ++k) {
      const double mult = std::pow(1.0 + gen.basis->eigenvalue(k), theta);
      if (gen.kind == GeneratorSpec::Kind::Diagonal) {
        for (int i = 0; i < m; ++i) {
          const double rate = gen.coupling[i * m + i] -
                              gen.diffusivities[i] * gen.basis->eigenvalue(k);
          norm = std::max(norm, mult * std::exp(t * rate));
        }
      } else {
        const Eigen::MatrixXd F = exp_lower_triangular(t * mode_block(gen, k));
        norm = std::max(
            norm, mult * F.jacobiSvd().singularValues()[0]);
      }
    }
    table.times.push_back(t);
    table.norms.push_back(norm);
    table.weighted.push_back(std::pow(t, theta) * norm);
  }
  return table;
}

SystemState dense_oracle(const GeneratorSpec& gen, double t,
                         const SystemState& state) {
  if (t < 0.0) throw std::invalid_argument("dense_oracle: t must be >= 0");
  check_state(gen, state);
  if (gen.total_dim() > 512) {
    throw std::invalid_argument("dense_oracle: dimension exceeds 512");
  }
  const Eigen::MatrixXd A = assemble_dense(gen);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::VectorXcd y = V.partialPivLu().solve(
      flatten(state).cast<std::complex<double>>().eval());
  Eigen::VectorXcd z(y.size());
  for (int i = 0; i < y.size(); ++i) z[i] = std::exp(t * lam[i]) * y[i];
  return unflatten(state, (V * z).real());
}

Propagator::Propagator(GeneratorSpec gen) : gen_(std::move(gen)) {
  if (gen_.kind == GeneratorSpec::Kind::Variable) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(assemble_dense(gen_));
    vals_ = es.eigenvalues();
    vecs_ = es.eigenvectors();
    vecs_inv_ = vecs_.partialPivLu().inverse();
  }
}

SystemState Propagator::apply(double t, const SystemState& state) const {
  if (gen_.kind != GeneratorSpec::Kind::Variable) {
    return apply_semigroup(gen_, t, state);
  }
  if (t < 0.0) throw std::invalid_argument("Propagator: t must be >= 0");
  check_state(gen_, state);
  Eigen::VectorXcd y =
      vecs_inv_ * flatten(state).cast<std::complex<double>>().eval();
  for (int i = 0; i < y.size(); ++i) y[i] *= std::exp(t * vals_[i]);
  return unflatten(state, (vecs_ * y).real());
}

}  // namespace semiflow
