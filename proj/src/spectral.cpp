#include "semiflow/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace semiflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_spec(const BasisSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) {
    throw std::invalid_argument("basis: dim must be 1 or 2");
  }
  for (int a = 0; a < spec.dim; ++a) {
    if (!(spec.lengths[a] > 0.0)) {
      throw std::invalid_argument("basis: lengths must be positive");
    }
    if (spec.modes[a] < 1) {
      throw std::invalid_argument("basis: modes must be >= 1");
    }
    if (spec.grid[a] < 2 * spec.modes[a]) {
      throw std::invalid_argument("basis: grid must be >= 2*modes");
    }
  }
}

}  // namespace

Basis::Basis(const BasisSpec& spec) : spec_(spec) {
  check_spec(spec);
  num_modes_ = 1;
  num_grid_ = 1;
  volume_ = 1.0;
  for (int a = 0; a < spec.dim; ++a) {
    const int K = spec.modes[a];
    const int G = spec.grid[a];
    const double L = spec.lengths[a];
    num_modes_ *= K;
    num_grid_ *= G;
    volume_ *= L;

    coords_[a].resize(G);
    for (int i = 0; i < G; ++i) coords_[a][i] = (i + 0.5) * L / G;

    eval_[a].assign(static_cast<size_t>(G) * K, 0.0);
    deval_[a].assign(static_cast<size_t>(G) * K, 0.0);
    for (int i = 0; i < G; ++i) {
      const double x = coords_[a][i];
      for (int m = 0; m < K; ++m) {
        // Frequency index: Neumann modes start at 0, Dirichlet at 1.
        const int fr = (spec.bc == Bc::Neumann) ? m : m + 1;
        const double w = fr * kPi / L;
        double phi, dphi;
        if (spec.bc == Bc::Neumann) {
          const double amp = (fr == 0) ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L);
          phi = amp * std::cos(w * x);
          dphi = -amp * w * std::sin(w * x);
        } else {
          const double amp = std::sqrt(2.0 / L);
          phi = amp * std::sin(w * x);
          dphi = amp * w * std::cos(w * x);
        }
        eval_[a][static_cast<size_t>(i) * K + m] = phi;
        deval_[a][static_cast<size_t>(i) * K + m] = dphi;
      }
    }
  }
  quad_weight_ = volume_ / num_grid_;

  eigenvalues_.resize(num_modes_);
  mode_magnitudes_.resize(num_modes_);
  if (spec.dim == 1) {
    for (int m = 0; m < spec.modes[0]; ++m) {
      const int fr = (spec.bc == Bc::Neumann) ? m : m + 1;
      const double w = fr * kPi / spec.lengths[0];
      eigenvalues_[m] = w * w;
      mode_magnitudes_[m] = std::max(1.0, static_cast<double>(fr));
    }
  } else {
    const int K1 = spec.modes[0], K2 = spec.modes[1];
    for (int m1 = 0; m1 < K1; ++m1) {
      for (int m2 = 0; m2 < K2; ++m2) {
        const int f1 = (spec.bc == Bc::Neumann) ? m1 : m1 + 1;
        const int f2 = (spec.bc == Bc::Neumann) ? m2 : m2 + 1;
        const double w1 = f1 * kPi / spec.lengths[0];
        const double w2 = f2 * kPi / spec.lengths[1];
        const int k = m1 * K2 + m2;
        eigenvalues_[k] = w1 * w1 + w2 * w2;
        mode_magnitudes_[k] =
            std::max(1.0, std::sqrt(double(f1) * f1 + double(f2) * f2));
      }
    }
  }
}

BasisPtr Basis::build(const BasisSpec& spec) {
  return std::shared_ptr<const Basis>(new Basis(spec));
}

const std::vector<double>& Basis::grid_coords(int axis) const {
  if (axis < 0 || axis >= spec_.dim) {
    throw std::invalid_argument("basis: axis out of range");
  }
  return coords_[axis];
}

int Basis::freq(int k, int axis) const {
  const int base = (spec_.bc == Bc::Neumann) ? 0 : 1;
  if (spec_.dim == 1) return k + base;
  const int K2 = spec_.modes[1];
  return (axis == 0) ? (k / K2 + base) : (k % K2 + base);
}

bool Basis::compatible(const Basis& other) const {
  if (spec_.dim != other.spec_.dim) return false;
  for (int a = 0; a < spec_.dim; ++a) {
    if (spec_.lengths[a] != other.spec_.lengths[a]) return false;
    if (spec_.modes[a] != other.spec_.modes[a]) return false;
    if (spec_.grid[a] != other.spec_.grid[a]) return false;
  }
  return spec_.bc == other.spec_.bc;
}

std::vector<double> Basis::to_grid(const std::vector<double>& coeffs) const {
  if (static_cast<int>(coeffs.size()) != num_modes_) {
    throw std::invalid_argument("to_grid: coefficient size mismatch");
  }
  if (spec_.dim == 1) {
    const int G = spec_.grid[0], K = spec_.modes[0];
    std::vector<double> out(G, 0.0);
    for (int i = 0; i < G; ++i) {
      double s = 0.0;
      const double* row = &eval_[0][static_cast<size_t>(i) * K];
      for (int m = 0; m < K; ++m) s += row[m] * coeffs[m];
      out[i] = s;
    }
    return out;
  }
  const int G1 = spec_.grid[0], G2 = spec_.grid[1];
  const int K1 = spec_.modes[0], K2 = spec_.modes[1];
  // tmp[m1][j] = sum_m2 C[m1][m2] * E2[j][m2]
  std::vector<double> tmp(static_cast<size_t>(K1) * G2, 0.0);
  for (int m1 = 0; m1 < K1; ++m1) {
    for (int j = 0; j < G2; ++j) {
      double s = 0.0;
      const double* row = &eval_[1][static_cast<size_t>(j) * K2];
      const double* c = &coeffs[static_cast<size_t>(m1) * K2];
      for (int m2 = 0; m2 < K2; ++m2) s += row[m2] * c[m2];
      tmp[static_cast<size_t>(m1) * G2 + j] = s;
    }
  }
  std::vector<double> out(static_cast<size_t>(G1) * G2, 0.0);
  for (int i = 0; i < G1; ++i) {
    const double* row = &eval_[0][static_cast<size_t>(i) * K1];
    for (int j = 0; j < G2; ++j) {
      double s = 0.0;
      for (int m1 = 0; m1 < K1; ++m1) {
        s += row[m1] * tmp[static_cast<size_t>(m1) * G2 + j];
      }
      out[static_cast<size_t>(i) * G2 + j] = s;
    }
  }
  return out;
}

std::vector<double> Basis::from_grid(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != num_grid_) {
    throw std::invalid_argument("from_grid: grid size mismatch");
  }
  if (spec_.dim == 1) {
    const int G = spec_.grid[0], K = spec_.modes[0];
    const double w = spec_.lengths[0] / G;
    std::vector<double> out(K, 0.0);
    for (int i = 0; i < G; ++i) {
      const double* row = &eval_[0][static_cast<size_t>(i) * K];
      const double v = values[i] * w;
      for (int m = 0; m < K; ++m) out[m] += row[m] * v;
    }
    return out;
  }
  const int G1 = spec_.grid[0], G2 = spec_.grid[1];
  const int K1 = spec_.modes[0], K2 = spec_.modes[1];
  const double w1 = spec_.lengths[0] / G1;
  const double w2 = spec_.lengths[1] / G2;
  std::vector<double> tmp(static_cast<size_t>(G1) * K2, 0.0);
  for (int i = 0; i < G1; ++i) {
    for (int j = 0; j < G2; ++j) {
      const double v = values[static_cast<size_t>(i) * G2 + j] * w2;
      const double* row = &eval_[1][static_cast<size_t>(j) * K2];
      double* t = &tmp[static_cast<size_t>(i) * K2];
      for (int m2 = 0; m2 < K2; ++m2) t[m2] += row[m2] * v;
    }
  }
  std::vector<double> out(static_cast<size_t>(K1) * K2, 0.0);
  for (int i = 0; i < G1; ++i) {
    const double* row = &eval_[0][static_cast<size_t>(i) * K1];
    const double* t = &tmp[static_cast<size_t>(i) * K2];
    for (int m1 = 0; m1 < K1; ++m1) {
      const double e = row[m1] * w1;
      double* o = &out[static_cast<size_t>(m1) * K2];
      for (int m2 = 0; m2 < K2; ++m2) o[m2] += e * t[m2];
    }
  }
  return out;
}

std::vector<double> Basis::gradient_grid(const std::vector<double>& coeffs,
                                         int axis) const {
  if (static_cast<int>(coeffs.size()) != num_modes_) {
    throw std::invalid_argument("gradient_grid: coefficient size mismatch");
  }
  if (axis < 0 || axis >= spec_.dim) {
    throw std::invalid_argument("gradient_grid: axis out of range");
  }
  if (spec_.dim == 1) {
    const int G = spec_.grid[0], K = spec_.modes[0];
    std::vector<double> out(G, 0.0);
    for (int i = 0; i < G; ++i) {
      double s = 0.0;
      const double* row = &deval_[0][static_cast<size_t>(i) * K];
      for (int m = 0; m < K; ++m) s += row[m] * coeffs[m];
      out[i] = s;
    }
    return out;
  }
  const int G1 = spec_.grid[0], G2 = spec_.grid[1];
  const int K1 = spec_.modes[0], K2 = spec_.modes[1];
  const std::vector<double>& e1 = (axis == 0) ? deval_[0] : eval_[0];
  const std::vector<double>& e2 = (axis == 1) ? deval_[1] : eval_[1];
  std::vector<double> tmp(static_cast<size_t>(K1) * G2, 0.0);
  for (int m1 = 0; m1 < K1; ++m1) {
    for (int j = 0; j < G2; ++j) {
      double s = 0.0;
      const double* row = &e2[static_cast<size_t>(j) * K2];
      const double* c = &coeffs[static_cast<size_t>(m1) * K2];
      for (int m2 = 0; m2 < K2; ++m2) s += row[m2] * c[m2];
      tmp[static_cast<size_t>(m1) * G2 + j] = s;
    }
  }
  std::vector<double> out(static_cast<size_t>(G1) * G2, 0.0);
  for (int i = 0; i < G1; ++i) {
    const double* row = &e1[static_cast<size_t>(i) * K1];
    for (int j = 0; j < G2; ++j) {
      double s = 0.0;
      for (int m1 = 0; m1 < K1; ++m1) {
        s += row[m1] * tmp[static_cast<size_t>(m1) * G2 + j];
      }
      out[static_cast<size_t>(i) * G2 + j] = s;
    }
  }
  return out;
}

SpectralField::SpectralField(BasisPtr b, std::vector<double> c)
    : basis(std::move(b)), coeffs(std::move(c)) {
  if (static_cast<int>(coeffs.size()) != basis->num_modes()) {
    throw std::invalid_argument("SpectralField: coefficient size mismatch");
  }
}

double SpectralField::l2_norm() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return std::sqrt(s);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!basis->compatible(*other.basis)) {
    throw std::invalid_argument("SpectralField: basis mismatch");
  }
  for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!basis->compatible(*other.basis)) {
    throw std::invalid_argument("SpectralField: basis mismatch");
  }
  for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
  a += b;
  return a;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
  a -= b;
  return a;
}

SpectralField operator*(double s, SpectralField f) {
  f *= s;
  return f;
}

SpectralField field_from_grid(const BasisPtr& basis,
                              const std::vector<double>& values) {
  return SpectralField(basis, basis->from_grid(values));
}

void dealias(SpectralField& f) {
  const Basis& b = *f.basis;
  for (int k = 0; k < b.num_modes(); ++k) {
    for (int a = 0; a < b.dim(); ++a) {
      if (b.freq(k, a) > (2 * b.spec().modes[a]) / 3) {
        f.coeffs[k] = 0.0;
        break;
      }
    }
  }
}

SpectralField pseudo_product(const SpectralField& f, const SpectralField& g) {
  if (!f.basis->compatible(*g.basis)) {
    throw std::invalid_argument("pseudo_product: basis mismatch");
  }
  std::vector<double> fv = f.grid_values();
  const std::vector<double> gv = g.grid_values();
  for (size_t i = 0; i < fv.size(); ++i) fv[i] *= gv[i];
  SpectralField out = field_from_grid(f.basis, fv);
  dealias(out);
  return out;
}

}  // namespace semiflow
